"""
Magic function construction for MagicPack

Per-dimension parameters, the φ basis of weight-k theta polynomials and the ψ basis
of quasimodular forms, the homogeneous solve for the integer vectors C_φ and C_ψ,
the truncation order N, and the verification driver that assembles a certificate
from the positivity conditions in ``conditions``.
"""

import json
import logging
import threading
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import count
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from ..config import get_global_config
from ..exceptions import (
    ConsistencyError, DimensionCapError, DimensionError, DimensionExcludedError,
    LadderExhaustedError, ConditionFailedError, RankMismatchError, SolutionSpaceError
)
from ..utils.performance import stage
from .exactnum import PrecisionLadder, exp_neg_pi_bounds, integer_vector, nullspace, rref
from .modforms import (
    EisensteinPolynomial, ThetaPolynomial, delta_inv_pow, phi_s, psi_s_times_w2
)
from .series import RSeries

logger = logging.getLogger(__name__)

CNUMBERS_PATH = Path(__file__).resolve().parent.parent / "data" / "cnumbers.json"
CERTIFICATE_VERSION = 1
PRECISION_CONDITIONS = ("III", "IV", "V", "VI", "VII", "sign48")
EXACT_CONDITIONS = ("I", "II")


_cnumbers: Optional[Dict[int, Optional[Fraction]]] = None
_functions: Dict[Tuple[int, bool, int], "MagicFunction"] = {}
_functions_lock = threading.Lock()


def load_cnumbers() -> Dict[int, Optional[Fraction]]:
    """Bundled c_d values keyed by d (None where d ≡ 16 mod 24)."""
    global _cnumbers
    if _cnumbers is None:
        with open(CNUMBERS_PATH, "r", encoding="utf-8") as f:
            raw = json.load(f)["values"]
        _cnumbers = {int(d): (Fraction(v) if v is not None else None) for d, v in raw.items()}
    return _cnumbers


@dataclass(frozen=True)
class MagicParams:
    """
    Parameters of the magic function in dimension d.

    Attributes:
        d: Dimension, a multiple of 8
        a: Minimal squared norm 2 + 2⌊d/24⌋
        l: Last prescribed squared norm
        k: Weight 2 − d/2 + 6l, always ≡ 2 mod 4
        b: Dimension of the φ basis
        eps: Fourier eigenvalue used by the construction
        c: Spectral threshold c_d, None when the dimension has no entry
    """
    d: int
    a: int
    l: int
    k: int
    b: int
    eps: int = -1
    c: Optional[Fraction] = None

    @property
    def theta_width(self) -> int:
        """Number of theta monomials, k/2 − l."""
        return self.k // 2 - self.l

    @property
    def eisenstein_width(self) -> int:
        """Number of E2/E4/E6 monomials of weight k+2, (k+6)/4."""
        return (self.k + 6) // 4

    @property
    def forbidden_norms(self) -> Tuple[int, ...]:
        """Prescribed squared norms a, a+2, ..., l."""
        return tuple(range(self.a, self.l + 1, 2))

    @property
    def distance_set_squared(self) -> Tuple[Fraction, ...]:
        """K_d squared: n/a for n = a, a+2, ..., l."""
        return tuple(Fraction(n, self.a) for n in self.forbidden_norms)

    @property
    def expected_dimension(self) -> int:
        """⌈k/6⌉ − l/2, which must agree with b."""
        return -(-self.k // 6) - self.l // 2

    @property
    def excluded(self) -> bool:
        return self.d % 24 == 16

    def to_dict(self) -> Dict[str, Any]:
        return {
            "d": self.d, "a": self.a, "l": self.l, "k": self.k, "b": self.b, "eps": self.eps,
            "c": None if self.c is None else _render_fraction(self.c),
        }


def _render_fraction(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def compute_params(d: int, dimension_cap: Optional[int] = None,
                   allow_excluded: bool = False) -> MagicParams:
    """
    Derive (a, l, k, b, c) for dimension d.

    Args:
        d: Dimension, a positive multiple of 8
        dimension_cap: Largest admissible d (defaults to magic.dimension_cap)
        allow_excluded: Return parameters for d ≡ 16 mod 24 instead of raising

    Returns:
        MagicParams for d

    Raises:
        DimensionError: If d is not a positive multiple of 8
        DimensionCapError: If d exceeds the cap
        DimensionExcludedError: If d ≡ 16 mod 24 and allow_excluded is False
    """
    if isinstance(d, bool) or not isinstance(d, int) or d < 8 or d % 8:
        raise DimensionError(f"Dimension must be a positive multiple of 8, got {d!r}", dimension=d)
    if dimension_cap is None:
        dimension_cap = get_global_config().get("magic.dimension_cap", 200)
    if d > dimension_cap:
        raise DimensionCapError(d, dimension_cap)
    if d % 24 == 16 and not allow_excluded:
        raise DimensionExcludedError(d)

    a = 2 + 2 * (d // 24)
    l = a + 4 * ((d - 4) // 12 - d // 24)
    k = 2 - d // 2 + 6 * l
    b = l // 2 - (d - 4) // 12
    if k % 4 != 2 or b < 1:
        raise ConsistencyError(f"Derived weight {k} or basis size {b} out of range", check="params", d=d)

    table = load_cnumbers()
    if d in table:
        c = table[d]
    else:
        c = Fraction(a - 2)
    return MagicParams(d=d, a=a, l=l, k=k, b=b, eps=-1, c=c)


def parameters_table(dmax: int, include_excluded: bool = False) -> List[MagicParams]:
    """MagicParams for every admissible d ≤ dmax."""
    result = []
    for d in range(8, dmax + 1, 8):
        if d % 24 == 16 and not include_excluded:
            continue
        result.append(compute_params(d, dimension_cap=dmax, allow_excluded=include_excluded))
    return result


def default_basis_order(params: MagicParams, factor: int = 1) -> int:
    """Starting truncation 4b + l + k for the basis solves."""
    return factor * (4 * params.b + params.l + params.k)


# Basis monomials

def theta_columns(params: MagicParams) -> List[ThetaPolynomial]:
    """W^{l+j}·V^{k/2−l−j} for j = 1..k/2−l, i.e. the factor W^{l+1} times W^{j−1}V^{k/2−l−j}."""
    width = params.theta_width
    return [ThetaPolynomial({(0, width - j, params.l + j): 1}) for j in range(1, width + 1)]


def eisenstein_columns(params: MagicParams) -> List[EisensteinPolynomial]:
    """E2^i E4^j E6^n of weight k+2 for j = 0..(k+2)/4, with i = ((k+2)/2 − 2j) mod 3."""
    columns = []
    half = (params.k + 2) // 2
    for j in range((params.k + 2) // 4 + 1):
        i = (half - 2 * j) % 3
        n = (params.k + 2 - 2 * i - 4 * j) // 6
        columns.append(EisensteinPolynomial({(i, j, n): 1}))
    return columns


def _combine(vector: Sequence[Fraction], columns: Sequence):
    """Σ vector_j·column_j as a single polynomial."""
    terms: Dict[Tuple[int, int, int], Fraction] = {}
    for coefficient, column in zip(vector, columns):
        if not coefficient:
            continue
        for exponent, c in column.terms.items():
            terms[exponent] = terms.get(exponent, 0) + coefficient * c
    return type(columns[0])(terms)


def _normalize_rows(kernel: List[List[Fraction]], leading: List[List[Fraction]],
                    b: int, basis: str) -> Tuple[Tuple[Fraction, ...], ...]:
    """
    Row-reduce kernel vectors so row j expands as r^{2(j−1)} + O(r^{2b}).

    Args:
        kernel: Kernel vectors over the columns
        leading: For each column, its coefficients of r^0 .. r^{2b−1}
        b: Basis size
        basis: Label for errors

    Raises:
        ConsistencyError: If the leading coefficients cannot be brought to that shape
    """
    width = 2 * b
    ncols = len(leading)
    augmented = []
    for vec in kernel:
        lead = [sum(v * leading[c][n] for c, v in enumerate(vec) if v) for n in range(width)]
        augmented.append(lead + list(vec))
    reduced, pivots = rref(augmented, width + ncols)
    if pivots != list(range(0, width, 2)):
        raise ConsistencyError(f"{basis} basis cannot be normalized: leading pivots {pivots}",
                               check=f"{basis}_normalization")
    for j, row in enumerate(reduced):
        target = [Fraction(int(n == 2 * j)) for n in range(width)]
        if row[:width] != target:
            raise ConsistencyError(f"{basis} basis row {j + 1} has stray low-order terms",
                                   check=f"{basis}_normalization")
    return tuple(tuple(row[width:]) for row in reduced)


@dataclass(frozen=True)
class PhiBasis:
    """
    Normalized basis φ_1..φ_b, stored as coefficient rows against theta_columns.

    Attributes:
        params: Dimension parameters
        matrix: b rows of k/2 − l rationals
        order: Truncation order at which the rank stabilized
    """
    params: MagicParams
    matrix: Tuple[Tuple[Fraction, ...], ...]
    order: int

    def polynomials(self) -> List[ThetaPolynomial]:
        columns = theta_columns(self.params)
        return [_combine(row, columns) for row in self.matrix]


@dataclass(frozen=True)
class PsiBasis:
    """
    Normalized basis ψ_1..ψ_b, stored as coefficient rows against eisenstein_columns.

    Attributes:
        params: Dimension parameters
        matrix: b rows of (k+6)/4 rationals
        order: Truncation order used for the constraints
    """
    params: MagicParams
    matrix: Tuple[Tuple[Fraction, ...], ...]
    order: int

    def polynomials(self) -> List[EisensteinPolynomial]:
        columns = eisenstein_columns(self.params)
        return [_combine(row, columns) for row in self.matrix]


def phi_basis(params: MagicParams, order: Optional[int] = None,
              max_doublings: Optional[int] = None) -> PhiBasis:
    """
    Basis of the theta polynomials φ in W^{l+1}·span(Θ) with φ_T + φ_S = φ and
    [r^0..r^l]φ_S = 0.

    The constraints are read off the expansions to r^order; while the kernel is
    larger than b the truncation is doubled.

    Raises:
        RankMismatchError: If the kernel dimension never reaches b
    """
    config = get_global_config()
    if order is None:
        order = default_basis_order(params, config.get("magic.basis_order_factor", 1))
    if max_doublings is None:
        max_doublings = config.get("magic.max_doublings", 4)
    columns = theta_columns(params)
    found = None
    for attempt in range(max_doublings + 1):
        with stage("magic.phi_basis", order=order):
            expansions = [column.expand(order).coefficients(0) for column in columns]
            s_expansions = [phi_s(column, order).coefficients(0) for column in columns]
            rows = []
            for n in range(order + 1):
                rows.append([(-2 * e[n] if n % 2 else 0) + s[n]
                             for e, s in zip(expansions, s_expansions)])
            for n in range(params.l + 1):
                rows.append([s[n] for s in s_expansions])
            kernel = nullspace(rows, len(columns))
        found = len(kernel)
        logger.debug("phi kernel at order %d has dimension %d (want %d)", order, found, params.b)
        if found == params.b:
            leading = [e[:2 * params.b] for e in expansions]
            matrix = _normalize_rows(kernel, leading, params.b, "phi")
            return PhiBasis(params, matrix, order)
        if found < params.b:
            break
        logger.warning("phi basis rank %d != %d at order %d; doubling", found, params.b, order)
        order *= 2
    raise RankMismatchError("phi", params.b, found, order)


def psi_basis(params: MagicParams, order: Optional[int] = None,
              max_doublings: Optional[int] = None) -> PsiBasis:
    """
    Basis of the quasimodular ψ of weight k+2 with [q^0..q^{l/2}]ψ = 0 and
    [w r^j](w²ψ_S·Δ^{−l/2}) = 0 for j = −l..−a.

    Raises:
        RankMismatchError: If the constrained space does not have dimension b
    """
    config = get_global_config()
    if order is None:
        order = default_basis_order(params, config.get("magic.basis_order_factor", 1))
    if max_doublings is None:
        max_doublings = config.get("magic.max_doublings", 4)
    columns = eisenstein_columns(params)
    found = None
    for attempt in range(max_doublings + 1):
        with stage("magic.psi_basis", order=order):
            delta_inv = delta_inv_pow(params.l, order)
            plain = [column.expand(order) for column in columns]
            transformed = [psi_s_times_w2(column, order) for column in columns]
            products = [t * delta_inv for t in transformed]
            rows = [[e.coeff(0, n) for e in plain] for n in range(0, params.l + 1, 2)]
            rows += [[p.coeff(1, j) for p in products] for j in range(-params.l, -params.a + 1)]
            kernel = nullspace(rows, len(columns))
        found = len(kernel)
        logger.debug("psi kernel at order %d has dimension %d (want %d)", order, found, params.b)
        if found == params.b:
            leading = [t.coefficients(0)[:2 * params.b] for t in transformed]
            matrix = _normalize_rows(kernel, leading, params.b, "psi")
            return PsiBasis(params, matrix, order)
        if found < params.b:
            break
        logger.warning("psi basis dimension %d != %d at order %d; doubling", found, params.b, order)
        order *= 2
    raise RankMismatchError("psi", params.b, found, order)


def solve_c_vectors(phi: PhiBasis, psi: PsiBasis,
                    params: Optional[MagicParams] = None) -> Tuple[List[int], List[int]]:
    """
    Solve [w^0 r^j](−w²ψ_S + φ) = 0 for j = 0, 2, ..., l − a.

    Returns:
        (C_φ, C_ψ): coprime integer vectors over the theta and Eisenstein columns,
        the first nonzero entry of C_φ positive

    Raises:
        SolutionSpaceError: If the solution space is not one-dimensional
    """
    params = params or phi.params
    b = params.b
    order = params.l + 2
    phi_rows = [p.expand(order) for p in phi.polynomials()]
    psi_rows = [psi_s_times_w2(p, order) for p in psi.polynomials()]
    equations = []
    for j in range(0, params.l - params.a + 1, 2):
        equations.append([f.coeff(0, j) for f in phi_rows] + [-g.coeff(0, j) for g in psi_rows])
    kernel = nullspace(equations, 2 * b)
    if len(kernel) != 1:
        raise SolutionSpaceError(len(kernel))
    v_phi, v_psi = kernel[0][:b], kernel[0][b:]
    c_phi = [sum(v * row[c] for v, row in zip(v_phi, phi.matrix)) for c in range(params.theta_width)]
    c_psi = [sum(v * row[c] for v, row in zip(v_psi, psi.matrix)) for c in range(params.eisenstein_width)]
    combined = integer_vector(c_phi + c_psi)
    return combined[:params.theta_width], combined[params.theta_width:]


def phi_polynomial(params: MagicParams, c_phi: Sequence[int]) -> ThetaPolynomial:
    return _combine([Fraction(c) for c in c_phi], theta_columns(params))


def psi_polynomial(params: MagicParams, c_psi: Sequence[int]) -> EisensteinPolynomial:
    return _combine([Fraction(c) for c in c_psi], eisenstein_columns(params))


# Truncation order

def geometric_tail(M: int, p: int, x: Fraction) -> Optional[Fraction]:
    """
    Upper bound for Σ_{n>M} (n+1)^p x^n when 0 < x < 1.

    The term ratio is largest at n = M+1, so the sum is at most
    (M+2)^p x^{M+1} / (1 − x((M+3)/(M+2))^p). Returns None where that ratio is ≥ 1.
    """
    ratio = x * Fraction(M + 3, M + 2) ** p
    if ratio >= 1:
        return None
    return Fraction(M + 2) ** p * x ** (M + 1) / (1 - ratio)


def _eisenstein_majorant(params: MagicParams, c_psi: Sequence[int]) -> int:
    """|Q|(24, 240, 504) for Q = C_ψ·E."""
    total = 0
    for coefficient, column in zip(c_psi, eisenstein_columns(params)):
        (i, j, n), = column.terms
        total += abs(coefficient) * 24 ** i * 240 ** j * 504 ** n
    return total


@dataclass(frozen=True)
class TailMajorant:
    """Upper bounds of the two truncation-tail terms at a given N (None means unbounded)."""
    n_trunc: int
    theta_part: Optional[Fraction]
    eisenstein_part: Optional[Fraction]

    @property
    def value(self) -> Optional[Fraction]:
        if self.theta_part is None or self.eisenstein_part is None:
            return None
        return max(self.theta_part, self.eisenstein_part)

    def below_one(self) -> bool:
        return self.value is not None and self.value < 1


def tail_majorant(params: MagicParams, c_phi: Sequence[int], c_psi: Sequence[int],
                  n_trunc: int, strict: bool = True, digits: int = 11) -> TailMajorant:
    """
    Bound the theta-series and q-series tails beyond r^N against r^{l+10}.

    In strict mode the coefficient growth constants are |P|(8,8,8) = 8^{k/2}·Σ|C_φ| and
    13·|Q|(24,240,504); otherwise the constant terms abs(C_φ)·Θ|_{r=0} and
    13·abs(C_ψ)·E|_{q=0} are used. e^{−π} is replaced by the upper end of its decimal
    enclosure inside the tails and by the lower end in e^{π(l+10)}.
    """
    gamma = exp_neg_pi_bounds(digits)
    shift = gamma.lo ** -(params.l + 10)
    if strict:
        theta_const = 8 ** (params.k // 2) * sum(abs(c) for c in c_phi)
        eisenstein_const = 13 * _eisenstein_majorant(params, c_psi)
    else:
        theta_const = abs(c_phi[-1])
        eisenstein_const = 13 * sum(abs(c) for c in c_psi)

    r_tail = geometric_tail(n_trunc, (3 * params.k - 2) // 2, gamma.hi)
    s_tail = geometric_tail(n_trunc // 2, (5 * params.k + 10) // 4, gamma.hi ** 2)
    theta_part = None if r_tail is None else theta_const * shift * r_tail
    eisenstein_part = None if s_tail is None else eisenstein_const * shift * s_tail
    return TailMajorant(n_trunc, theta_part, eisenstein_part)


def choose_n(params: MagicParams, c_phi: Sequence[int], c_psi: Sequence[int],
             strict: Optional[bool] = None, n_step: Optional[int] = None,
             digits: Optional[int] = None) -> int:
    """
    Smallest N = l + n_step·n (n ≥ 1) whose tail majorant is below 1.

    Raises:
        ConsistencyError: If no candidate works before the search limit
    """
    config = get_global_config()
    if strict is None:
        strict = config.get("magic.strict_tails", True)
    if n_step is None:
        n_step = config.get("magic.n_step", 10)
    if digits is None:
        digits = config.get("magic.tail_digits", 11)
    limit = 50 * params.k + 2000
    for n in count(1):
        candidate = params.l + n_step * n
        if candidate > limit:
            break
        if tail_majorant(params, c_phi, c_psi, candidate, strict, digits).below_one():
            logger.info("d=%d: truncation order N=%d (%s tails)", params.d, candidate,
                        "strict" if strict else "literal")
            return candidate
    raise ConsistencyError(f"No truncation order below {limit} bounds the tails",
                           check="choose_n", d=params.d)


# Solved functions

@dataclass(frozen=True)
class MagicFunction:
    """
    The solved pair φ = C_φ·Θ, ψ = C_ψ·E with its truncation order.

    Expansions are computed on first use to r^N and shared by the condition checks
    and the evaluators.
    """
    params: MagicParams
    c_phi: Tuple[int, ...]
    c_psi: Tuple[int, ...]
    n_trunc: int
    strict_tails: bool = True

    @cached_property
    def phi_poly(self) -> ThetaPolynomial:
        return phi_polynomial(self.params, self.c_phi)

    @cached_property
    def psi_poly(self) -> EisensteinPolynomial:
        return psi_polynomial(self.params, self.c_psi)

    @cached_property
    def phi(self) -> RSeries:
        return self.phi_poly.expand(self.n_trunc)

    @cached_property
    def phi_s(self) -> RSeries:
        return phi_s(self.phi_poly, self.n_trunc)

    @cached_property
    def psi(self) -> RSeries:
        return self.psi_poly.expand(self.n_trunc)

    @cached_property
    def w2_psi_s(self) -> RSeries:
        return psi_s_times_w2(self.psi_poly, self.n_trunc)

    @cached_property
    def delta_inv(self) -> RSeries:
        """Δ^{−l/2} from r^{−l} to r^{N−l−2}."""
        return delta_inv_pow(self.params.l, self.n_trunc - self.params.l - 2)

    def expansions(self, order: int) -> Dict[str, RSeries]:
        """φ, φ_S, ψ and w²ψ_S to an arbitrary order."""
        return {
            "phi": self.phi_poly.expand(order),
            "phi_s": phi_s(self.phi_poly, order),
            "psi": self.psi_poly.expand(order),
            "w2_psi_s": psi_s_times_w2(self.psi_poly, order),
        }


def step3_residuals(fn: MagicFunction, order: Optional[int] = None) -> List[Fraction]:
    """
    [w^0 r^j](−w²ψ_S + φ) for j = 0, 2, ..., l − a, recomputed at the given order.

    Every entry is zero for a correctly solved pair.
    """
    p = fn.params
    order = max(order or p.l, p.l - p.a)
    series = fn.expansions(order)
    v = series["phi"] - series["w2_psi_s"]
    return [v.coeff(0, j) for j in range(0, p.l - p.a + 1, 2)]


def solve_magic_function(params: MagicParams, strict: Optional[bool] = None,
                         n_step: Optional[int] = None) -> MagicFunction:
    """Run the basis solves, the C-vector solve and the truncation search."""
    config = get_global_config()
    if strict is None:
        strict = config.get("magic.strict_tails", True)
    if n_step is None:
        n_step = config.get("magic.n_step", 10)
    with stage("magic.bases", d=params.d):
        phi = phi_basis(params)
        psi = psi_basis(params)
    with stage("magic.c_vectors", d=params.d):
        c_phi, c_psi = solve_c_vectors(phi, psi, params)
    with stage("magic.choose_n", d=params.d):
        n_trunc = choose_n(params, c_phi, c_psi, strict=strict, n_step=n_step)
    return MagicFunction(params, tuple(c_phi), tuple(c_psi), n_trunc, strict)


def magic_function(d: int, strict: Optional[bool] = None, n_step: Optional[int] = None,
                   use_cache: Optional[bool] = None) -> MagicFunction:
    """
    Solved magic function for dimension d, read from the msgpack cache when present.

    Raises:
        DimensionError: See compute_params
    """
    from .persistence import load_cached_solution, store_cached_solution

    config = get_global_config()
    params = compute_params(d)
    if strict is None:
        strict = config.get("magic.strict_tails", True)
    if n_step is None:
        n_step = config.get("magic.n_step", 10)
    if use_cache is None:
        use_cache = config.get("cache.enabled", True)
    directory = config.get("cache.directory")

    key = (d, bool(strict), n_step)
    with _functions_lock:
        if key in _functions:
            return _functions[key]

    if use_cache and directory:
        cached = load_cached_solution(directory, d, strict, n_step)
        if cached is not None:
            c_phi, c_psi, n_trunc = cached
            logger.debug("d=%d: using cached solution (N=%d)", d, n_trunc)
            fn = MagicFunction(params, tuple(c_phi), tuple(c_psi), n_trunc, strict)
            with _functions_lock:
                return _functions.setdefault(key, fn)

    fn = solve_magic_function(params, strict, n_step)
    if use_cache and directory:
        store_cached_solution(directory, d, strict, n_step, fn.c_phi, fn.c_psi, fn.n_trunc)
    with _functions_lock:
        return _functions.setdefault(key, fn)


def clear_magic_functions() -> None:
    """Forget the solved functions held by this process."""
    with _functions_lock:
        _functions.clear()


# Certificates

@dataclass
class MagicCertificate:
    """
    Evidence that the magic function for one dimension satisfies every condition.

    Attributes:
        params: Dimension parameters
        c_phi, c_psi: Integer vectors of the solved pair
        n_trunc: Truncation order N
        ladder: Precision rung at which the conditions were last evaluated
        checks: Condition name ("I".."VII", "sign48") → outcome
        diagnostics: Float-mode sanity checks that do not affect validity
        strict_tails: Whether N came from the strict tail majorants
        timings: Stage durations in seconds
    """
    params: MagicParams
    c_phi: Tuple[int, ...]
    c_psi: Tuple[int, ...]
    n_trunc: int
    ladder: PrecisionLadder
    checks: Dict[str, bool] = field(default_factory=dict)
    strict_tails: bool = True
    timings: Dict[str, float] = field(default_factory=dict)
    version: int = CERTIFICATE_VERSION
    diagnostics: Dict[str, bool] = field(default_factory=dict)

    @property
    def valid(self) -> bool:
        return bool(self.checks) and all(self.checks.values())

    @property
    def failed(self) -> List[str]:
        return [name for name, ok in self.checks.items() if not ok]

    def raise_for_status(self) -> None:
        """
        Raises:
            ConditionFailedError: If an exact condition or the sign check failed
            LadderExhaustedError: If only precision-dependent conditions failed
        """
        failed = self.failed
        if not failed:
            return
        hard = [name for name in failed if name not in PRECISION_CONDITIONS]
        if hard:
            raise ConditionFailedError(hard[0], dimension=self.params.d)
        raise LadderExhaustedError(self.params.d, failed)

    def to_dict(self, include_timing: bool = False) -> Dict[str, Any]:
        data = self.params.to_dict()
        data.update({
            "C_phi": list(self.c_phi),
            "C_psi": list(self.c_psi),
            "N": self.n_trunc,
            "ladder": {
                "pi_digits": self.ladder.pi_digits,
                "gamma_digits": self.ladder.gamma_digits,
                "split_exponent": self.ladder.split_exponent,
            },
            "checks": dict(sorted(self.checks.items())),
            "strict_tails": self.strict_tails,
            "valid": self.valid,
            "version": self.version,
        })
        if self.diagnostics:
            data["diagnostics"] = dict(sorted(self.diagnostics.items()))
        if include_timing:
            data["runtime_secs"] = round(sum(self.timings.values()), 3)
            data["timings"] = dict(sorted(self.timings.items()))
        return data


def verify_magic(d: int, ladder: Optional[PrecisionLadder] = None,
                 strict: Optional[bool] = None, use_cache: Optional[bool] = None) -> MagicCertificate:
    """
    Build the magic function for d and check conditions (I)–(VII), escalating the
    precision ladder while a precision-dependent condition fails.

    For d = 48 the sign structure of H on (0, 10) is certified as well, with a float scan
    of the same pattern kept as a diagnostic.

    Returns:
        MagicCertificate; inspect ``valid`` or call ``raise_for_status``

    Raises:
        DimensionExcludedError: If d ≡ 16 mod 24
        ConsistencyError: If the d = 48 sign bound has the wrong pole structure
    """
    from .conditions import check_exact_conditions, check_precision_conditions, check_sign_48

    config = get_global_config()
    params = compute_params(d)
    timings: Dict[str, float] = {}
    with stage("magic.solve", timings, d=d):
        fn = magic_function(d, strict=strict, use_cache=use_cache)

    if ladder is None:
        ladder = PrecisionLadder.from_config(config)
    checks: Dict[str, bool] = {}
    with stage("conditions.exact", timings, d=d):
        checks.update(check_exact_conditions(fn))

    current = ladder
    while True:
        with stage(f"conditions.rung{current.position}", timings, d=d):
            results = check_precision_conditions(fn, current)
        if all(results.values()) or current.is_top():
            break
        failed = [name for name, ok in results.items() if not ok]
        logger.warning("d=%d: %s failed at precision %s; escalating", d, ",".join(failed),
                       current.as_tuple())
        current = current.escalate()
    checks.update(results)

    diagnostics: Dict[str, bool] = {}
    if d == 48:
        from .evaluation import check_sign_48_float

        with stage("conditions.sign48", timings, d=d):
            rung = current
            while True:
                certified = check_sign_48(fn, rung)
                if certified or rung.is_top():
                    break
                rung = rung.escalate()
            checks["sign48"] = certified
        with stage("evaluation.sign48_float", timings, d=d):
            diagnostics["sign48_float"] = check_sign_48_float(fn)
        if not diagnostics["sign48_float"]:
            logger.warning("d=%d: float scan disagrees with the expected sign pattern", d)

    certificate = MagicCertificate(params, fn.c_phi, fn.c_psi, fn.n_trunc, current, checks,
                                   fn.strict_tails, timings, diagnostics=diagnostics)
    if certificate.valid:
        logger.info("d=%d: certificate valid (N=%d, rung %s)", d, fn.n_trunc, current.as_tuple())
    else:
        logger.warning("d=%d: certificate invalid, failed %s", d, certificate.failed)
    return certificate


def _verify_worker(d: int) -> MagicCertificate:
    return verify_magic(d)


def verify_many(dims: Sequence[int], workers: int = 1) -> List[MagicCertificate]:
    """Certificates for several dimensions, over a bounded process pool when workers > 1."""
    dims = list(dims)
    for d in dims:
        compute_params(d)
    if workers <= 1 or len(dims) <= 1:
        return [verify_magic(d) for d in dims]
    with ProcessPoolExecutor(max_workers=min(workers, len(dims))) as pool:
        return list(pool.map(_verify_worker, dims))
