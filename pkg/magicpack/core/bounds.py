"""
Density bounds for MagicPack

Exact densities (sympy), the linear-programming ratio test and Poisson-summation
residuals for a certified magic function, lattice shell data generated from theta
series, and the cluster and kissing bounds obtained by scaling a distance set.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple, Union

import mpmath
import sympy

from ..config import get_global_config
from ..exceptions import ValidationError
from ..types import Shell
from .evaluation import FloatEvaluator, Side, _mpf
from .magic import MagicCertificate, MagicFunction, compute_params, magic_function, verify_magic
from .modforms import delta, eisenstein

logger = logging.getLogger(__name__)

DEFAULT_DIGITS = 30
POISSON_SHELL_MARGIN = 60
LATTICES = {"E8": 8, "LEECH": 24}


@dataclass(frozen=True)
class DensityValue:
    """
    A density kept as an exact sympy expression with its decimal rendering.

    Attributes:
        exact: Closed form, a rational multiple of a power of π (and possibly a square root)
        digits: Significant digits of the decimal rendering
    """
    exact: sympy.Expr
    digits: int = DEFAULT_DIGITS

    @property
    def decimal(self) -> str:
        return str(sympy.N(self.exact, self.digits))

    def to_mpf(self) -> "mpmath.mpf":
        with mpmath.workdps(self.digits + 10):
            return mpmath.mpf(str(sympy.N(self.exact, self.digits + 10)))

    def __float__(self) -> float:
        return float(sympy.N(self.exact, 17))

    def equals(self, other: Union["DensityValue", sympy.Expr]) -> bool:
        """Symbolic equality of the exact parts."""
        target = other.exact if isinstance(other, DensityValue) else sympy.sympify(other)
        return sympy.simplify(self.exact - target) == 0

    def __str__(self) -> str:
        return f"{self.exact} ≈ {self.decimal}"


def _sympify(x) -> sympy.Expr:
    if isinstance(x, DensityValue):
        return x.exact
    if isinstance(x, Fraction):
        return sympy.Rational(x.numerator, x.denominator)
    return sympy.sympify(x)


def _as_density(x) -> DensityValue:
    return x if isinstance(x, DensityValue) else DensityValue(_sympify(x))


def ball_volume(d: int) -> sympy.Expr:
    """Exact volume π^{d/2}/Γ(d/2+1) of the unit ball in ℝ^d."""
    if d < 1:
        raise ValidationError("Dimension must be positive", field="d", value=d)
    half = sympy.Rational(d, 2)
    return sympy.pi ** half / sympy.gamma(half + 1)


def extremal_density(d: int, digits: int = DEFAULT_DIGITS) -> DensityValue:
    """
    vol(B_d)·(√a/2)^d, the density of a packing whose centres are a apart in squared norm.

    Examples:
        d = 8 gives π⁴/384 and d = 48 gives (3π/2)²⁴/24!.
    """
    params = compute_params(d, allow_excluded=True)
    radius = sympy.sqrt(params.a) / 2
    return DensityValue(sympy.simplify(ball_volume(d) * radius ** d), digits)


def lp_ratio(fn: MagicFunction, f0_factor=1, digits: Optional[int] = None) -> "mpmath.mpf":
    """
    vol(½B_d)·F(0)/F̂(0) for F(x) = H(√a·x), with F(0) scaled by f0_factor.

    F̂(0) = a^{−d/2}·Ĥ(0), so the ratio is extremal_density(d)·H(0)/Ĥ(0).
    """
    digits = digits or get_global_config().get("evaluation.float_digits", 60)
    d, a = fn.params.d, fn.params.a
    h0 = FloatEvaluator(fn, Side.H, digits)(0)
    hhat0 = FloatEvaluator(fn, Side.H_HAT, digits)(0)
    with mpmath.workdps(digits):
        volume = mpmath.mpf(str(sympy.N(ball_volume(d) / 2 ** d, digits + 10)))
        f0 = h0 * _mpf(Fraction(f0_factor))
        fhat0 = hhat0 / mpmath.mpf(a) ** (mpmath.mpf(d) / 2)
        return volume * f0 / fhat0


def lp_ratio_check(d: int, certificate: Optional[MagicCertificate] = None, f0_factor=1,
                   tolerance: float = 1e-6) -> bool:
    """
    Check that the magic function attains the extremal density as an LP bound.

    Requires c_d = 0 and a valid certificate; a certificate is computed when none is given.

    Args:
        d: Dimension
        certificate: Result of verify_magic(d)
        f0_factor: Multiplier on F(0), for sensitivity checks
        tolerance: Relative tolerance of the ratio test

    Returns:
        True if vol(½B_d)·F(0)/F̂(0) matches extremal_density(d)
    """
    params = compute_params(d)
    if params.c is None or params.c != 0:
        logger.info("d=%d: c_d = %s, no LP equality expected", d, params.c)
        return False
    if certificate is None:
        certificate = verify_magic(d)
    if certificate.params.d != d or not certificate.valid:
        logger.warning("d=%d: no valid certificate, LP ratio not checked", d)
        return False
    fn = magic_function(d, strict=certificate.strict_tails)
    ratio = lp_ratio(fn, f0_factor)
    target = extremal_density(d).to_mpf()
    relative = abs(ratio / target - 1)
    logger.debug("d=%d: LP ratio %s, extremal %s, relative error %s", d,
                 mpmath.nstr(ratio, 15), mpmath.nstr(target, 15), mpmath.nstr(relative, 5))
    return bool(relative < tolerance)


# Lattice data

@dataclass(frozen=True)
class LatticeShellData:
    """
    Theta-series shells of a lattice.

    Attributes:
        d: Dimension
        shells: (squared norm, count) pairs with even, strictly increasing norms; the
            zero vector is implicit
        covolume: Volume of a fundamental domain
    """
    d: int
    shells: Tuple[Shell, ...]
    covolume: Fraction = Fraction(1)

    def __post_init__(self):
        previous = 0
        for norm, count in self.shells:
            if norm % 2:
                raise ValidationError(f"Shell norm {norm} is odd", field="shells", value=norm)
            if norm <= previous:
                raise ValidationError("Shell norms must be positive and strictly increasing",
                                      field="shells", value=norm)
            if count < 0:
                raise ValidationError(f"Negative count at norm {norm}", field="shells", value=count)
            previous = norm
        if self.covolume <= 0:
            raise ValidationError("Covolume must be positive", field="covolume", value=str(self.covolume))

    @property
    def min_norm(self) -> Optional[int]:
        return next((norm for norm, count in self.shells if count), None)

    def truncated(self, max_norm: int) -> "LatticeShellData":
        return LatticeShellData(self.d, tuple(s for s in self.shells if s[0] <= max_norm), self.covolume)

    def count(self, norm: int) -> int:
        return dict(self.shells).get(norm, 0)


def lattice_shells(name: str, max_norm: int) -> LatticeShellData:
    """
    Shell counts up to max_norm for "E8" (Θ = E4) or "Leech" (Θ = E4³ − 720Δ).

    Raises:
        ValidationError: For an unknown lattice name or a negative max_norm
    """
    key = name.upper()
    if key not in LATTICES:
        raise ValidationError(f"Unknown lattice {name!r}; choose E8 or Leech", field="name", value=name)
    if max_norm < 0:
        raise ValidationError("max_norm must be >= 0", field="max_norm", value=max_norm)
    order = max(max_norm, 2)
    e4 = eisenstein("E4", order)
    theta = e4 if key == "E8" else e4 * e4 * e4 - delta(order).scale(720)
    shells = tuple(
        (n, int(theta.coeff(0, n))) for n in range(2, max_norm + 1, 2) if theta.coeff(0, n)
    )
    return LatticeShellData(LATTICES[key], shells, Fraction(1))


@dataclass(frozen=True)
class PoissonResidual:
    """Both sides of Σ_x H(x) = covol⁻¹·Σ_y Ĥ(y) over truncated shells."""
    lattice_sum: "mpmath.mpf"
    dual_sum: "mpmath.mpf"
    h0: "mpmath.mpf"

    @property
    def residual(self) -> "mpmath.mpf":
        return abs(self.lattice_sum - self.dual_sum)

    @property
    def relative(self) -> "mpmath.mpf":
        return self.residual / abs(self.h0)

    def render(self, digits: int = 10) -> str:
        return mpmath.nstr(self.residual, digits)


def poisson_residual(shells: LatticeShellData, dual_shells: LatticeShellData,
                     fn_or_d: Union[int, MagicFunction], max_norm: Optional[int] = None,
                     digits: Optional[int] = None) -> PoissonResidual:
    """
    Compare Σ count_n·H(√n) with covol⁻¹·Σ dualcount_m·Ĥ(√m) in float mode.

    Args:
        shells: Lattice shells
        dual_shells: Dual lattice shells (the same data for unimodular lattices)
        fn_or_d: Magic function or its dimension
        max_norm: Shell truncation, a + 60 by default
        digits: mpmath working precision

    Raises:
        ValidationError: If the shell data belongs to another dimension or has vectors
            shorter than the minimal norm a
    """
    params = fn_or_d.params if isinstance(fn_or_d, MagicFunction) else compute_params(fn_or_d)
    for data, label in ((shells, "shells"), (dual_shells, "dual_shells")):
        if data.d != params.d:
            raise ValidationError(f"{label} are for d={data.d}, not {params.d}", field=label, value=data.d)
        if data.min_norm is not None and data.min_norm < params.a:
            raise ValidationError(f"{label} have norm {data.min_norm} below a={params.a}",
                                  field=label, value=data.min_norm)
    fn = fn_or_d if isinstance(fn_or_d, MagicFunction) else magic_function(params.d)
    if max_norm is None:
        max_norm = params.a + POISSON_SHELL_MARGIN
    h = FloatEvaluator(fn, Side.H, digits)
    hhat = FloatEvaluator(fn, Side.H_HAT, digits)
    with mpmath.workdps(h.digits):
        h0 = h(0)
        lattice_sum = h0 + mpmath.fsum(count * h(norm) for norm, count in shells.truncated(max_norm).shells)
        dual_sum = hhat(0) + mpmath.fsum(
            count * hhat(norm) for norm, count in dual_shells.truncated(max_norm).shells
        )
        dual_sum /= _mpf(shells.covolume)
    result = PoissonResidual(lattice_sum, dual_sum, h0)
    logger.info("d=%d: Poisson residual %s (relative %s)", params.d, result.render(),
                mpmath.nstr(result.relative, 5))
    return result


# Scaled distance sets

def cluster_bounds(n_cluster: int, delta_d, beta, lam, d: int) -> Tuple[DensityValue, DensityValue]:
    """
    Two-sided bound n·Δ_d/(β+λ)^d ≤ Δ_d(K_λ) ≤ n·Δ_d/λ^d.

    Raises:
        ValidationError: Unless λ > β ≥ 1 and n_cluster ≥ 1
    """
    beta, lam = Fraction(beta), Fraction(lam)
    if n_cluster < 1:
        raise ValidationError("n_cluster must be >= 1", field="n_cluster", value=n_cluster)
    if not 1 <= beta < lam:
        raise ValidationError("Need lambda > beta >= 1", field="lambda", value=str(lam))
    density = _as_density(delta_d)
    base = n_cluster * density.exact
    lower = base / _sympify(beta + lam) ** d
    upper = base / _sympify(lam) ** d
    return DensityValue(lower, density.digits), DensityValue(upper, density.digits)


def kissing_bound(d: int, lam, ratio, delta_d) -> DensityValue:
    """
    (2+λ)^d/Δ_d · F(0)/F̂(0) · vol(½B_d), an upper bound on 1 + kissing number.

    Raises:
        ValidationError: If λ < 4
    """
    lam = Fraction(lam)
    if lam < 4:
        raise ValidationError("lambda must be >= 4", field="lambda", value=str(lam))
    density = _as_density(delta_d)
    half_ball = ball_volume(d) / 2 ** d
    value = _sympify(2 + lam) ** d / density.exact * _sympify(Fraction(ratio)) * half_ball
    return DensityValue(sympy.simplify(value), density.digits)


def hexagonal_density() -> DensityValue:
    """π/√12, the planar packing density."""
    return DensityValue(sympy.pi / sympy.sqrt(12))
