"""
Generator forms as exact r-series

E2, E4, E6, Δ and the theta fourth powers U = Θ00⁴, V = Θ10⁴, W = Θ01⁴, expanded in
r = e^{πiz} (so q = r²), together with the two S-transforms the magic-function
pipeline needs: theta polynomials P(U, V, W) and w²·ψ_S for quasimodular
polynomials ψ in E2, E4, E6.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Tuple

from ..exceptions import ConsistencyError, ValidationError
from ..types import EisensteinExponent, ThetaExponent
from ..utils.cache import memoized
from .series import RSeries

logger = logging.getLogger(__name__)


class Generator(str, Enum):
    """Generator forms and their weights."""
    E2 = "E2"
    E4 = "E4"
    E6 = "E6"
    DELTA = "Delta"
    U = "U"
    V = "V"
    W = "W"

    @property
    def weight(self) -> int:
        return {"E2": 2, "E4": 4, "E6": 6, "Delta": 12, "U": 2, "V": 2, "W": 2}[self.value]


EISENSTEIN_CONSTANTS = {"E2": (-24, 1), "E4": (240, 3), "E6": (-504, 5)}


@memoized("modforms.sigma", size=65536)
def sigma(k: int, n: int) -> int:
    """Sum of k-th powers of the divisors of n (0 for n ≤ 0)."""
    if n <= 0:
        return 0
    total = 0
    for i in range(1, math.isqrt(n) + 1):
        if n % i == 0:
            total += i ** k
            j = n // i
            if j != i:
                total += j ** k
    return total


def _q_to_r(q_coeffs: Iterable[int], order: int) -> RSeries:
    """Spread q-series coefficients onto even r-exponents."""
    coeffs = [0] * (order + 1)
    for n, c in enumerate(q_coeffs):
        if 2 * n > order:
            break
        coeffs[2 * n] = c
    return RSeries.from_coeffs(coeffs, start=0, order=order)


@memoized("modforms.eisenstein", size=512)
def eisenstein(kind: str, order: int) -> RSeries:
    """
    Eisenstein series E2, E4 or E6 as an r-series to r^order.

    [q^n]E_k = constant·σ_{k−1}(n) for n ≥ 1 and 1 at n = 0.
    """
    kind = Generator(kind).value
    if kind not in EISENSTEIN_CONSTANTS:
        raise ValidationError(f"Not an Eisenstein series: {kind}", field="kind", value=kind)
    if order < 0:
        raise ValidationError("order must be >= 0", field="order", value=order)
    constant, power = EISENSTEIN_CONSTANTS[kind]
    q_coeffs = [1] + [constant * sigma(power, n) for n in range(1, order // 2 + 1)]
    return _q_to_r(q_coeffs, order)


@memoized("modforms.theta", size=512)
def theta_fourth(kind: str, order: int) -> RSeries:
    """
    Fourth powers of the Jacobi thetas as r-series to r^order.

    U = (Σ_n r^{n²})⁴, V = 16r(Σ_{n≥0} r^{n(n+1)})⁴, W(r) = U(−r).
    All three are stored from r^0 so products keep the full order.
    """
    kind = Generator(kind).value
    if order < 0:
        raise ValidationError("order must be >= 0", field="order", value=order)
    if kind == "U":
        theta = [0] * (order + 1)
        bound = math.isqrt(order) + 1
        for n in range(-bound, bound + 1):
            if n * n <= order:
                theta[n * n] += 1
        base = RSeries.from_coeffs(theta, start=0, order=order)
        return base ** 4
    if kind == "W":
        return theta_fourth("U", order).substitute_neg()
    if kind == "V":
        half = [0] * (order + 1)
        n = 0
        while n * (n + 1) <= order:
            half[n * (n + 1)] = 1
            n += 1
        fourth = RSeries.from_coeffs(half, start=0, order=order) ** 4
        return fourth.shift(1).scale(16).truncate(order).with_start(0)
    raise ValidationError(f"Not a theta fourth power: {kind}", field="kind", value=kind)


def _pentagonal(q_order: int) -> list:
    """Coefficients of ∏(1 − q^n) up to q^q_order (Euler's pentagonal theorem)."""
    coeffs = [0] * (q_order + 1)
    coeffs[0] = 1
    m = 1
    while True:
        p1 = m * (3 * m - 1) // 2
        p2 = m * (3 * m + 1) // 2
        if p1 > q_order:
            break
        sign = -1 if m % 2 else 1
        coeffs[p1] = sign
        if p2 <= q_order:
            coeffs[p2] = sign
        m += 1
    return coeffs


@memoized("modforms.delta", size=256)
def delta(order: int) -> RSeries:
    """
    Discriminant Δ = q∏(1 − q^n)^24 as an r-series to r^order.

    The product expansion is checked against (E4³ − E6²)/1728 to the same order.

    Raises:
        ConsistencyError: If the two expansions disagree
    """
    if order < 2:
        raise ValidationError("delta needs order >= 2", field="order", value=order)
    q_order = order // 2
    product = RSeries.from_coeffs(_pentagonal(q_order), start=0, order=q_order) ** 24
    via_product = _q_to_r([0] + product.coefficients(0)[:q_order], order)

    e4 = eisenstein("E4", order)
    e6 = eisenstein("E6", order)
    via_eisenstein = (e4 * e4 * e4 - e6 * e6).scale(Fraction(1, 1728))
    if via_product != via_eisenstein:
        raise ConsistencyError("E4^3 - E6^2 != 1728*Delta", check="delta", order=order)
    return via_product


@memoized("modforms.delta_inv", size=256)
def delta_inv_pow(l: int, order: int) -> RSeries:
    """
    Δ^{−l/2} as an r-series from r^{−l} to r^order.

    Raises:
        ConsistencyError: If a coefficient is negative
    """
    if l < 2 or l % 2:
        raise ValidationError("l must be an even integer >= 2", field="l", value=l)
    base = delta(order + l + 2)
    result = base.inv_pow(l // 2, order)
    for n, c in zip(range(result.start, result.order + 1), result.coefficients(0)):
        if c < 0:
            raise ConsistencyError(f"Negative coefficient of Delta^(-{l}/2) at r^{n}",
                                   check="delta_inv_pow", l=l, n=n, value=c)
    return result


def generator_series(generator: str, order: int) -> RSeries:
    """Expansion of any generator form to r^order."""
    kind = Generator(generator)
    if kind in (Generator.E2, Generator.E4, Generator.E6):
        return eisenstein(kind.value, order)
    if kind == Generator.DELTA:
        return delta(order)
    return theta_fourth(kind.value, order)


@memoized("modforms.powers", size=4096)
def generator_power(generator: str, exponent: int, order: int) -> RSeries:
    """generator^exponent to r^order, built incrementally from cached lower powers."""
    if exponent == 0:
        return RSeries.one(order)
    if exponent == 1:
        return generator_series(generator, order)
    half = exponent // 2
    square = generator_power(generator, half, order) * generator_power(generator, half, order)
    if exponent % 2:
        square = square * generator_series(generator, order)
    return square


@dataclass(frozen=True)
class ThetaPolynomial:
    """
    Homogeneous polynomial Σ c·U^i V^j W^k.

    Attributes:
        terms: Mapping (i, j, k) → coefficient
    """
    terms: Mapping[ThetaExponent, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        cleaned = {tuple(e): c for e, c in self.terms.items() if c}
        degrees = {sum(e) for e in cleaned}
        if len(degrees) > 1:
            raise ValidationError("Theta polynomial is not homogeneous", field="terms",
                                  value=sorted(degrees))
        object.__setattr__(self, "terms", cleaned)

    @property
    def degree(self) -> int:
        return next(iter(sum(e) for e in self.terms), 0)

    @property
    def weight(self) -> int:
        return 2 * self.degree

    def s_transform(self) -> "ThetaPolynomial":
        """Substitute (U, V, W) → (−U, −W, −V)."""
        sign = -1 if self.degree % 2 else 1
        return ThetaPolynomial({(i, k, j): sign * c for (i, j, k), c in self.terms.items()})

    def expand(self, order: int) -> RSeries:
        total = RSeries.zero(order)
        for (i, j, k), c in sorted(self.terms.items()):
            monomial = (generator_power("U", i, order)
                        * generator_power("V", j, order)
                        * generator_power("W", k, order))
            total = total + monomial.scale(c)
        return total


def phi_s(P: ThetaPolynomial, order: int) -> RSeries:
    """Expansion of φ_S for φ = P(U, V, W), via the S-substitution on P."""
    return P.s_transform().expand(order)


@dataclass(frozen=True)
class EisensteinPolynomial:
    """
    Σ c·E2^i E4^j E6^n with i ≤ 2.

    Attributes:
        terms: Mapping (i, j, n) → coefficient
    """
    terms: Mapping[EisensteinExponent, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        cleaned = {tuple(e): c for e, c in self.terms.items() if c}
        for (i, j, n) in cleaned:
            if i > 2 or min(i, j, n) < 0:
                raise ValidationError("E2 exponent above 2 or negative exponent",
                                      field="terms", value=(i, j, n))
        weights = {2 * i + 4 * j + 6 * n for (i, j, n) in cleaned}
        if len(weights) > 1:
            raise ValidationError("Eisenstein polynomial mixes weights", field="terms",
                                  value=sorted(weights))
        object.__setattr__(self, "terms", cleaned)

    @property
    def weight(self) -> int:
        return next(iter(2 * i + 4 * j + 6 * n for (i, j, n) in self.terms), 0)

    def split_e2(self) -> Tuple["EisensteinPolynomial", "EisensteinPolynomial", "EisensteinPolynomial"]:
        """(Q0, Q1, Q2) with Q = Q0 + E2·Q1 + E2²·Q2 and no E2 inside any Q_i."""
        buckets: Dict[int, Dict[EisensteinExponent, Fraction]] = {0: {}, 1: {}, 2: {}}
        for (i, j, n), c in self.terms.items():
            buckets[i][(0, j, n)] = c
        return tuple(EisensteinPolynomial(buckets[i]) for i in range(3))

    def expand(self, order: int) -> RSeries:
        total = RSeries.zero(order)
        for (i, j, n), c in sorted(self.terms.items()):
            monomial = (generator_power("E2", i, order)
                        * generator_power("E4", j, order)
                        * generator_power("E6", n, order))
            total = total + monomial.scale(c)
        return total


def psi_s_times_w2(Q: EisensteinPolynomial, order: int) -> RSeries:
    """
    w²·ψ_S for ψ = Q, using (E2)_S = E2 − 6/w:

        w²ψ_S = Q·w² + (−12·Q2·E2 − 6·Q1)·w + 36·Q2
    """
    _, q1, q2 = Q.split_e2()
    e2 = eisenstein("E2", order)
    q1_series = q1.expand(order)
    q2_series = q2.expand(order)
    linear = (q2_series * e2).scale(-12) + q1_series.scale(-6)
    return Q.expand(order).times_w(2) + linear.times_w(1) + q2_series.scale(36)
