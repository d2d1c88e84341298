"""
Positivity conditions for a solved magic function

Every check here works in exact rational arithmetic: truncated expansions are bracketed
by ∓r^{l+10}, π and e^{−π} are replaced by decimal enclosures, and the resulting
polynomials are decided by poly_positive_on.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Optional, Tuple

from ..config import get_global_config
from ..exceptions import ConsistencyError
from ..utils.cache import memoized
from .exactnum import PrecisionLadder, RatPoly, RationalInterval, poly_positive_on
from .magic import MagicFunction, MagicParams
from .series import RSeries

logger = logging.getLogger(__name__)

S = RatPoly.x()


def _depth() -> int:
    return get_global_config().get("precision.descartes_depth", 8)


# Truncation brackets

def bracket(series: RSeries, params: MagicParams, n_trunc: int) -> Tuple[RSeries, RSeries]:
    """(ũ↓, ũ↑): the stored terms to r^N minus and plus r^{l+10}."""
    base = series.truncate(n_trunc)
    correction = RSeries.monomial(params.l + 10, n_trunc)
    return base - correction, base + correction


def component_poly(series: RSeries, w_power: int, shift: int = 0) -> RatPoly:
    """The w^w_power component as a polynomial in x, read from r^shift upward."""
    coeffs = series.coefficients(w_power)
    offset = shift - series.start
    if offset < 0:
        return RatPoly([0] * (-offset) + coeffs)
    return RatPoly(coeffs[offset:])


def split_signs(p: RatPoly) -> Tuple[RatPoly, RatPoly]:
    """(p⁺, p⁻) with p = p⁺ − p⁻ and both nonnegative for x > 0."""
    positive = [c if c > 0 else 0 for c in p.coeffs]
    negative = [-c if c < 0 else 0 for c in p.coeffs]
    return RatPoly(positive), RatPoly(negative)


@memoized("conditions.log_brackets", size=64)
def log_brackets(n_terms: int) -> Tuple[RatPoly, RatPoly]:
    """
    (w₁, x·w₂) for w = −log x on (0, 1).

    w₁(x) = Σ_{n=1}^{N} (1−x)^n/n < w < w₁(x) + (1−x)^{N+1}/((N+1)x) = w₂(x).
    """
    one_minus = RatPoly((1, -1))
    power = RatPoly.constant(1)
    w1 = RatPoly()
    for n in range(1, n_terms + 1):
        power = power * one_minus
        w1 = w1 + power * Fraction(1, n)
    x_w2 = S * w1 + (power * one_minus) * Fraction(1, n_terms + 1)
    return w1, x_w2


def quadratic_in_w_positive(p0: RatPoly, p1: RatPoly, p2: RatPoly, n_terms: int,
                            x_hi: Fraction, depth: Optional[int] = None) -> bool:
    """
    Decide p0(x) + w·p1(x) + w²·p2(x) > 0 for all 0 < x < x_hi and every w in (w₁(x), w₂(x)).

    The w² part is bounded below by w₁²·p2⁺ − w₂²·p2⁻; the remainder is linear in w and
    is tested at both ends. Each side is multiplied by x² so that x·w₂ stays polynomial.
    """
    depth = _depth() if depth is None else depth
    w1, x_w2 = log_brackets(n_terms)
    x_w1 = S * w1
    plus, minus = split_signs(p2)
    quadratic = x_w1 * x_w1 * plus - x_w2 * x_w2 * minus
    x2 = S * S
    for x_w in (x_w1, x_w2):
        candidate = x2 * p0 + S * x_w * p1 + quadratic
        logger.debug("Sturm test of degree %d on (0, %s)", candidate.degree, x_hi)
        if not poly_positive_on(candidate, 0, x_hi, depth):
            return False
    return True


# Conditions (I)–(V)

def condition_phi_nonnegative(fn: MagicFunction) -> bool:
    """(I): every entry of C_φ is ≥ 0."""
    return all(c >= 0 for c in fn.c_phi)


def condition_psi_lower(fn: MagicFunction) -> bool:
    """(II): the lower truncation ψ↓ has no negative coefficient."""
    lower, _ = bracket(fn.psi, fn.params, fn.n_trunc)
    return all(c >= 0 for c in lower.coefficients(0))


def condition_second_integrand(fn: MagicFunction, ladder: PrecisionLadder) -> bool:
    """(III): −π₂²ψ↑ − φ_S↑ > 0 on (0, γ₂)."""
    _, psi_up = bracket(fn.psi, fn.params, fn.n_trunc)
    _, phi_s_up = bracket(fn.phi_s, fn.params, fn.n_trunc)
    pi_hi = ladder.pi().hi
    poly = -(component_poly(psi_up, 0) * (pi_hi * pi_hi)) - component_poly(phi_s_up, 0)
    return poly_positive_on(poly, 0, ladder.gamma_range().hi, _depth())


def _quadratic_positive(series: RSeries, fn: MagicFunction, ladder: PrecisionLadder,
                        shift: int = 0) -> bool:
    return quadratic_in_w_positive(
        component_poly(series, 0, shift), component_poly(series, 1, shift),
        component_poly(series, 2, shift), fn.n_trunc, ladder.gamma_range().hi,
    )


def first_integrand_lower(fn: MagicFunction, sign: int = 1) -> RSeries:
    """(w²ψ_S)↓ + φ↓ for sign = +1 and −(w²ψ_S)↑ + φ↓ for sign = −1."""
    psi_low, psi_up = bracket(fn.w2_psi_s, fn.params, fn.n_trunc)
    phi_low, _ = bracket(fn.phi, fn.params, fn.n_trunc)
    return (psi_low + phi_low) if sign > 0 else (phi_low - psi_up)


def condition_h_integrand(fn: MagicFunction, ladder: PrecisionLadder) -> bool:
    """(IV): (w²ψ_S)↓ + φ↓ > 0 for 0 < x < γ₂ and w in its log bracket."""
    return _quadratic_positive(first_integrand_lower(fn, +1), fn, ladder)


def condition_hhat_integrand(fn: MagicFunction, ladder: PrecisionLadder) -> bool:
    """(V): −(w²ψ_S)↑ + φ↓ > 0 for 0 < x < γ₂ and w in its log bracket."""
    return _quadratic_positive(first_integrand_lower(fn, -1), fn, ladder)


# The meromorphic part: p_m(w) x^m, its split, and the rational lower bound Q(s)

def laurent_product(fn: MagicFunction, sign: int = -1) -> RSeries:
    """
    Σ p_m(w) x^m = v↓·Σ_{n=−l}^{N−l−2} δ_{l,n} x^n as an exact polynomial product.

    v↓ is −(w²ψ_S)↑ + φ↓ for sign = −1 (Ĥ) and (w²ψ_S)↓ + φ↓ for sign = +1 (H).
    """
    p = fn.params
    top = 2 * fn.n_trunc - p.l - 2
    v = first_integrand_lower(fn, sign).extend(top + p.l)
    return v * fn.delta_inv.extend(top)


def split_point(fn: MagicFunction, ladder: PrecisionLadder) -> int:
    """M = ⌊(2N−l−2)/2^m⌋ for the ladder's split exponent m."""
    return (2 * fn.n_trunc - fn.params.l - 2) // 2 ** ladder.split_exponent


def _split_tail(product: RSeries, M: int) -> RSeries:
    """A₂ divided by x^M: the w⁰, w¹ parts of p_M and every p_m with m > M."""
    offset = M - product.start
    parts = [product.coefficients(w)[offset:] for w in range(3)]
    parts[2][0] = 0
    return RSeries(0, product.order - M, parts)


def condition_split_tail(fn: MagicFunction, ladder: PrecisionLadder, sign: int = -1,
                         product: Optional[RSeries] = None) -> bool:
    """(VI): A₂(x)/x^M > 0 for 0 < x < γ₂ and w in its log bracket."""
    product = product if product is not None else laurent_product(fn, sign)
    tail = _split_tail(product, split_point(fn, ladder))
    return _quadratic_positive(tail, fn, ladder)


def rationalize(terms: Dict[Tuple[int, int, int], Fraction], pi: RationalInterval,
                gamma: RationalInterval) -> RatPoly:
    """
    ℛ: replace each c·π^i·γ^j·s^n by min over the enclosure corners of c·π_α^i·γ_β^j, times s^n.

    The result is a lower bound of the expression for every s ≥ 0.
    """
    coeffs: Dict[int, Fraction] = {}
    for (i, j, n), c in terms.items():
        if not c:
            continue
        corners = [c * pa ** i * gb ** j for pa in (pi.lo, pi.hi) for gb in (gamma.lo, gamma.hi)]
        coeffs[n] = coeffs.get(n, 0) + min(corners)
    degree = max(coeffs, default=-1)
    return RatPoly([coeffs.get(n, 0) for n in range(degree + 1)])


def _accumulate(terms: Dict, key: Tuple[int, int, int], value) -> None:
    if value:
        terms[key] = terms.get(key, 0) + value


@dataclass(frozen=True)
class PoleTerm:
    """numerator(s) / (s + m)^exponent."""
    m: int
    numerator: RatPoly
    exponent: int


def lower_bound_term(m: int, p0: Fraction, p1: Fraction, p2: Fraction,
                     pi: RationalInterval, gamma: RationalInterval) -> PoleTerm:
    """
    Rational lower bound B_m of e^{πs}∫_π^∞ p(w) e^{−(s+m)w} dw for p = p0 + p1·w + p2·w².

    With p(w+π) = c0 + c1·w + c2·w² the integral is γ^m(c0/(s+m) + c1/(s+m)² + 2c2/(s+m)³),
    bounded below termwise over the even denominators (s+m)² and (s+m)⁴.
    """
    first: Dict[Tuple[int, int, int], Fraction] = {}
    for i, p_i in enumerate((p0, p1, p2)):
        _accumulate(first, (i, m, 1), p_i)
        _accumulate(first, (i, m, 0), m * p_i)
    second: Dict[Tuple[int, int, int], Fraction] = {}
    _accumulate(second, (0, m, 0), p1)
    _accumulate(second, (1, m, 0), 2 * p2)
    low = rationalize(first, pi, gamma) + rationalize(second, pi, gamma)
    if not p2:
        return PoleTerm(m, low, 2)
    third: Dict[Tuple[int, int, int], Fraction] = {}
    _accumulate(third, (0, m, 1), 2 * p2)
    _accumulate(third, (0, m, 0), 2 * m * p2)
    shift = RatPoly((m, 1))
    return PoleTerm(m, low * shift * shift + rationalize(third, pi, gamma), 4)


def exact_pole_term(m: int, c0: Fraction, gamma: RationalInterval, side: int) -> PoleTerm:
    """
    Rational lower bound of γ^m·c0/(s+m) where s + m has the sign `side`.

    The numerator is the lower end of γ^m·c0 when s + m > 0 and the upper end otherwise.
    """
    values = (c0 * gamma.lo ** m, c0 * gamma.hi ** m)
    chosen = min(values) if side > 0 else max(values)
    return PoleTerm(m, RatPoly.constant(chosen), 1)


@dataclass
class RationalLowerBound:
    """
    Q(s) = numerator(s) / Π (s+m)^{e_m}, kept with common factors cancelled.

    Attributes:
        numerator: Q_num
        multiplicities: m → e_m for the denominator factors (s+m)
    """
    numerator: RatPoly
    multiplicities: Dict[int, int] = field(default_factory=dict)

    @classmethod
    def assemble(cls, terms: Iterable[PoleTerm]) -> "RationalLowerBound":
        multiplicities: Dict[int, int] = {}
        terms = list(terms)
        for t in terms:
            multiplicities[t.m] = max(multiplicities.get(t.m, 0), t.exponent)
        numerator = RatPoly()
        for t in terms:
            factor = RatPoly.constant(1)
            for m, e in multiplicities.items():
                power = e - t.exponent if m == t.m else e
                if power:
                    factor = factor * RatPoly((m, 1)) ** power
            numerator = numerator + t.numerator * factor
        bound = cls(numerator, multiplicities)
        bound.cancel()
        return bound

    def cancel(self) -> None:
        """Divide out factors (s+m) shared by numerator and denominator."""
        for m in sorted(self.multiplicities):
            linear = RatPoly((m, 1))
            while self.multiplicities[m] and not self.numerator.is_zero() and self.numerator(-m) == 0:
                self.numerator = self.numerator // linear
                self.multiplicities[m] -= 1
        self.multiplicities = {m: e for m, e in self.multiplicities.items() if e}

    def even_poles(self) -> None:
        """Raise odd multiplicities at poles s = −m ≥ 0 by one, multiplying the numerator to match."""
        for m, e in list(self.multiplicities.items()):
            if m <= 0 and e % 2:
                self.numerator = self.numerator * RatPoly((m, 1))
                self.multiplicities[m] = e + 1

    @property
    def denominator(self) -> RatPoly:
        result = RatPoly.constant(1)
        for m, e in sorted(self.multiplicities.items()):
            result = result * RatPoly((m, 1)) ** e
        return result

    def pole_free_denominator(self) -> Optional[RatPoly]:
        """Q_den divided by its factors (s−2j)^e with 2j ≥ 0, or None if the division is inexact."""
        poles = RatPoly.constant(1)
        for m, e in self.multiplicities.items():
            if m <= 0:
                poles = poles * RatPoly((m, 1)) ** e
        return self.denominator.exact_div(poles)

    def __call__(self, s) -> Fraction:
        s = Fraction(s)
        value = self.numerator(s)
        for m, e in self.multiplicities.items():
            value /= (s + m) ** e
        return value


def hhat_lower_bound(fn: MagicFunction, ladder: PrecisionLadder,
                     product: Optional[RSeries] = None) -> RationalLowerBound:
    """
    Q(s) with π·Ĥ(√s)/sin²(πs/2) > e^{−πs}·Q(s) for s > 0 away from the poles 0, 2, ..., a−2.

    Raises:
        ConsistencyError: If p_m is nonzero below m = −a + 2 or carries w² at m ≤ 0
    """
    p = fn.params
    product = product if product is not None else laurent_product(fn, -1)
    M = split_point(fn, ladder)
    pi, gamma = ladder.pi(), ladder.gamma()
    terms = []
    for m in range(product.start, M + 1):
        c0, c1, c2 = (product.coeff_or_zero(w, m) for w in range(3))
        if m < 2 - p.a:
            if c0 or c1 or c2:
                raise ConsistencyError(f"Nonzero coefficient below the first pole at x^{m}",
                                       check="hhat_poles", d=p.d, m=m)
            continue
        if m <= 0 and c2:
            raise ConsistencyError(f"w^2 term at pole x^{m}", check="hhat_poles", d=p.d, m=m)
        if m == M:
            c0, c1 = 0, 0
        if c0 or c1 or c2:
            terms.append(lower_bound_term(m, c0, c1, c2, pi, gamma))
    return RationalLowerBound.assemble(terms)


def condition_hhat_spectrum(fn: MagicFunction, ladder: PrecisionLadder,
                            product: Optional[RSeries] = None) -> bool:
    """
    (VII): Q_den/Π(s−2j)^2 has nonnegative coefficients and Q_num > 0 on (c, a−2).

    An empty interval (c ≥ a − 2) makes the condition hold vacuously.
    """
    p = fn.params
    c = p.c if p.c is not None else Fraction(0)
    if c >= p.a - 2:
        logger.debug("d=%d: (c, a-2) = (%s, %d) is empty", p.d, c, p.a - 2)
        return True
    bound = hhat_lower_bound(fn, ladder, product)
    bound.even_poles()
    quotient = bound.pole_free_denominator()
    if quotient is None or any(x < 0 for x in quotient.coeffs):
        logger.warning("d=%d: denominator of Q has negative coefficients after removing poles", p.d)
        return False
    return poly_positive_on(bound.numerator, c, p.a - 2, _depth())


# Grouped checks

def check_exact_conditions(fn: MagicFunction) -> Dict[str, bool]:
    """(I) and (II), which no precision change can affect."""
    results = {"I": condition_phi_nonnegative(fn), "II": condition_psi_lower(fn)}
    for name, ok in results.items():
        if not ok:
            logger.warning("d=%d: condition (%s) failed", fn.params.d, name)
    return results


def check_precision_conditions(fn: MagicFunction, ladder: PrecisionLadder) -> Dict[str, bool]:
    """(III)–(VII) at one rung of the ladder."""
    product = laurent_product(fn, -1)
    results = {
        "III": condition_second_integrand(fn, ladder),
        "IV": condition_h_integrand(fn, ladder),
        "V": condition_hhat_integrand(fn, ladder),
        "VI": condition_split_tail(fn, ladder, -1, product),
        "VII": condition_hhat_spectrum(fn, ladder, product),
    }
    logger.debug("d=%d conditions at %s: %s", fn.params.d, ladder.as_tuple(), results)
    return results


def check_conditions(params: MagicParams, c_phi, c_psi, n_trunc: int,
                     ladder: PrecisionLadder) -> Dict[str, bool]:
    """All of (I)–(VII) for explicit vectors and truncation order at a single rung."""
    fn = MagicFunction(params, tuple(c_phi), tuple(c_psi), n_trunc)
    results = check_exact_conditions(fn)
    results.update(check_precision_conditions(fn, ladder))
    return results


# Sign pattern of H for d = 48

SIGN48_RANGE = (0, 10)
SIGN48_ZEROS = (6, 8)


def h_window_lower_bound(fn: MagicFunction, ladder: PrecisionLadder,
                         window: Tuple[int, int] = SIGN48_ZEROS,
                         span: Tuple[int, int] = SIGN48_RANGE,
                         product: Optional[RSeries] = None) -> RationalLowerBound:
    """
    Q'(s) with −π·H(√s)/sin²(πs/2) > e^{−πs}·Q'(s) for s inside the window.

    Terms with a constant p_m are kept as exact simple poles, their corners picked by
    the sign of s + m on the window; the others use B_m.

    Raises:
        ConsistencyError: If p_m at a window endpoint is not a nonzero constant, or a
            pole other than the window endpoints falls strictly inside the span
    """
    product = product if product is not None else laurent_product(fn, +1)
    M = split_point(fn, ladder)
    pi, gamma = ladder.pi(), ladder.gamma()
    lo, hi = window
    mid = Fraction(lo + hi, 2)
    terms = []
    for m in range(product.start, M + 1):
        c0, c1, c2 = (product.coeff_or_zero(w, m) for w in range(3))
        if m == M:
            c0, c1 = 0, 0
        edge = -m in (lo, hi)
        if edge and (c1 or c2 or not c0):
            raise ConsistencyError(f"p_m at s={-m} is not a nonzero constant", check="sign48", m=m)
        if not (c0 or c1 or c2):
            continue
        if span[0] < -m < span[1] and not edge:
            raise ConsistencyError(f"Pole at s={-m} inside ({span[0]}, {span[1]})", check="sign48", m=m)
        if c1 or c2:
            terms.append(lower_bound_term(m, c0, c1, c2, pi, gamma))
        else:
            terms.append(exact_pole_term(m, c0, gamma, 1 if mid + m > 0 else -1))
    return RationalLowerBound.assemble(terms)


def sign_quotient(bound: RationalLowerBound, zeros: Tuple[int, int] = SIGN48_ZEROS) -> RatPoly:
    """
    Q(s)·Q_den(s)²/((s−z₁)(s−z₂)) for the upper bound Q = −Q' of π·e^{πs}·H(√s)/sin²(πs/2).

    Positive wherever Q/((s−z₁)(s−z₂)) is, since Q_den² ≥ 0.

    Raises:
        ConsistencyError: If the cleared numerator is not divisible by (s−z₁)(s−z₂)
    """
    z1, z2 = zeros
    cleared = -(bound.numerator * bound.denominator)
    quotient = cleared.exact_div(RatPoly((-z1, 1)) * RatPoly((-z2, 1)))
    if quotient is None:
        raise ConsistencyError(f"Bound is not divisible by (s-{z1})(s-{z2})", check="sign48",
                               zeros=list(zeros))
    return quotient


def check_sign_48(fn: Optional[MagicFunction] = None,
                  ladder: Optional[PrecisionLadder] = None) -> bool:
    """
    Certify Q(s)/((s−6)(s−8)) > 0 on (0, 10) in dimension 48, which gives H(√s) < 0 on (6, 8).

    Requires the H-side split tail to be positive, then Sturm-checks the exact quotient.

    Raises:
        ConsistencyError: If the pole structure on (0, 10) or the divisibility check fails
    """
    from .magic import magic_function

    if fn is None:
        fn = magic_function(48)
    if ladder is None:
        ladder = PrecisionLadder.from_config(get_global_config())
    product = laurent_product(fn, +1)
    if not condition_split_tail(fn, ladder, +1, product):
        logger.warning("d=%d: H-side split tail not positive at %s", fn.params.d, ladder.as_tuple())
        return False
    quotient = sign_quotient(h_window_lower_bound(fn, ladder, product=product))
    logger.debug("d=%d: sign quotient of degree %d", fn.params.d, quotient.degree)
    return poly_positive_on(quotient, *SIGN48_RANGE, _depth())
