"""
Evaluation of H and its Fourier transform Ĥ

Both are written as sin²(πs/2) times two integrals over t ≥ 1 (s = |x|²): the first is
integrated termwise over the r-expansion, which gives its meromorphic continuation in
s, and the second converges for every s > 0.

Float mode works in mpmath at ``evaluation.float_digits`` and serves plots, sign scans
and the c_d estimates. Certified mode returns a RationalInterval and is limited to the
region where the termwise integral converges (s > a−2 for Ĥ, s > l for H).
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import List, Optional, Sequence, Tuple, Union

import mpmath
from mpmath.calculus.quadrature import GaussLegendre

from ..config import get_global_config
from ..exceptions import PoleProximityError, RegionError, ValidationError
from .exactnum import (
    PrecisionLadder, RationalInterval, as_fraction, exp_enclosure, pi_bounds, exp_neg_pi_bounds
)
from .magic import MagicFunction, magic_function
from .series import RSeries

logger = logging.getLogger(__name__)

# Gauss-Legendre pieces of u = 1/t in (0, 1]
QUADRATURE_BREAKS = (0, Fraction(1, 8), Fraction(1, 4), Fraction(1, 2), 1)


class Side(str, Enum):
    """Which function to evaluate."""
    H = "h"
    H_HAT = "hhat"

    @classmethod
    def parse(cls, value: Union[str, "Side"]) -> "Side":
        if isinstance(value, Side):
            return value
        try:
            return cls(str(value).lower().replace("_", ""))
        except ValueError:
            raise ValidationError(f"Unknown side '{value}' (expected 'h' or 'hhat')",
                                  field="side", value=value)


class Mode(str, Enum):
    FLOAT = "float"
    CERTIFIED = "certified"


def _mpf(x):
    x = as_fraction(x)
    return mpmath.mpf(x.numerator) / x.denominator


def _integrand_series(fn: MagicFunction, side: Side) -> Tuple[RSeries, RSeries, RSeries]:
    """
    (first, psi·D, phi_s·D) where first = v·Δ^{−l/2} with v = −w²ψ_S ± φ.

    The second integrand is −π²·psi·D ∓ phi_s·D with the same sign choice.
    """
    delta_inv = fn.delta_inv
    phi = fn.phi if side == Side.H_HAT else -fn.phi
    first = (phi - fn.w2_psi_s) * delta_inv
    return first, fn.psi * delta_inv, fn.phi_s * delta_inv


def nearest_even(s: Fraction) -> int:
    return 2 * round(s / 2)


class FloatEvaluator:
    """
    mpmath evaluation of H(√s) or Ĥ(√s) for one solved magic function.

    The series coefficients and the quadrature nodes of the second integral are converted
    once; each evaluation then costs one pass over them.
    """

    def __init__(self, fn: MagicFunction, side: Union[str, Side] = Side.H_HAT,
                 digits: Optional[int] = None, quad_degree: int = 7):
        config = get_global_config()
        self.fn = fn
        self.side = Side.parse(side)
        self.digits = digits or config.get("evaluation.float_digits", 60)
        self.pole_tolerance = Fraction(str(config.get("evaluation.pole_tolerance", 1e-6)))
        self.quad_degree = quad_degree
        first, psi_d, phi_s_d = _integrand_series(fn, self.side)
        self._first = first
        self._psi_d = psi_d
        self._phi_s_d = phi_s_d

    @cached_property
    def _terms(self) -> List[Tuple[int, Tuple]]:
        """(m, (c̃0, c̃1, c̃2)) with p_m(w+π) = c̃0 + c̃1·w + c̃2·w²."""
        with mpmath.workdps(self.digits):
            pi = mpmath.pi
            result = []
            for m in range(self._first.start, self._first.order + 1):
                p0, p1, p2 = (_mpf(self._first.coeff(w, m)) for w in range(3))
                if p0 or p1 or p2:
                    result.append((m, (p0 + p1 * pi + p2 * pi * pi, p1 + 2 * p2 * pi, p2)))
            return result

    @cached_property
    def _nodes(self) -> List[Tuple]:
        """(u, weight·u^{d/2−2}·G(e^{−π/u})) over the pieces of (0, 1]."""
        sign = 1 if self.side == Side.H_HAT else -1
        with mpmath.workdps(self.digits):
            pi = mpmath.pi
            start = self._psi_d.start
            psi = [_mpf(c) for c in self._psi_d.coefficients(0)]
            phi_s = [_mpf(c) for c in self._phi_s_d.coefficients(0)]
            offset = self._phi_s_d.start - start
            coefficients = [-pi * pi * c for c in psi]
            for i, c in enumerate(phi_s):
                if 0 <= i + offset < len(coefficients):
                    coefficients[i + offset] -= sign * c
            rule = GaussLegendre(mpmath.mp)
            exponent = Fraction(self.fn.params.d, 2) - 2
            nodes = []
            for a, b in zip(QUADRATURE_BREAKS, QUADRATURE_BREAKS[1:]):
                for u, weight in rule.get_nodes(_mpf(a), _mpf(b), self.quad_degree, mpmath.mp.prec):
                    r = mpmath.exp(-pi / u)
                    value = 0
                    for c in reversed(coefficients):
                        value = value * r + c
                    value *= r ** start
                    nodes.append((u, weight * value * u ** _mpf(exponent)))
            return nodes

    def first_integral(self, s) -> "mpmath.mpf":
        """∫_1^∞ v(πt)·Δ^{−l/2}(it)·e^{−πts} dt continued termwise in s."""
        with mpmath.workdps(self.digits):
            s = _mpf(s)
            pi = mpmath.pi
            total = mpmath.mpf(0)
            for m, (c0, c1, c2) in self._terms:
                z = s + m
                total += mpmath.exp(-pi * z) * (c0 / z + c1 / z ** 2 + 2 * c2 / z ** 3)
            return total / pi

    def second_integral(self, s) -> "mpmath.mpf":
        """∫_1^∞ g(it)·e^{−πs/t}·t^{−d/2} dt, written over u = 1/t."""
        with mpmath.workdps(self.digits):
            s = _mpf(s)
            scale = -mpmath.pi * s
            return mpmath.fsum(weighted * mpmath.exp(scale * u) for u, weighted in self._nodes)

    def divided(self, s) -> "mpmath.mpf":
        """H/sin²(πs/2) or Ĥ/sin²(πs/2); s must not be an even integer."""
        return self.first_integral(s) + self.second_integral(s)

    def pole_limit(self, s0: int) -> "mpmath.mpf":
        """Value at an even integer: (π/4)·c̃1 of the term with m = −s0, or 0."""
        with mpmath.workdps(self.digits):
            for m, (_, c1, _) in self._terms:
                if m == -s0:
                    return mpmath.pi * c1 / 4
            return mpmath.mpf(0)

    def __call__(self, s) -> "mpmath.mpf":
        """H(√s) or Ĥ(√s)."""
        s = as_fraction(s)
        if s < 0:
            raise ValidationError("s must be nonnegative", field="s", value=str(s))
        even = nearest_even(s)
        if s == even:
            return self.pole_limit(even)
        if abs(s - even) < self.pole_tolerance:
            raise PoleProximityError(s, even)
        with mpmath.workdps(self.digits):
            return mpmath.sin(mpmath.pi * _mpf(s) / 2) ** 2 * self.divided(s)

    def normalized(self, s) -> "mpmath.mpf":
        """Value·e^{πs}/value(0), the scale used for plots."""
        with mpmath.workdps(self.digits):
            return self(s) * mpmath.exp(mpmath.pi * _mpf(s)) / self(0)


# Certified mode

def interval_exp(u: RationalInterval, digits: int) -> RationalInterval:
    cap = get_global_config().get("precision.exp_cap", 4096)
    return RationalInterval(exp_enclosure(u.lo, digits, cap).lo, exp_enclosure(u.hi, digits, cap).hi)


def _sin_bracket(theta: Fraction, digits: int) -> RationalInterval:
    """Alternating Taylor bracket of sin θ for 0 ≤ θ ≤ 2."""
    if theta == 0:
        return RationalInterval.point(0)
    threshold = Fraction(1, 10 ** (digits + 2))
    total = Fraction(0)
    term = theta
    k = 0
    while True:
        previous = total
        total += term
        k += 1
        term = -term * theta * theta / ((2 * k) * (2 * k + 1))
        if abs(term) < threshold:
            break
    lo, hi = min(previous, total), max(previous, total)
    return RationalInterval(max(lo, total - abs(term)), min(hi, total + abs(term))).round_out(digits + 1)


def sin_squared_enclosure(s, digits: int = 30) -> RationalInterval:
    """Rational enclosure of sin²(πs/2) for s ≥ 0."""
    s = as_fraction(s)
    reduced = s - 2 * math.floor(s / 2)
    folded = min(reduced, 2 - reduced)
    if folded == 0:
        return RationalInterval.point(0)
    pi = pi_bounds(digits + 2)
    lo = _sin_bracket(pi.lo * folded / 2, digits).lo
    hi_theta = pi.hi * folded / 2
    hi = Fraction(1) if 2 * hi_theta >= pi.lo else _sin_bracket(hi_theta, digits).hi
    lo = max(lo, Fraction(0))
    return RationalInterval(lo * lo, min(hi, Fraction(1)) ** 2)


def _horner_interval(coefficients: Sequence[Fraction], start: int, r: RationalInterval,
                     digits: int) -> RationalInterval:
    """Enclosure of Σ c_i r^{start+i} over r ∈ [r.lo, r.hi] with r.lo > 0."""
    acc = RationalInterval.point(0)
    for c in reversed(coefficients):
        acc = (acc * r + c).round_out(digits)
    if start >= 0:
        return (acc * r ** start).round_out(digits)
    inverse = RationalInterval(1 / r.hi, 1 / r.lo)
    return (acc * inverse ** (-start)).round_out(digits)


def _compact(series: RSeries) -> RSeries:
    """Drop leading zero terms so the series starts at its lowest nonzero exponent."""
    low = series.lowest_nonzero()
    return series if low is None or low <= series.start else series.with_start(low)


@dataclass
class CertifiedEvaluator:
    """
    Rational enclosures of H(√s) and Ĥ(√s) in the region where every term converges.

    The enclosure presumes the positivity conditions of the certificate: the lower
    truncation of v and the second integrand's factors keep their signs on t ≥ 1.
    """
    fn: MagicFunction
    side: Side = Side.H_HAT
    digits: int = 30
    pieces: int = 200
    cutoff: int = 6

    def __post_init__(self):
        self.side = Side.parse(self.side)
        self.pi = pi_bounds(self.digits)
        self.gamma = exp_neg_pi_bounds(self.digits)

    @property
    def region(self) -> int:
        p = self.fn.params
        return p.a - 2 if self.side == Side.H_HAT else p.l

    @cached_property
    def delta_bracket(self) -> Tuple[RSeries, RSeries]:
        """(D↓, D↑): truncated Δ^{−l/2} and the same plus K·r^{N−1−l}."""
        fn = self.fn
        low = fn.delta_inv
        top = fn.n_trunc - 1 - fn.params.l
        # Σ_{n>T} δ'_n r^n ≤ (2r)^{T+1}·∏(1−4^{−n})^{−12l} for r ≤ 1/2, with the product ≤ (3/2)^{12l}
        k = Fraction(2) ** (top + fn.params.l) * Fraction(3, 2) ** (12 * fn.params.l)
        high = low.extend(top) + RSeries.monomial(top, top, k)
        return low, high

    @cached_property
    def first_bracket(self) -> Tuple[RSeries, RSeries]:
        """(v↓·D↓, v↑·D↑) as exact polynomials."""
        from .conditions import bracket

        fn, p = self.fn, self.fn.params
        psi_low, psi_up = bracket(fn.w2_psi_s, p, fn.n_trunc)
        phi_low, phi_up = bracket(fn.phi, p, fn.n_trunc)
        if self.side == Side.H_HAT:
            v_low, v_high = phi_low - psi_up, phi_up - psi_low
        else:
            v_low, v_high = psi_low + phi_low, psi_up + phi_up
        d_low, d_high = self.delta_bracket
        top = 2 * fn.n_trunc - 1
        low = v_low.extend(top) * d_low.extend(top - p.l)
        high = v_high.extend(top) * d_high.extend(top - p.l)
        return low, high

    @cached_property
    def second_bracket(self) -> Tuple[RSeries, RSeries]:
        """
        (G↓, G↑) with G↓ ≤ g·Δ^{−l/2} ≤ G↑ on t ≥ 1 for the second integrand g.

        Ĥ: g = −π²ψ − φ_S, bracketed by −π₂²ψ↑ − φ_S↑ ≥ 0 and −π₁²ψ↓ − φ_S↓.
        H (negated): g = π²ψ − φ_S ≥ π₁²ψ↓ ≥ 0 and ≤ π₂²ψ↑ − φ_S↓.
        """
        from .conditions import bracket

        fn, p = self.fn, self.fn.params
        psi_low, psi_up = bracket(fn.psi, p, fn.n_trunc)
        phi_s_low, phi_s_up = bracket(fn.phi_s, p, fn.n_trunc)
        pi_lo2, pi_hi2 = self.pi.lo ** 2, self.pi.hi ** 2
        if self.side == Side.H_HAT:
            g_low = -psi_up.scale(pi_hi2) - phi_s_up
            g_high = -psi_low.scale(pi_lo2) - phi_s_low
        else:
            g_low = psi_low.scale(pi_lo2)
            g_high = psi_up.scale(pi_hi2) - phi_s_low
        d_low, d_high = self.delta_bracket
        top = 2 * fn.n_trunc - 1 - p.l
        return (_compact(g_low.extend(top + p.l) * d_low.extend(top)),
                _compact(g_high.extend(top + p.l) * d_high.extend(top)))

    def _termwise(self, product: RSeries, s: Fraction, upper: bool) -> Fraction:
        pi = self.pi
        decay = interval_exp(RationalInterval(-pi.hi * s, -pi.lo * s), self.digits)
        inverse_gamma = RationalInterval(1 / self.gamma.hi, 1 / self.gamma.lo)
        total = RationalInterval.point(0)
        for m in range(product.start, product.order + 1):
            p0, p1, p2 = (product.coeff(w, m) for w in range(3))
            if not (p0 or p1 or p2):
                continue
            z = s + m
            c0 = pi * pi * p2 + pi * p1 + p0
            c1 = pi * (2 * p2) + p1
            weight = self.gamma ** m if m >= 0 else inverse_gamma ** (-m)
            term = (c0 / z + c1 / (z * z) + RationalInterval.point(2 * p2 / z ** 3)) * weight
            total = (total + term).round_out(self.digits + 10)
        total = (total * decay / pi).round_out(self.digits)
        return total.hi if upper else total.lo

    def first_integral(self, s: Fraction) -> RationalInterval:
        low, high = self.first_bracket
        return RationalInterval(self._termwise(low, s, False), self._termwise(high, s, True))

    def _range(self, r: RationalInterval) -> RationalInterval:
        """Enclosure of g·Δ^{−l/2} for r in the given range."""
        low, high = self.second_bracket
        return RationalInterval(
            _horner_interval(low.coefficients(0), low.start, r, self.digits).lo,
            _horner_interval(high.coefficients(0), high.start, r, self.digits).hi,
        )

    def second_integral(self, s: Fraction) -> RationalInterval:
        """
        Piecewise enclosure over t ∈ [1, cutoff] plus a tail bound: on [cutoff, ∞) the
        integrand is at most max G↑ · t^{−d/2}.
        """
        pi, digits = self.pi, self.digits
        half = self.fn.params.d // 2
        width = Fraction(self.cutoff - 1, self.pieces)
        total = RationalInterval.point(0)
        for i in range(self.pieces):
            t0 = 1 + i * width
            t1 = t0 + width
            r = interval_exp(RationalInterval(-pi.hi * t1, -pi.lo * t0), digits)
            gaussian = interval_exp(RationalInterval(-pi.hi * s / t0, -pi.lo * s / t1), digits)
            power = RationalInterval(1 / t1 ** half, 1 / t0 ** half)
            total = (total + self._range(r) * gaussian * power * width).round_out(digits)
        edge = interval_exp(RationalInterval.point(-pi.lo * self.cutoff), digits)
        tail = self._range(RationalInterval(0, edge.hi))
        scale = Fraction(self.cutoff) ** (1 - half) / (half - 1)
        tail = RationalInterval(min(tail.lo, 0), max(tail.hi, 0)) * scale
        return (total + tail).round_out(digits)

    def __call__(self, s) -> RationalInterval:
        """
        Enclosure of H(√s) or Ĥ(√s).

        Raises:
            RegionError: If s is not beyond the last pole of the termwise integral
        """
        s = as_fraction(s)
        if s <= self.region:
            raise RegionError(s, self.region, self.side.value)
        divided = self.first_integral(s) + self.second_integral(s)
        if self.side == Side.H:
            divided = -divided
        return (sin_squared_enclosure(s, self.digits) * divided).round_out(self.digits)


# Entry points

def _resolve(fn_or_d: Union[int, MagicFunction]) -> MagicFunction:
    return fn_or_d if isinstance(fn_or_d, MagicFunction) else magic_function(fn_or_d)


def evaluate_h(fn_or_d: Union[int, MagicFunction], s, mode: Union[str, Mode] = Mode.FLOAT,
               side: Union[str, Side] = Side.H_HAT,
               ladder: Optional[PrecisionLadder] = None):
    """
    Value of H(√s) or Ĥ(√s) for the magic function of a dimension.

    Args:
        fn_or_d: Solved magic function or a dimension
        s: Squared radius |x|²
        mode: "float" (mpmath value) or "certified" (RationalInterval)
        side: "h" or "hhat"
        ladder: Precision for certified mode (pi_digits sets the enclosure digits)

    Raises:
        PoleProximityError: Float mode, s within pole_tolerance of an even integer
        RegionError: Certified mode, s at or below the last pole
    """
    fn = _resolve(fn_or_d)
    mode = Mode(mode)
    if mode == Mode.FLOAT:
        return FloatEvaluator(fn, side)(s)
    config = get_global_config()
    ladder = ladder or PrecisionLadder.from_config(config)
    evaluator = CertifiedEvaluator(fn, Side.parse(side), digits=ladder.pi_digits,
                                   pieces=config.get("evaluation.certified_pieces", 200),
                                   cutoff=config.get("evaluation.certified_cutoff", 6))
    return evaluator(s)


def sample_grid(lo: Fraction, hi: Fraction, step: Fraction) -> List[Fraction]:
    """Points lo + (i + 1/2)·step inside (lo, hi), which never land on even integers for step = 1/n."""
    points = []
    s = lo + step / 2
    while s < hi:
        points.append(s)
        s += step
    return points


def estimate_last_sign_change(fn_or_d: Union[int, MagicFunction],
                              step: Optional[Fraction] = None, decimals: int = 4,
                              digits: Optional[int] = None) -> Fraction:
    """
    Last sign change of s ↦ Ĥ(√s) on (0, a−2), rounded up to `decimals` places.

    The scan runs at `digits` (evaluation.float_digits by default).

    Returns:
        Fraction(0) when Ĥ keeps its sign on the scanned grid
    """
    config = get_global_config()
    fn = _resolve(fn_or_d)
    if step is None:
        step = config.get_fraction("evaluation.sign_scan_step", "1/200")
    evaluator = FloatEvaluator(fn, Side.H_HAT, digits=digits)
    grid = sample_grid(Fraction(0), Fraction(fn.params.a - 2), step)
    if not grid:
        return Fraction(0)

    signs = [mpmath.sign(evaluator(s)) for s in grid]
    for i in range(len(grid) - 1, 0, -1):
        if signs[i] != signs[i - 1] and signs[i] != 0:
            lo, hi = grid[i - 1], grid[i]
            break
    else:
        logger.info("d=%d: no sign change of Hhat on (0, %d)", fn.params.d, fn.params.a - 2)
        return Fraction(0)

    target = Fraction(1, 10 ** (decimals + 1))
    sign_hi = signs[i]
    while hi - lo > target:
        mid = (lo + hi) / 2
        if nearest_even(mid) == mid or abs(mid - nearest_even(mid)) < evaluator.pole_tolerance:
            mid += target / 3
        if mpmath.sign(evaluator(mid)) == sign_hi:
            hi = mid
        else:
            lo = mid
    scale = 10 ** decimals
    estimate = Fraction(math.ceil(hi * scale), scale)
    logger.info("d=%d: last sign change of Hhat near %s", fn.params.d, estimate)
    return estimate


def check_sign_48_float(fn_or_d: Union[int, MagicFunction] = 48,
                        step: Fraction = Fraction(1, 4)) -> bool:
    """H(√s) > 0 on (0, 6) ∪ (8, 10) and < 0 on (6, 8), sampled on an offset grid."""
    evaluator = FloatEvaluator(_resolve(fn_or_d), Side.H)
    for s in sample_grid(Fraction(0), Fraction(10), step):
        value = evaluator(s)
        expected = -1 if 6 < s < 8 else 1
        if mpmath.sign(value) != expected:
            logger.warning("H(sqrt(%s)) has sign %s, expected %d", s, mpmath.sign(value), expected)
            return False
    return True
