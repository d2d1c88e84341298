"""
Exact arithmetic layer for MagicPack

Dense univariate polynomials over the rationals, Sturm-sequence root counting,
positivity proofs on open intervals, rigorous rational enclosures of pi, e^u and
e^-pi, rational interval arithmetic and Fraction linear algebra. Nothing here
ever rounds inwards: every enclosure contains the true value.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

from ..exceptions import EndpointRootError, ExpCapError, ValidationError
from ..utils.cache import memoized

logger = logging.getLogger(__name__)

DEFAULT_RUNGS = ((20, 2, 4), (40, 5, 3), (60, 8, 2), (80, 11, 1), (100, 11, 0))


def as_fraction(value) -> Fraction:
    """Convert an int, Fraction or "p/q" string to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValidationError("Booleans are not rationals", field="value", value=value)
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise ValidationError(f"Not a rational number: {value!r}", field="value", value=value) from e
    raise ValidationError(f"Unsupported rational type {type(value).__name__}", field="value", value=value)


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def _content(ints: Sequence[int]) -> int:
    g = 0
    for c in ints:
        g = math.gcd(g, c)
        if g == 1:
            break
    return g


def _primitive(ints: List[int]) -> List[int]:
    g = _content(ints)
    if g > 1:
        return [c // g for c in ints]
    return ints


def _strip(ints: List[int]) -> List[int]:
    while ints and ints[-1] == 0:
        ints.pop()
    return ints


class RatPoly:
    """
    Immutable dense polynomial with Fraction coefficients, lowest degree first.

    The zero polynomial has an empty coefficient tuple and degree -1.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [as_fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: Tuple[Fraction, ...] = tuple(cs)

    @classmethod
    def x(cls) -> "RatPoly":
        return cls((0, 1))

    @classmethod
    def constant(cls, c) -> "RatPoly":
        return cls((c,))

    @classmethod
    def from_roots(cls, roots: Iterable) -> "RatPoly":
        p = cls.constant(1)
        for root in roots:
            p = p * cls((-as_fraction(root), 1))
        return p

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __call__(self, x) -> Fraction:
        x = as_fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def sign_at(self, x) -> int:
        """Exact sign of p(x), evaluated on the homogenized integer form."""
        if not self.coeffs:
            return 0
        ints = self.integer_coeffs()
        return _sign(_homogeneous_value(ints, as_fraction(x)))

    def integer_coeffs(self) -> List[int]:
        """Primitive integer coefficients with the same sign as self (positive scaling)."""
        if not self.coeffs:
            return []
        den = 1
        for c in self.coeffs:
            den = den * c.denominator // math.gcd(den, c.denominator)
        return _primitive([int(c * den) for c in self.coeffs])

    def __add__(self, other) -> "RatPoly":
        if not isinstance(other, RatPoly):
            other = RatPoly.constant(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return RatPoly(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self) -> "RatPoly":
        return RatPoly(-c for c in self.coeffs)

    def __sub__(self, other) -> "RatPoly":
        if not isinstance(other, RatPoly):
            other = RatPoly.constant(other)
        return self + (-other)

    def __rsub__(self, other) -> "RatPoly":
        return RatPoly.constant(other) - self

    def __mul__(self, other) -> "RatPoly":
        if not isinstance(other, RatPoly):
            c = as_fraction(other)
            return RatPoly(c * x for x in self.coeffs)
        if not self.coeffs or not other.coeffs:
            return RatPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            if x:
                for j, y in enumerate(other.coeffs):
                    out[i + j] += x * y
        return RatPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "RatPoly":
        if n < 0:
            raise ValidationError("Negative polynomial power", field="n", value=n)
        result, base = RatPoly.constant(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __divmod__(self, other: "RatPoly") -> Tuple["RatPoly", "RatPoly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        quot = [Fraction(0)] * max(len(rem) - len(other.coeffs) + 1, 0)
        lead = other.coeffs[-1]
        db = other.degree
        for k in range(len(quot) - 1, -1, -1):
            c = rem[k + db] / lead
            quot[k] = c
            if c:
                for i, b in enumerate(other.coeffs):
                    rem[k + i] -= c * b
        return RatPoly(quot), RatPoly(rem[:db] if db > 0 else ())

    def __floordiv__(self, other: "RatPoly") -> "RatPoly":
        return divmod(self, other)[0]

    def __mod__(self, other: "RatPoly") -> "RatPoly":
        return divmod(self, other)[1]

    def exact_div(self, other: "RatPoly") -> Optional["RatPoly"]:
        """Quotient if other divides self exactly, else None."""
        q, r = divmod(self, other)
        return q if r.is_zero() else None

    def derivative(self) -> "RatPoly":
        return RatPoly(i * c for i, c in enumerate(self.coeffs) if i)

    def compose_linear(self, a, b) -> "RatPoly":
        """p(a + b·x)."""
        lin = RatPoly((a, b))
        acc = RatPoly()
        for c in reversed(self.coeffs):
            acc = acc * lin + c
        return acc

    def shift(self, k: int) -> "RatPoly":
        """Multiply by x^k (k ≥ 0)."""
        if not self.coeffs:
            return self
        return RatPoly((0,) * k + self.coeffs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RatPoly):
            try:
                other = RatPoly.constant(other)
            except ValidationError:
                return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        if not self.coeffs:
            return "RatPoly(0)"
        terms = [f"{c}*x^{i}" for i, c in enumerate(self.coeffs) if c]
        return f"RatPoly({' + '.join(terms)})"


def _homogeneous_value(ints: Sequence[int], x: Fraction) -> int:
    """q^n·p(p/q) for x = p/q, an integer with the sign of p(x)."""
    num, den = x.numerator, x.denominator
    acc = 0
    power = 1
    for c in reversed(ints):
        acc = acc * num + c * power
        power *= den
    return acc


# Sturm sequences

@dataclass(frozen=True)
class SturmChain:
    """Primitive integer Sturm chain p, p', -rem, ... (each entry low degree first)."""
    chain: Tuple[Tuple[int, ...], ...]

    def variations(self, x: Fraction) -> int:
        signs = [_sign(_homogeneous_value(poly, x)) for poly in self.chain]
        signs = [s for s in signs if s]
        return sum(1 for s, t in zip(signs, signs[1:]) if s != t)

    def __len__(self) -> int:
        return len(self.chain)


def _remainder(a: List[int], b: List[int]) -> List[int]:
    """Positive multiple of a minus a multiple of b, of degree below deg b."""
    r = list(a)
    lead = b[-1]
    scale, sgn = abs(lead), _sign(lead)
    db = len(b) - 1
    while len(r) - 1 >= db and r:
        c = r[-1]
        k = len(r) - 1 - db
        r = [scale * x for x in r]
        for i, y in enumerate(b):
            r[k + i] -= sgn * c * y
        r.pop()
        _strip(r)
        if r:
            r = _primitive(r)
    return r


def sturm_chain(p: RatPoly) -> SturmChain:
    """
    Build the Sturm chain of p with content normalization at every step.

    Raises:
        ValidationError: If p is the zero polynomial
    """
    if p.is_zero():
        raise ValidationError("Sturm chain of the zero polynomial", field="p")
    first = p.integer_coeffs()
    chain = [first]
    if len(first) > 1:
        chain.append(_primitive(p.derivative().integer_coeffs()))
    while len(chain[-1]) > 1:
        r = _remainder(chain[-2], chain[-1])
        if not r:
            break
        g = _content(r)
        chain.append([-x // g for x in r])
    logger.debug("Sturm chain of degree %d has %d members", p.degree, len(chain))
    return SturmChain(tuple(tuple(c) for c in chain))


def sturm_count_roots(p: RatPoly, a, b) -> int:
    """
    Count distinct real roots of p in the open interval (a, b).

    Args:
        p: Nonzero polynomial
        a, b: Rational endpoints with a < b

    Returns:
        Exact number of distinct roots in (a, b)

    Raises:
        EndpointRootError: If p(a) = 0 or p(b) = 0
    """
    a, b = as_fraction(a), as_fraction(b)
    if not a < b:
        raise ValidationError(f"Empty interval ({a}, {b})", field="interval", value=(str(a), str(b)))
    if p(a) == 0:
        raise EndpointRootError(a)
    if p(b) == 0:
        raise EndpointRootError(b)
    if p.degree <= 0:
        return 0
    chain = sturm_chain(p)
    return chain.variations(a) - chain.variations(b)


# Descartes bounds on subintervals

def _shift_by_one(coeffs: List[int]) -> List[int]:
    """Coefficients of f(x + 1) from those of f, additions only."""
    a = list(coeffs)
    n = len(a) - 1
    for i in range(n):
        for j in range(n - 1, i - 1, -1):
            a[j] += a[j + 1]
    return a


def descartes_variations(ints: Sequence[int], a: Fraction, b: Fraction) -> int:
    """
    Descartes bound for the number of roots of an integer polynomial in (a, b).

    The interval is mapped onto (0, ∞) by x = a + (b − a)/(1 + t); the count of sign
    variations of the transformed coefficients bounds the root count and has its parity.
    """
    n = len(ints) - 1
    h = b - a
    big_d = a.denominator * h.denominator
    big_a = a.numerator * h.denominator
    big_b = a.denominator * h.numerator
    # D^n p((A + B u)/D) by Horner on polynomials in u
    acc = [ints[-1]]
    d_power = 1
    for c in reversed(ints[:-1]):
        d_power *= big_d
        nxt = [0] * (len(acc) + 1)
        for i, x in enumerate(acc):
            nxt[i] += big_a * x
            nxt[i + 1] += big_b * x
        nxt[0] += c * d_power
        acc = nxt
    acc = acc[:n + 1]
    transformed = _shift_by_one(list(reversed(acc)))
    signs = [_sign(x) for x in transformed if x]
    return sum(1 for s, t in zip(signs, signs[1:]) if s != t)


def _root_free(ints: List[int], a: Fraction, b: Fraction, depth: int) -> bool:
    v = descartes_variations(ints, a, b)
    if v == 0:
        return True
    if v == 1:
        return False
    if depth == 0:
        chain = sturm_chain(RatPoly(ints))
        return chain.variations(a) - chain.variations(b) == 0
    mid = (a + b) / 2
    if _homogeneous_value(ints, mid) == 0:
        return False
    return _root_free(ints, a, mid, depth - 1) and _root_free(ints, mid, b, depth - 1)


def poly_positive_on(p: RatPoly, a, b, descartes_depth: int = 8) -> bool:
    """
    Decide whether p(x) > 0 for every x in the open interval (a, b).

    Roots at the endpoints are divided out exactly first. Interior roots are excluded
    by Descartes bounds on a bisection of (a, b), falling back to a Sturm count on
    pieces that stay inconclusive at the given depth. The sign is then read at the
    midpoint.

    Args:
        p: Polynomial to test
        a, b: Rational endpoints with a < b
        descartes_depth: Bisection depth before a Sturm count is used

    Returns:
        True iff p is positive on (a, b)
    """
    a, b = as_fraction(a), as_fraction(b)
    if not a < b:
        raise ValidationError(f"Empty interval ({a}, {b})", field="interval", value=(str(a), str(b)))
    if p.is_zero():
        return False
    flip = 1
    left, right = RatPoly((-a, 1)), RatPoly((-b, 1))
    while p(a) == 0:
        p = p // left
    while p(b) == 0:
        p = p // right
        flip = -flip
    mid = (a + b) / 2
    if flip * p.sign_at(mid) <= 0:
        return False
    if p.degree <= 0:
        return True
    return _root_free(p.integer_coeffs(), a, b, descartes_depth)


# Rational intervals

@dataclass(frozen=True)
class RationalInterval:
    """Closed interval [lo, hi] with rational endpoints."""
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", as_fraction(self.lo))
        object.__setattr__(self, "hi", as_fraction(self.hi))
        if self.lo > self.hi:
            raise ValidationError(f"Interval endpoints out of order: {self.lo} > {self.hi}",
                                  field="interval", value=(str(self.lo), str(self.hi)))

    @classmethod
    def point(cls, x) -> "RationalInterval":
        x = as_fraction(x)
        return cls(x, x)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x) -> bool:
        x = as_fraction(x)
        return self.lo <= x <= self.hi

    def contains_interval(self, other: "RationalInterval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def hull(self, other: "RationalInterval") -> "RationalInterval":
        return RationalInterval(min(self.lo, other.lo), max(self.hi, other.hi))

    def _coerce(self, other) -> "RationalInterval":
        return other if isinstance(other, RationalInterval) else RationalInterval.point(other)

    def __add__(self, other) -> "RationalInterval":
        other = self._coerce(other)
        return RationalInterval(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __neg__(self) -> "RationalInterval":
        return RationalInterval(-self.hi, -self.lo)

    def __sub__(self, other) -> "RationalInterval":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "RationalInterval":
        return self._coerce(other) - self

    def __mul__(self, other) -> "RationalInterval":
        other = self._coerce(other)
        products = (self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi)
        return RationalInterval(min(products), max(products))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RationalInterval":
        other = self._coerce(other)
        if other.lo <= 0 <= other.hi:
            raise ZeroDivisionError("interval division by an interval containing 0")
        return self * RationalInterval(1 / other.hi, 1 / other.lo)

    def __pow__(self, n: int) -> "RationalInterval":
        if n == 0:
            return RationalInterval.point(1)
        ends = (self.lo ** n, self.hi ** n)
        if n % 2 == 0 and self.lo <= 0 <= self.hi:
            return RationalInterval(0, max(ends))
        return RationalInterval(min(ends), max(ends))

    def round_out(self, digits: int) -> "RationalInterval":
        """Widen to endpoints with denominator 10^digits."""
        scale = 10 ** digits
        return RationalInterval(
            Fraction(math.floor(self.lo * scale), scale),
            Fraction(math.ceil(self.hi * scale), scale),
        )

    def __repr__(self) -> str:
        return f"RationalInterval({self.lo}, {self.hi})"


# Constants

def _atan_inverse_bracket(x: int, terms: int) -> Tuple[Fraction, Fraction]:
    """Consecutive partial sums of atan(1/x); the alternating series lies between them."""
    total = Fraction(0)
    previous = None
    for k in range(terms + 1):
        previous = total
        total += Fraction((-1) ** k, (2 * k + 1) * x ** (2 * k + 1))
    return min(previous, total), max(previous, total)


@memoized("exactnum.pi", size=256)
def pi_bounds(digits: int) -> RationalInterval:
    """
    Decimal enclosure (⌊π·10^m⌋/10^m, ⌈π·10^m⌉/10^m) of π.

    π = 16·atan(1/5) − 4·atan(1/239); each arctangent is bracketed by two consecutive
    partial sums of its alternating series, and terms are added until the decimal
    floors of both brackets agree.

    Args:
        digits: Number of decimal digits m ≥ 1

    Returns:
        RationalInterval of width 10^-m containing π
    """
    if digits < 1:
        raise ValidationError("pi_bounds needs digits >= 1", field="digits", value=digits)
    scale = 10 ** digits
    terms = digits // 2 + 2
    while True:
        lo5, hi5 = _atan_inverse_bracket(5, terms)
        lo239, hi239 = _atan_inverse_bracket(239, max(terms // 3, 1))
        lo = 16 * lo5 - 4 * hi239
        hi = 16 * hi5 - 4 * lo239
        floor_lo = math.floor(lo * scale)
        if floor_lo == math.floor(hi * scale):
            return RationalInterval(Fraction(floor_lo, scale), Fraction(floor_lo + 1, scale))
        terms += 4


def _exp_positive(u: Fraction, work: int) -> RationalInterval:
    """Enclosure of e^u for u > 0 with outward rounding to `work` decimal places."""
    halvings = 0
    v = u
    while v > Fraction(1, 2):
        v /= 2
        halvings += 1
    total = Fraction(1)
    term = Fraction(1)
    k = 0
    threshold = Fraction(1, 10 ** (work + 2))
    while True:
        k += 1
        term = term * v / k
        if term < threshold:
            break
        total += term
    # remainder after the last included term is at most 2·term for v ≤ 1/2
    enclosure = RationalInterval(total, total + 2 * term).round_out(work)
    for _ in range(halvings):
        enclosure = (enclosure * enclosure).round_out(work)
    return enclosure


def exp_enclosure(u, digits: int, cap: int = 4096) -> RationalInterval:
    """
    Rigorous rational enclosure of e^u.

    Args:
        u: Rational exponent with |u| ≤ cap
        digits: Requested absolute width 10^-digits
        cap: Largest admissible |u|

    Returns:
        RationalInterval containing e^u of width at most 10^-digits

    Raises:
        ExpCapError: If |u| exceeds cap
    """
    u = as_fraction(u)
    if abs(u) > cap:
        raise ExpCapError(u, cap)
    if u == 0:
        return RationalInterval.point(1)
    target = Fraction(1, 10 ** digits)
    magnitude = math.ceil(abs(u) / math.log(10)) + 1
    work = digits + magnitude + 10
    while True:
        positive = _exp_positive(abs(u), work)
        if u > 0:
            result = positive
        else:
            result = RationalInterval(1 / positive.hi, 1 / positive.lo)
        if result.width <= target:
            rounded = result.round_out(digits + 2)
            return rounded if rounded.width <= target else result
        work += 20


@memoized("exactnum.gamma", size=256)
def exp_neg_pi_bounds(digits: int) -> RationalInterval:
    """
    Decimal enclosure (⌊e^-π·10^m⌋/10^m, ⌈e^-π·10^m⌉/10^m) of e^-π.

    Built from exp_enclosure at the endpoints of a tighter π enclosure; precision
    is raised until both bounds share their decimal floor.
    """
    if digits < 1:
        raise ValidationError("exp_neg_pi_bounds needs digits >= 1", field="digits", value=digits)
    scale = 10 ** digits
    extra = 5
    while True:
        pi = pi_bounds(digits + extra)
        lo = exp_enclosure(-pi.hi, digits + extra).lo
        hi = exp_enclosure(-pi.lo, digits + extra).hi
        floor_lo = math.floor(lo * scale)
        if floor_lo == math.floor(hi * scale):
            return RationalInterval(Fraction(floor_lo, scale), Fraction(floor_lo + 1, scale))
        extra += 5


# Precision ladder

@dataclass(frozen=True)
class PrecisionLadder:
    """
    One rung of the joint precision ladder used by the positivity conditions.

    Escalation moves every field to the next rung at once; digits never shrink
    and the split exponent never grows.
    """
    pi_digits: int = 20
    gamma_digits: int = 2
    split_exponent: int = 4
    rungs: Tuple[Tuple[int, int, int], ...] = field(default=DEFAULT_RUNGS, compare=False, repr=False)

    def __post_init__(self):
        if self.as_tuple() not in self.rungs:
            raise ValidationError(
                f"Precision {self.as_tuple()} is not a rung of the ladder",
                field="ladder", value=self.as_tuple()
            )

    @classmethod
    def bottom(cls, rungs: Sequence[Tuple[int, int, int]] = DEFAULT_RUNGS) -> "PrecisionLadder":
        rungs = tuple(tuple(r) for r in rungs)
        return cls(*rungs[0], rungs=rungs)

    @classmethod
    def from_config(cls, config) -> "PrecisionLadder":
        """Bottom rung of the ladder configured under ``precision.*``."""
        return cls.bottom(config.ladder_rungs())

    def as_tuple(self) -> Tuple[int, int, int]:
        return (self.pi_digits, self.gamma_digits, self.split_exponent)

    @property
    def position(self) -> int:
        return self.rungs.index(self.as_tuple())

    def is_top(self) -> bool:
        return self.position == len(self.rungs) - 1

    def escalate(self) -> Optional["PrecisionLadder"]:
        """Next rung, or None at the top."""
        if self.is_top():
            return None
        return PrecisionLadder(*self.rungs[self.position + 1], rungs=self.rungs)

    def pi(self) -> RationalInterval:
        return pi_bounds(self.pi_digits)

    def gamma(self) -> RationalInterval:
        """e^-π enclosure used for series evaluation (ℛ), at pi_digits."""
        return exp_neg_pi_bounds(self.pi_digits)

    def gamma_range(self) -> RationalInterval:
        """e^-π enclosure whose upper end bounds the Sturm range (0, γ₂)."""
        return exp_neg_pi_bounds(self.gamma_digits)


# Linear algebra over Fractions

def rref(rows: Sequence[Sequence], ncols: Optional[int] = None) -> Tuple[List[List[Fraction]], List[int]]:
    """
    Reduced row echelon form by Gauss-Jordan elimination.

    Pivots are taken from the entry of smallest numerator/denominator size in the
    column, which keeps Fraction growth small on the integer-heavy systems built here.

    Returns:
        (reduced nonzero rows, pivot column indices)
    """
    matrix = [[as_fraction(x) for x in row] for row in rows]
    if ncols is None:
        ncols = len(matrix[0]) if matrix else 0
    pivots: List[int] = []
    r = 0
    for col in range(ncols):
        best = None
        best_size = None
        for i in range(r, len(matrix)):
            x = matrix[i][col]
            if x:
                size = x.numerator.bit_length() + x.denominator.bit_length()
                if best is None or size < best_size:
                    best, best_size = i, size
        if best is None:
            continue
        matrix[r], matrix[best] = matrix[best], matrix[r]
        pivot_row = matrix[r]
        inv = 1 / pivot_row[col]
        pivot_row = [x * inv for x in pivot_row]
        matrix[r] = pivot_row
        for i in range(len(matrix)):
            if i != r:
                factor = matrix[i][col]
                if factor:
                    row = matrix[i]
                    matrix[i] = [x - factor * y for x, y in zip(row, pivot_row)]
        pivots.append(col)
        r += 1
        if r == len(matrix):
            break
    return matrix[:r], pivots


def nullspace(rows: Sequence[Sequence], ncols: int) -> List[List[Fraction]]:
    """Basis of {x : A x = 0}, one vector per free column."""
    if not rows:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    reduced, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        vec = [Fraction(0)] * ncols
        vec[f] = Fraction(1)
        for row, p in zip(reduced, pivots):
            vec[p] = -row[f]
        basis.append(vec)
    return basis


def integer_vector(vec: Sequence[Fraction]) -> List[int]:
    """Scale a rational vector to coprime integers, first nonzero entry positive."""
    den = 1
    for x in vec:
        den = den * x.denominator // math.gcd(den, x.denominator)
    ints = [int(x * den) for x in vec]
    g = _content(ints)
    if g == 0:
        return ints
    ints = [x // g for x in ints]
    for x in ints:
        if x:
            return ints if x > 0 else [-y for y in ints]
    return ints
