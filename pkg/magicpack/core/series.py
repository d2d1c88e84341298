"""
Truncated r-series with w-polynomial coefficients

An RSeries stores a Laurent expansion in r = e^{πiz} whose coefficients are
polynomials of degree at most 2 in w = −πiz:

    Σ_{n=start}^{order} (c0_n + c1_n·w + c2_n·w²) r^n + O(r^{order+1})

Coefficients are ints or Fractions. The truncation order is tracked pessimistically
through every operation and checked on every read.
"""

import logging
import math
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

from ..exceptions import NonUnitError, TruncationError, ValidationError, WDegreeError

logger = logging.getLogger(__name__)

MAX_W_DEGREE = 2
KRONECKER_THRESHOLD = 32


def _normalize(value):
    """Collapse integral Fractions to int."""
    if isinstance(value, Fraction) and value.denominator == 1:
        return value.numerator
    return value


def _scaled_ints(values: Sequence) -> Tuple[List[int], int]:
    den = 1
    for v in values:
        if isinstance(v, Fraction):
            den = den * v.denominator // math.gcd(den, v.denominator)
    if den == 1:
        return [int(v) for v in values], 1
    return [int(v * den) for v in values], den


def _pack(values: Sequence[int], bits: int) -> int:
    acc = 0
    for v in reversed(values):
        acc = (acc << bits) + v
    return acc


def _kronecker(x: Sequence[int], y: Sequence[int], length: int) -> List[int]:
    """First `length` coefficients of x·y via one big-integer product (signed digits)."""
    bound = max(abs(v) for v in x) * max(abs(v) for v in y) * min(len(x), len(y))
    if bound == 0:
        return [0] * length
    nbytes = (bound.bit_length() + 2 + 7) // 8
    bits = nbytes * 8
    product = _pack(x, bits) * _pack(y, bits)
    negative = product < 0
    if negative:
        product = -product
    raw = product.to_bytes(nbytes * (len(x) + len(y)) + 1, "little")
    half, full = 1 << (bits - 1), 1 << bits
    out = []
    carry = 0
    for i in range(length):
        digit = int.from_bytes(raw[i * nbytes:(i + 1) * nbytes], "little") + carry
        if digit >= half:
            digit -= full
            carry = 1
        else:
            carry = 0
        out.append(-digit if negative else digit)
    return out


def _schoolbook(x: Sequence, y: Sequence, length: int) -> List:
    out = [0] * length
    for i, u in enumerate(x[:length]):
        if u:
            limit = min(len(y), length - i)
            for j in range(limit):
                v = y[j]
                if v:
                    out[i + j] += u * v
    return out


def mul_lists(x: Sequence, y: Sequence, length: int) -> List:
    """
    Truncated Cauchy product of two coefficient lists.

    Long lists are multiplied by Kronecker substitution after clearing denominators;
    short lists use the schoolbook product.
    """
    if length <= 0:
        return []
    x, y = list(x[:length]), list(y[:length])
    if not x or not y:
        return [0] * length
    if min(len(x), len(y)) < KRONECKER_THRESHOLD:
        return [_normalize(v) for v in _schoolbook(x, y, length)]
    xi, dx = _scaled_ints(x)
    yi, dy = _scaled_ints(y)
    ints = _kronecker(xi, yi, length)
    den = dx * dy
    if den == 1:
        return ints
    return [_normalize(Fraction(v, den)) for v in ints]


class RSeries:
    """
    Immutable truncated series in r with coefficients in Q[w]_{≤2}.

    Attributes:
        start: Lowest r-exponent stored
        order: Highest known r-exponent; terms above it are unknown
        parts: Three coefficient tuples (w⁰, w¹, w²), each of length order − start + 1,
            or None where the component is absent
    """

    __slots__ = ("start", "order", "parts")

    def __init__(self, start: int, order: int, parts: Sequence[Optional[Sequence]]):
        if order < start - 1:
            raise ValidationError(f"Series order {order} below start {start}", field="order", value=order)
        length = order - start + 1
        normalized = []
        for i in range(MAX_W_DEGREE + 1):
            part = parts[i] if i < len(parts) else None
            if part is not None:
                part = tuple(_normalize(v) for v in part)
                if len(part) != length:
                    raise ValidationError(
                        f"w^{i} component has {len(part)} coefficients, expected {length}",
                        field="parts", value=len(part)
                    )
                if not any(part):
                    part = None
            normalized.append(part)
        self.start = start
        self.order = order
        self.parts: Tuple[Optional[Tuple], ...] = tuple(normalized)

    # Construction

    @classmethod
    def from_coeffs(cls, coeffs: Iterable, start: int = 0, order: Optional[int] = None,
                    w_power: int = 0) -> "RSeries":
        """Series c_0 r^start + c_1 r^{start+1} + ... carrying w^w_power."""
        values = list(coeffs)
        if order is None:
            order = start + len(values) - 1
        length = order - start + 1
        values = (values + [0] * length)[:length]
        parts = [None, None, None]
        parts[w_power] = values
        return cls(start, order, parts)

    @classmethod
    def zero(cls, order: int, start: int = 0) -> "RSeries":
        return cls(start, order, (None, None, None))

    @classmethod
    def one(cls, order: int) -> "RSeries":
        return cls.monomial(0, order)

    @classmethod
    def monomial(cls, r_power: int, order: int, coefficient=1, w_power: int = 0) -> "RSeries":
        """coefficient·w^w_power·r^r_power known up to r^order."""
        return cls.from_coeffs([coefficient], start=r_power, order=order, w_power=w_power)

    # Inspection

    @property
    def w_degree(self) -> int:
        for i in range(MAX_W_DEGREE, -1, -1):
            if self.parts[i] is not None:
                return i
        return 0

    def __len__(self) -> int:
        return self.order - self.start + 1

    def is_zero(self) -> bool:
        return all(p is None for p in self.parts)

    def coeff(self, w_power: int, r_power: int):
        """
        Exact coefficient of w^w_power r^r_power.

        Raises:
            TruncationError: If r_power is outside [start, order]
        """
        if not 0 <= w_power <= MAX_W_DEGREE:
            raise ValidationError(f"w-power must be in 0..{MAX_W_DEGREE}", field="w_power", value=w_power)
        if not self.start <= r_power <= self.order:
            raise TruncationError(r_power, self.start, self.order)
        part = self.parts[w_power]
        return 0 if part is None else part[r_power - self.start]

    def coeff_or_zero(self, w_power: int, r_power: int):
        """Coefficient with exponents below start read as zero (the series has none there)."""
        if r_power < self.start and r_power <= self.order:
            return 0
        return self.coeff(w_power, r_power)

    def coefficients(self, w_power: int = 0) -> List:
        part = self.parts[w_power]
        return list(part) if part is not None else [0] * len(self)

    def lowest_nonzero(self) -> Optional[int]:
        """Smallest r-exponent with a nonzero coefficient in any w-component."""
        for idx in range(len(self)):
            if any(p is not None and p[idx] for p in self.parts):
                return self.start + idx
        return None

    def is_q_series(self) -> bool:
        """True when every odd r-exponent has a zero coefficient."""
        for part in self.parts:
            if part is None:
                continue
            for idx, value in enumerate(part):
                if value and (self.start + idx) % 2:
                    return False
        return True

    # Reshaping

    def truncate(self, order: int) -> "RSeries":
        if order >= self.order:
            return self
        keep = max(order - self.start + 1, 0)
        return RSeries(self.start, order, [p[:keep] if p is not None else None for p in self.parts])

    def extend(self, order: int) -> "RSeries":
        """Read the stored terms as a polynomial and pad zero terms up to r^order."""
        if order <= self.order:
            return self
        pad = (0,) * (order - self.order)
        return RSeries(self.start, order, [p + pad if p is not None else None for p in self.parts])

    def with_start(self, start: int) -> "RSeries":
        """Re-index from a lower start (padding zeros) or a higher one (dropping zero terms)."""
        if start == self.start:
            return self
        if start < self.start:
            pad = (0,) * (self.start - start)
            return RSeries(start, self.order, [pad + p if p is not None else None for p in self.parts])
        drop = start - self.start
        for p in self.parts:
            if p is not None and any(p[:drop]):
                raise ValidationError(f"Cannot raise start to {start}: nonzero terms below it",
                                      field="start", value=start)
        return RSeries(start, self.order, [p[drop:] if p is not None else None for p in self.parts])

    def shift(self, k: int) -> "RSeries":
        """Multiply by r^k."""
        return RSeries(self.start + k, self.order + k, self.parts)

    def substitute_neg(self) -> "RSeries":
        """r → −r (the T-translation z → z+1 acts this way on r-series)."""
        def flip(part):
            if part is None:
                return None
            return [(-v if (self.start + i) % 2 else v) for i, v in enumerate(part)]
        return RSeries(self.start, self.order, [flip(p) for p in self.parts])

    def part(self, w_power: int) -> "RSeries":
        """The w^w_power component as a w-free series."""
        return RSeries(self.start, self.order, (self.parts[w_power], None, None))

    def times_w(self, times: int = 1) -> "RSeries":
        """Multiply by w^times."""
        parts = list(self.parts)
        for _ in range(times):
            if parts[MAX_W_DEGREE] is not None:
                raise WDegreeError(MAX_W_DEGREE + 1)
            parts = [None] + parts[:MAX_W_DEGREE]
        return RSeries(self.start, self.order, parts)

    # Arithmetic

    def _aligned(self, other: "RSeries") -> Tuple[int, int]:
        return min(self.start, other.start), min(self.order, other.order)

    def __add__(self, other: "RSeries") -> "RSeries":
        if not isinstance(other, RSeries):
            return NotImplemented
        start, order = self._aligned(other)
        length = order - start + 1
        parts = []
        for pa, pb in zip(self.parts, other.parts):
            if pa is None and pb is None:
                parts.append(None)
                continue
            out = [0] * length
            for src, series in ((pa, self), (pb, other)):
                if src is None:
                    continue
                offset = series.start - start
                for i in range(max(0, -offset), min(len(src), length - offset)):
                    out[offset + i] += src[i]
            parts.append(out)
        return RSeries(start, order, parts)

    def __neg__(self) -> "RSeries":
        return RSeries(self.start, self.order, [[-v for v in p] if p is not None else None for p in self.parts])

    def __sub__(self, other: "RSeries") -> "RSeries":
        return self + (-other)

    def scale(self, factor) -> "RSeries":
        factor = _normalize(Fraction(factor)) if not isinstance(factor, int) else factor
        return RSeries(self.start, self.order,
                       [[factor * v for v in p] if p is not None else None for p in self.parts])

    def __mul__(self, other) -> "RSeries":
        if not isinstance(other, RSeries):
            return self.scale(other)
        start = self.start + other.start
        order = min(self.order + other.start, other.order + self.start)
        length = order - start + 1
        parts: List[Optional[List]] = [None, None, None]
        for i, pa in enumerate(self.parts):
            if pa is None:
                continue
            for j, pb in enumerate(other.parts):
                if pb is None:
                    continue
                if i + j > MAX_W_DEGREE:
                    raise WDegreeError(i + j)
                product = mul_lists(pa, pb, length)
                if parts[i + j] is None:
                    parts[i + j] = product
                else:
                    parts[i + j] = [u + v for u, v in zip(parts[i + j], product)]
        return RSeries(start, order, parts)

    def __rmul__(self, other) -> "RSeries":
        return self.scale(other)

    def __pow__(self, n: int) -> "RSeries":
        if n < 0:
            return self.inv_pow(-n)
        result = None
        base = self
        while n:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if n:
                base = base * base
        if result is None:
            return RSeries.one(len(self) - 1)
        return result

    def inv_pow(self, n: int, order: Optional[int] = None) -> "RSeries":
        """
        The series raised to the power −n.

        The lowest nonzero coefficient must be a nonzero constant and the series must be
        w-free. With relative precision L = order − start, the result starts at −n·start
        and is known up to −n·start + L.

        Raises:
            NonUnitError: If the series is w-dependent or vanishes to its truncation order
        """
        if n < 0:
            raise ValidationError("inv_pow needs a nonnegative exponent", field="n", value=n)
        if self.w_degree > 0:
            raise NonUnitError("Only w-free series can be inverted", start=self.start)
        low = self.lowest_nonzero()
        if low is None:
            raise NonUnitError("Series vanishes to its truncation order", start=self.start)
        base = self.with_start(low)
        precision = base.order - base.start
        if n == 0:
            result = RSeries.one(precision)
        else:
            coeffs = base.coefficients(0)
            lead = coeffs[0]
            unit = lead in (1, -1)
            inv = [lead if unit else 1 / Fraction(lead)]
            for m in range(1, precision + 1):
                acc = 0
                for i in range(1, m + 1):
                    c = coeffs[i]
                    if c:
                        acc += c * inv[m - i]
                inv.append(-acc * lead if unit else -acc / lead)
            reciprocal = RSeries.from_coeffs(inv, start=0, order=precision)
            result = reciprocal ** n
            result = result.truncate(precision)
        result = result.shift(-n * low)
        if order is not None:
            result = result.truncate(order)
        return result

    def evaluate(self, x, w=0):
        """Σ (c0 + c1·w + c2·w²)·x^n over the stored terms (exact or mpmath arguments)."""
        total = 0
        ws = (1, w, w * w)
        power = x ** self.start
        for idx in range(len(self)):
            coefficient = 0
            for i, part in enumerate(self.parts):
                if part is not None and part[idx]:
                    coefficient += part[idx] * ws[i]
            if coefficient:
                total += coefficient * power
            power *= x
        return total

    def __eq__(self, other) -> bool:
        if not isinstance(other, RSeries):
            return NotImplemented
        return (self.start, self.order, self.parts) == (other.start, other.order, other.parts)

    def __hash__(self) -> int:
        return hash((self.start, self.order, self.parts))

    def __repr__(self) -> str:
        terms = []
        for idx in range(min(len(self), 6)):
            n = self.start + idx
            bits = []
            for i, part in enumerate(self.parts):
                if part is not None and part[idx]:
                    bits.append(f"{part[idx]}" + ("" if i == 0 else "w" if i == 1 else "w^2"))
            if bits:
                terms.append(f"({' + '.join(bits)})r^{n}")
        return f"RSeries({' + '.join(terms) or '0'} + O(r^{self.order + 1}))"


def series_add(a: RSeries, b: RSeries) -> RSeries:
    return a + b


def series_neg(a: RSeries) -> RSeries:
    return -a


def series_scale(a: RSeries, factor) -> RSeries:
    return a.scale(factor)


def series_mul(a: RSeries, b: RSeries) -> RSeries:
    return a * b


def series_inv_pow(a: RSeries, n: int, order: Optional[int] = None) -> RSeries:
    """a^{−n}; see RSeries.inv_pow."""
    return a.inv_pow(n, order)


def coeff(a: RSeries, w_power: int, r_power: int):
    return a.coeff(w_power, r_power)
