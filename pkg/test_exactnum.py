"""
Tests for the exact arithmetic layer: polynomials, Sturm counts, intervals,
constant enclosures, the precision ladder and rational linear algebra.
"""

import math
import random
import sys
from fractions import Fraction

import pytest
import sympy

sys.path.insert(0, '.')

from magicpack.core.exactnum import (
    DEFAULT_RUNGS,
    PrecisionLadder,
    RatPoly,
    RationalInterval,
    as_fraction,
    exp_enclosure,
    exp_neg_pi_bounds,
    integer_vector,
    nullspace,
    pi_bounds,
    poly_positive_on,
    rref,
    sturm_count_roots,
)
from magicpack.exceptions import EndpointRootError, ExpCapError, ValidationError
from magicpack.utils.cache import clear_all_caches


class TestAsFraction:
    """Conversion of user input to Fractions."""

    def test_accepts_int_fraction_and_string(self):
        """Ints, Fractions and "p/q" strings all convert exactly."""
        assert as_fraction(3) == Fraction(3)
        assert as_fraction(Fraction(7, 2)) == Fraction(7, 2)
        assert as_fraction(" 15/4 ") == Fraction(15, 4)

    def test_rejects_bool_and_float(self):
        """Booleans and floats are not rationals here."""
        with pytest.raises(ValidationError):
            as_fraction(True)
        with pytest.raises(ValidationError):
            as_fraction(0.5)

    def test_rejects_garbage_string(self):
        """Malformed strings raise ValidationError, not ValueError."""
        with pytest.raises(ValidationError):
            as_fraction("two")
        with pytest.raises(ValidationError):
            as_fraction("1/0")


class TestRatPoly:
    """Dense rational polynomials."""

    def test_zero_polynomial(self):
        """Trailing zeros are stripped; the zero polynomial has degree -1."""
        p = RatPoly([0, 0, 0])
        assert p.is_zero()
        assert p.degree == -1
        assert RatPoly([1, 2, 0]).degree == 1

    def test_evaluation_and_roots(self):
        """from_roots vanishes exactly at its roots."""
        p = RatPoly.from_roots([Fraction(1, 2), 3, -1])
        assert p.degree == 3
        for root in (Fraction(1, 2), 3, -1):
            assert p(root) == 0
        assert p(0) == Fraction(3, 2)

    def test_arithmetic(self):
        """Sum, product, power and exact division agree with hand expansion."""
        x = RatPoly.x()
        one = RatPoly.constant(1)
        assert (x + one) * (x - one) == x * x - one
        assert (x + one) ** 3 == RatPoly([1, 3, 3, 1])
        q, r = divmod(x ** 3 + one, x + one)
        assert q == RatPoly([1, -1, 1])
        assert r.is_zero()
        assert RatPoly([1, 1, 1]).derivative() == RatPoly([1, 2])

    def test_sign_at_matches_evaluation(self):
        """The homogenized integer sign agrees with the Fraction value."""
        p = RatPoly([Fraction(-1, 3), 0, Fraction(5, 7), -2])
        for x in (Fraction(-3, 2), Fraction(0), Fraction(1, 10), Fraction(11, 4)):
            value = p(x)
            assert p.sign_at(x) == (value > 0) - (value < 0)

    def test_integer_coeffs_are_primitive(self):
        """Integer coefficients are coprime and keep the sign of the polynomial."""
        p = RatPoly([Fraction(1, 2), Fraction(-3, 4), Fraction(1, 6)])
        ints = p.integer_coeffs()
        assert ints == [6, -9, 2]
        assert math.gcd(*ints) == 1


class TestSturm:
    """Root counting on open intervals."""

    def test_counts_distinct_roots(self):
        """A product of distinct linear factors has one root per factor inside."""
        p = RatPoly.from_roots([Fraction(1, 3), Fraction(1, 2), 2, 5])
        assert sturm_count_roots(p, 0, 1) == 2
        assert sturm_count_roots(p, 0, 10) == 4
        assert sturm_count_roots(p, 3, 4) == 0

    def test_repeated_roots_count_once(self):
        """Repeated roots are counted as distinct roots."""
        p = RatPoly.from_roots([1, 1, 1, 2])
        assert sturm_count_roots(p, 0, 3) == 2

    def test_no_real_roots(self):
        """x² + 1 has no real roots."""
        assert sturm_count_roots(RatPoly([1, 0, 1]), -100, 100) == 0

    def test_random_polynomials_against_sympy(self):
        """Distinct real roots in (a, b) agree with sympy's count on [a, b] when a, b are not roots."""
        x = sympy.Symbol("x")
        rng = random.Random(4242)
        checked = 0
        while checked < 200:
            coeffs = [rng.randint(-6, 6) for _ in range(rng.randint(2, 8))]
            if coeffs[-1] == 0:
                continue
            p = RatPoly(coeffs)
            a = Fraction(rng.randint(-40, 20), rng.choice((1, 3, 7)))
            b = a + Fraction(rng.randint(1, 40), rng.choice((1, 2, 5)))
            if p(a) == 0 or p(b) == 0:
                continue
            poly = sympy.Poly(list(reversed(coeffs)), x)
            expected = poly.count_roots(sympy.Rational(a.numerator, a.denominator),
                                        sympy.Rational(b.numerator, b.denominator))
            assert sturm_count_roots(p, a, b) == expected, (coeffs, a, b)
            checked += 1

    def test_random_products_of_known_roots(self):
        """Products of linear factors (with repeats) and x² + c factors count exactly."""
        rng = random.Random(777)
        for _ in range(200):
            roots = [Fraction(rng.randint(-30, 30), rng.choice((1, 2, 3, 4))) for _ in range(rng.randint(1, 6))]
            roots += rng.sample(roots, rng.randint(0, len(roots)))
            p = RatPoly.from_roots(roots)
            for _ in range(rng.randint(0, 2)):
                p = p * RatPoly([rng.randint(1, 9), 0, 1])
            a = Fraction(rng.randint(-200, 100), 13)
            b = a + Fraction(rng.randint(1, 300), 13)
            if a.denominator == 1 or b.denominator == 1:
                continue
            expected = len({r for r in roots if a < r < b})
            assert sturm_count_roots(p, a, b) == expected
            assert poly_positive_on(p * p + RatPoly.constant(1), a, b)

    def test_endpoint_root_raises(self):
        """A root at either endpoint is reported, not counted."""
        p = RatPoly.from_roots([1, 2])
        with pytest.raises(EndpointRootError):
            sturm_count_roots(p, 1, 3)
        with pytest.raises(EndpointRootError):
            sturm_count_roots(p, 0, 2)

    def test_empty_interval_raises(self):
        """a ≥ b is a validation error."""
        with pytest.raises(ValidationError):
            sturm_count_roots(RatPoly([1, 1]), 2, 2)


class TestPositivity:
    """poly_positive_on on open intervals."""

    def test_positive_polynomial(self):
        """A sum of squares plus a constant is positive everywhere."""
        p = RatPoly([1, 0, 1]) ** 2 + RatPoly.constant(Fraction(1, 100))
        assert poly_positive_on(p, -5, 5)

    def test_endpoint_zero_is_allowed(self):
        """Vanishing at an endpoint does not break positivity on the open interval."""
        x = RatPoly.x()
        assert poly_positive_on(x * (RatPoly.constant(1) - x), 0, 1)

    def test_interior_root_detected(self):
        """A sign change inside the interval is caught."""
        p = RatPoly.from_roots([Fraction(1, 2)])
        assert not poly_positive_on(p, 0, 1)

    def test_double_interior_root_detected(self):
        """A double root touching zero is not strictly positive."""
        p = RatPoly.from_roots([Fraction(1, 2), Fraction(1, 2)])
        assert not poly_positive_on(p, 0, 1)

    def test_negative_polynomial(self):
        """A negative constant is not positive."""
        assert not poly_positive_on(RatPoly.constant(-1), 0, 1)
        assert not poly_positive_on(RatPoly(), 0, 1)


class TestRationalInterval:
    """Closed rational intervals."""

    def test_construction_order(self):
        """lo > hi is rejected."""
        with pytest.raises(ValidationError):
            RationalInterval(2, 1)

    def test_arithmetic_contains_true_values(self):
        """Interval operations enclose every pointwise result."""
        a = RationalInterval(Fraction(-1, 2), Fraction(3, 2))
        b = RationalInterval(2, 3)
        product = a * b
        assert product.lo == Fraction(-3, 2)
        assert product.hi == Fraction(9, 2)
        assert (a + b).contains(Fraction(3))
        assert (b - a).contains(Fraction(1, 2))

    def test_even_power_through_zero(self):
        """Even powers of an interval straddling zero start at zero."""
        a = RationalInterval(-2, 1)
        assert a ** 2 == RationalInterval(0, 4)
        assert a ** 3 == RationalInterval(-8, 1)

    def test_round_out_widens(self):
        """Rounding outward never loses the original interval."""
        a = RationalInterval(Fraction(1, 3), Fraction(2, 3))
        rounded = a.round_out(3)
        assert rounded.contains_interval(a)
        assert rounded.lo == Fraction(333, 1000)
        assert rounded.hi == Fraction(667, 1000)


class TestConstants:
    """Decimal enclosures of π and e^-π."""

    def setup_method(self):
        clear_all_caches()

    def test_pi_two_digits(self):
        """π lies in [3.14, 3.15]."""
        bounds = pi_bounds(2)
        assert bounds.lo == Fraction(314, 100)
        assert bounds.hi == Fraction(315, 100)

    def test_pi_twenty_digits(self):
        """Twenty digits of π are exact."""
        bounds = pi_bounds(20)
        assert bounds.lo == Fraction(314159265358979323846, 10 ** 20)
        assert bounds.width == Fraction(1, 10 ** 20)

    def test_exp_neg_pi(self):
        """e^-π = 0.0432139182..."""
        assert exp_neg_pi_bounds(2) == RationalInterval(Fraction(4, 100), Fraction(5, 100))
        assert exp_neg_pi_bounds(10).lo == Fraction(432139182, 10 ** 10)

    def test_exp_enclosure(self):
        """exp_enclosure brackets e^u within the requested width."""
        for u in (Fraction(1), Fraction(-5, 2), Fraction(37, 3)):
            enclosure = exp_enclosure(u, 15)
            assert enclosure.width <= Fraction(1, 10 ** 15)
            assert enclosure.lo <= Fraction(math.exp(u)) * (1 + Fraction(1, 10 ** 12))
            assert enclosure.hi >= Fraction(math.exp(u)) * (1 - Fraction(1, 10 ** 12))
        assert exp_enclosure(0, 5) == RationalInterval.point(1)

    def test_exp_cap(self):
        """Exponents beyond the cap are refused."""
        with pytest.raises(ExpCapError):
            exp_enclosure(5000, 10)
        with pytest.raises(ExpCapError):
            exp_enclosure(-11, 10, cap=10)

    def test_invalid_digits(self):
        """Zero digits is a validation error."""
        with pytest.raises(ValidationError):
            pi_bounds(0)


class TestPrecisionLadder:
    """Joint escalation of π digits, γ digits and split exponent."""

    def test_bottom_and_escalation(self):
        """Each escalation moves to the next rung; the top has no successor."""
        ladder = PrecisionLadder.bottom()
        seen = [ladder.as_tuple()]
        while not ladder.is_top():
            ladder = ladder.escalate()
            seen.append(ladder.as_tuple())
        assert tuple(seen) == DEFAULT_RUNGS
        assert ladder.escalate() is None

    def test_monotone_rungs(self):
        """Digits never shrink and the split exponent never grows."""
        for lower, upper in zip(DEFAULT_RUNGS, DEFAULT_RUNGS[1:]):
            assert upper[0] >= lower[0]
            assert upper[1] >= lower[1]
            assert upper[2] <= lower[2]

    def test_off_ladder_rejected(self):
        """A precision that is not a rung is invalid."""
        with pytest.raises(ValidationError):
            PrecisionLadder(30, 2, 4)

    def test_enclosures(self):
        """The ladder hands out π and γ enclosures at its precision."""
        ladder = PrecisionLadder.bottom()
        assert ladder.pi().width == Fraction(1, 10 ** 20)
        assert ladder.gamma_range() == RationalInterval(Fraction(4, 100), Fraction(5, 100))


class TestLinearAlgebra:
    """rref, nullspace and integer scaling."""

    def test_rref_pivots(self):
        """A rank-2 system has two pivots."""
        reduced, pivots = rref([[1, 2, 3], [2, 4, 7], [3, 6, 10]])
        assert pivots == [0, 2]
        assert len(reduced) == 2

    def test_nullspace(self):
        """Nullspace vectors are annihilated by the matrix."""
        rows = [[1, 2, 3, 4], [0, 1, 1, 1]]
        basis = nullspace(rows, 4)
        assert len(basis) == 2
        for vec in basis:
            for row in rows:
                assert sum(Fraction(a) * b for a, b in zip(row, vec)) == 0

    def test_nullspace_of_empty_system(self):
        """No equations leave the whole space free."""
        assert len(nullspace([], 3)) == 3

    def test_integer_vector(self):
        """Scaling clears denominators, removes content and fixes the sign."""
        vec = [Fraction(-1, 2), Fraction(3, 4), Fraction(0)]
        assert integer_vector(vec) == [2, -3, 0]
