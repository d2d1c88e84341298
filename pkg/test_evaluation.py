"""
Tests for float and certified evaluation of H and Ĥ.
"""

import shutil
import sys
import tempfile
from fractions import Fraction

import mpmath
import pytest

sys.path.insert(0, '.')

from magicpack.config.manager import load_config, set_global_config
from magicpack.core import evaluation
from magicpack.core.evaluation import (
    CertifiedEvaluator,
    FloatEvaluator,
    Mode,
    Side,
    check_sign_48_float,
    estimate_last_sign_change,
    evaluate_h,
    nearest_even,
    sample_grid,
    sin_squared_enclosure,
)
from magicpack.core.magic import clear_magic_functions, compute_params, magic_function
from magicpack.exceptions import PoleProximityError, RegionError, ValidationError
from magicpack.utils.cache import clear_all_caches


class TestHelpers:
    """Small helpers that need no magic function."""

    def test_side_parse(self):
        assert Side.parse("h") is Side.H
        assert Side.parse("H_HAT") is Side.H_HAT
        assert Side.parse(Side.H) is Side.H
        with pytest.raises(ValidationError):
            Side.parse("g")

    def test_mode(self):
        assert Mode("certified") is Mode.CERTIFIED
        with pytest.raises(ValueError):
            Mode("exact")

    def test_sample_grid(self):
        """Midpoints of a step partition."""
        assert sample_grid(Fraction(0), Fraction(1), Fraction(1, 4)) == [
            Fraction(1, 8), Fraction(3, 8), Fraction(5, 8), Fraction(7, 8)
        ]
        assert sample_grid(Fraction(0), Fraction(0), Fraction(1, 4)) == []

    def test_grid_avoids_even_integers(self):
        for s in sample_grid(Fraction(0), Fraction(10), Fraction(1, 200)):
            assert nearest_even(s) != s

    def test_nearest_even(self):
        assert nearest_even(Fraction(13, 2)) == 6
        assert nearest_even(Fraction(5, 2)) == 2
        assert nearest_even(Fraction(0)) == 0

    def test_sin_squared_enclosure(self):
        """sin²(πs/2) at 0, 1/2, 1 and 2."""
        assert sin_squared_enclosure(0).hi == 0
        assert sin_squared_enclosure(2).hi == 0
        assert sin_squared_enclosure(Fraction(1, 2)).contains(Fraction(1, 2))
        assert sin_squared_enclosure(1).contains(1)
        assert sin_squared_enclosure(Fraction(1, 2), 30).width < Fraction(1, 10 ** 25)

    def test_sin_squared_is_periodic(self):
        """s and s + 2 give the same enclosure."""
        assert sin_squared_enclosure(Fraction(1, 3)) == sin_squared_enclosure(Fraction(7, 3))


class EvaluationTestBase:
    def setup_method(self):
        self.temp_dir = tempfile.mkdtemp()
        set_global_config(load_config(config_dict={"cache": {"enabled": False, "directory": self.temp_dir}}))
        clear_magic_functions()

    def teardown_method(self):
        clear_magic_functions()
        clear_all_caches()
        set_global_config(None)
        shutil.rmtree(self.temp_dir, ignore_errors=True)


class TestFloatEvaluator(EvaluationTestBase):
    """mpmath evaluation."""

    def test_negative_s(self):
        evaluator = FloatEvaluator(magic_function(8, use_cache=False), Side.H)
        with pytest.raises(ValidationError):
            evaluator(-1)

    def test_pole_proximity(self):
        """Points within the pole tolerance of an even integer are refused."""
        evaluator = FloatEvaluator(magic_function(8, use_cache=False), Side.H)
        with pytest.raises(PoleProximityError):
            evaluator(2 + Fraction(1, 10 ** 8))

    def test_no_sign_change_for_8(self):
        """The scan interval (0, a−2) is empty for d = 8."""
        assert estimate_last_sign_change(8) == 0

    def test_scan_uses_configured_digits(self, monkeypatch):
        """The sign scan evaluates at evaluation.float_digits unless told otherwise."""
        set_global_config(load_config(config_dict={
            "cache": {"enabled": False, "directory": self.temp_dir},
            "evaluation": {"float_digits": 45},
        }))
        seen = []

        class Recording(FloatEvaluator):
            def __init__(self, *args, **kwargs):
                super().__init__(*args, **kwargs)
                seen.append(self.digits)

        monkeypatch.setattr(evaluation, "FloatEvaluator", Recording)
        estimate_last_sign_change(8)
        estimate_last_sign_change(8, digits=80)
        assert seen == [45, 80]

    @pytest.mark.slow
    def test_value_at_origin(self):
        """H(0) = Ĥ(0) for the solved functions."""
        for d in (8, 24):
            fn = magic_function(d, use_cache=False)
            h0 = FloatEvaluator(fn, Side.H)(0)
            hhat0 = FloatEvaluator(fn, Side.H_HAT)(0)
            assert h0 != 0
            assert abs(h0 / hhat0 - 1) < mpmath.mpf("1e-9")

    @pytest.mark.slow
    def test_roots_at_lattice_norms(self):
        """Ĥ vanishes at even s ≥ a for d = 8."""
        evaluator = FloatEvaluator(magic_function(8, use_cache=False), Side.H_HAT)
        for s in (4, 6, 8):
            assert abs(evaluator(s)) < mpmath.mpf("1e-20") * abs(evaluator(0))

    @pytest.mark.slow
    def test_signs_48(self):
        """H < 0 between the forbidden norms 6 and 8 and positive elsewhere."""
        evaluator = FloatEvaluator(magic_function(48, use_cache=False), Side.H)
        for s in (Fraction(13, 2), 7, Fraction(15, 2)):
            assert evaluator(s) < 0
        for s in (1, 3, 5, 9):
            assert evaluator(s) > 0
        assert check_sign_48_float(48)

    @pytest.mark.slow
    def test_sign_change_table(self):
        """Estimates agree with the bundled c_d values."""
        for d in (24, 48):
            assert estimate_last_sign_change(d) == 0
        for d in (32, 56, 72, 80):
            estimate = estimate_last_sign_change(d)
            assert abs(estimate - compute_params(d).c) <= Fraction(2, 1000), (d, estimate)


class TestCertifiedEvaluator(EvaluationTestBase):
    """Rational enclosures."""

    def test_region(self):
        """Ĥ needs s > a−2 and H needs s > l."""
        fn = magic_function(24, use_cache=False)
        assert CertifiedEvaluator(fn, Side.H_HAT).region == 2
        assert CertifiedEvaluator(fn, Side.H).region == 4
        with pytest.raises(RegionError):
            CertifiedEvaluator(fn, Side.H_HAT)(2)
        with pytest.raises(RegionError):
            evaluate_h(fn, 3, mode="certified", side="h")

    @pytest.mark.slow
    def test_enclosure_contains_float_value(self):
        """The certified interval brackets the mpmath value."""
        fn = magic_function(8, use_cache=False)
        s = Fraction(5, 2)
        enclosure = evaluate_h(fn, s, mode="certified", side="hhat")
        value = evaluate_h(fn, s, mode="float", side="hhat")
        assert mpmath.mpf(enclosure.lo.numerator) / enclosure.lo.denominator <= value
        assert value <= mpmath.mpf(enclosure.hi.numerator) / enclosure.hi.denominator
