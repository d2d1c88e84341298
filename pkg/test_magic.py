"""
Tests for magic function parameters, basis solves, truncation orders and certificates.
"""

import shutil
import sys
import tempfile
from fractions import Fraction

import pytest

sys.path.insert(0, '.')

from magicpack.config.manager import load_config, set_global_config
from magicpack.core.exactnum import PrecisionLadder
from magicpack.core.magic import (
    MagicCertificate,
    choose_n,
    clear_magic_functions,
    compute_params,
    geometric_tail,
    load_cnumbers,
    magic_function,
    parameters_table,
    phi_basis,
    psi_basis,
    solve_c_vectors,
    step3_residuals,
    tail_majorant,
    verify_magic,
    verify_many,
)
from magicpack.exceptions import (
    ConditionFailedError,
    DimensionCapError,
    DimensionError,
    DimensionExcludedError,
    LadderExhaustedError,
)
from magicpack.utils.cache import clear_all_caches

C_PHI_48 = [2 ** 7 * 3 ** 8 * c for c in (29393, 117572, 307819, 511955, 539410, 362729, 152114, 36480, 3840)]
C_PSI_48 = [565675, 7394933, -38880096, 44550063, 41316945, -107522880, 39169185, 40077567,
            -32756064, 5294597, 790075]


class MagicTestBase:
    """Isolated configuration with the on-disk cache pointed at a temporary directory."""

    def setup_method(self):
        self.temp_dir = tempfile.mkdtemp()
        self.config = load_config(config_dict={"cache": {"enabled": False, "directory": self.temp_dir}})
        set_global_config(self.config)
        clear_magic_functions()

    def teardown_method(self):
        clear_magic_functions()
        clear_all_caches()
        set_global_config(None)
        shutil.rmtree(self.temp_dir, ignore_errors=True)


class TestParams(MagicTestBase):
    """Dimension parameters."""

    def test_known_dimensions(self):
        """(a, l, k, b) for d = 8, 24, 48."""
        for d, expected in ((8, (2, 2, 10, 1)), (24, (4, 4, 14, 1)), (48, (6, 10, 38, 2))):
            p = compute_params(d)
            assert (p.a, p.l, p.k, p.b) == expected

    def test_widths_for_48(self):
        """Nine theta monomials and eleven Eisenstein monomials in d = 48."""
        p = compute_params(48)
        assert p.theta_width == 9
        assert p.eisenstein_width == 11
        assert p.forbidden_norms == (6, 8, 10)
        assert p.distance_set_squared == (Fraction(1), Fraction(4, 3), Fraction(5, 3))

    def test_invariants_over_table(self):
        """k ≡ 2 mod 4 and b = ⌈k/6⌉ − l/2 for every admissible d."""
        for p in parameters_table(200):
            assert p.k % 4 == 2
            assert p.b == p.expected_dimension
            assert p.b >= 1
            assert not p.excluded

    def test_table_skips_excluded(self):
        """d ≡ 16 mod 24 is left out unless requested."""
        assert [p.d for p in parameters_table(48)] == [8, 24, 32, 48]
        assert [p.d for p in parameters_table(48, include_excluded=True)] == [8, 16, 24, 32, 40, 48]

    def test_excluded_dimension(self):
        """d = 16 raises unless explicitly allowed."""
        with pytest.raises(DimensionExcludedError):
            compute_params(16)
        assert compute_params(16, allow_excluded=True).excluded

    def test_invalid_dimensions(self):
        """Non-multiples of 8, zero and booleans are rejected."""
        for bad in (0, 12, -8, True, 8.0):
            with pytest.raises(DimensionError):
                compute_params(bad)

    def test_dimension_cap(self):
        """d above the cap is refused."""
        with pytest.raises(DimensionCapError):
            compute_params(224)
        assert compute_params(224, dimension_cap=1200).d == 224

    def test_spectral_thresholds(self):
        """c_d comes from the bundled table."""
        table = load_cnumbers()
        assert table[16] is None
        assert compute_params(8).c == 0
        assert compute_params(32).c == Fraction("1.5880")
        assert compute_params(80).c == Fraction("5.5790")

    def test_to_dict(self):
        """Parameters serialize c as a rational string."""
        data = compute_params(32).to_dict()
        assert data["d"] == 32
        assert data["c"] == "397/250"


class TestTailMajorant(MagicTestBase):
    """Truncation order bookkeeping."""

    def test_geometric_tail_exact_case(self):
        """Σ_{n>0} 2^-n = 1."""
        assert geometric_tail(0, 0, Fraction(1, 2)) == 1

    def test_geometric_tail_divergent_ratio(self):
        """A term ratio ≥ 1 gives no bound."""
        assert geometric_tail(0, 10, Fraction(1, 2)) is None

    def test_majorant_decreases(self):
        """A larger N never gives a larger majorant."""
        p = compute_params(8)
        fn = magic_function(8, use_cache=False)
        values = [tail_majorant(p, fn.c_phi, fn.c_psi, n).value for n in (fn.n_trunc, fn.n_trunc + 40)]
        assert values[0] is not None and values[1] <= values[0]
        assert tail_majorant(p, fn.c_phi, fn.c_psi, fn.n_trunc).below_one()

    def test_choose_n_is_minimal(self):
        """The step before N does not bound the tails."""
        p = compute_params(8)
        fn = magic_function(8, use_cache=False)
        n = choose_n(p, fn.c_phi, fn.c_psi, strict=True, n_step=10)
        assert n == fn.n_trunc
        assert (n - p.l) % 10 == 0
        if n - 10 > p.l:
            assert not tail_majorant(p, fn.c_phi, fn.c_psi, n - 10).below_one()


class TestSolve(MagicTestBase):
    """Basis solves and the C-vector system."""

    def test_bases_have_rank_b(self):
        """Both bases reach dimension b."""
        p = compute_params(24)
        assert len(phi_basis(p).matrix) == p.b
        assert len(psi_basis(p).matrix) == p.b

    def test_c_vectors_are_coprime_integers(self):
        """Vectors come back as coprime integers with a positive leading entry."""
        from math import gcd

        p = compute_params(8)
        c_phi, c_psi = solve_c_vectors(phi_basis(p), psi_basis(p), p)
        assert len(c_phi) == p.theta_width
        assert len(c_psi) == p.eisenstein_width
        assert gcd(*(c_phi + c_psi)) == 1
        assert next(c for c in c_phi + c_psi if c) > 0

    def test_residuals_vanish(self):
        """The solved pair satisfies the matching equations exactly."""
        for d in (8, 24):
            fn = magic_function(d, use_cache=False)
            assert all(r == 0 for r in step3_residuals(fn))

    def test_memoized_per_process(self):
        """A second request returns the same object."""
        first = magic_function(8, use_cache=False)
        assert magic_function(8, use_cache=False) is first

    def test_disk_cache_roundtrip(self):
        """Solutions written to the cache directory are read back identically."""
        fn = magic_function(8, use_cache=True)
        clear_magic_functions()
        again = magic_function(8, use_cache=True)
        assert again is not fn
        assert (again.c_phi, again.c_psi, again.n_trunc) == (fn.c_phi, fn.c_psi, fn.n_trunc)

    @pytest.mark.slow
    def test_golden_vectors_48(self):
        """C_φ, C_ψ and N = 130 in dimension 48."""
        fn = magic_function(48, strict=True, use_cache=False)
        assert list(fn.c_phi) == C_PHI_48
        assert list(fn.c_psi) == C_PSI_48
        assert fn.n_trunc == 130


class TestCertificate(MagicTestBase):
    """Certificate status and serialization."""

    def _certificate(self, checks):
        return MagicCertificate(compute_params(8), (1, 2), (3,), 40, PrecisionLadder.bottom(), checks)

    def test_valid(self):
        cert = self._certificate({"I": True, "II": True, "VII": True})
        assert cert.valid
        assert cert.failed == []
        cert.raise_for_status()

    def test_empty_checks_are_not_valid(self):
        assert not self._certificate({}).valid

    def test_exact_failure(self):
        """A failed exact condition is a hard failure."""
        cert = self._certificate({"I": False, "VII": False})
        with pytest.raises(ConditionFailedError) as info:
            cert.raise_for_status()
        assert info.value.condition == "I"

    def test_precision_failure(self):
        """Only precision-dependent failures exhaust the ladder."""
        cert = self._certificate({"I": True, "VI": False, "VII": False})
        with pytest.raises(LadderExhaustedError) as info:
            cert.raise_for_status()
        assert info.value.failed == ["VI", "VII"]

    def test_to_dict(self):
        """Serialized certificates carry parameters, vectors, ladder and checks."""
        data = self._certificate({"II": True, "I": True}).to_dict()
        assert data["C_phi"] == [1, 2]
        assert data["N"] == 40
        assert data["ladder"] == {"pi_digits": 20, "gamma_digits": 2, "split_exponent": 4}
        assert list(data["checks"]) == ["I", "II"]
        assert data["valid"] is True
        assert "runtime_secs" not in data
        assert "runtime_secs" in self._certificate({"I": True}).to_dict(include_timing=True)


class TestVerify(MagicTestBase):
    """End-to-end certification."""

    def test_excluded_dimension(self):
        with pytest.raises(DimensionExcludedError):
            verify_magic(40)

    def test_verify_many_validates_first(self):
        """Every dimension is checked before any work starts."""
        with pytest.raises(DimensionError):
            verify_many([8, 12])

    @pytest.mark.slow
    def test_verify_small_dimensions(self):
        """d = 8 and d = 24 certify."""
        for d in (8, 24):
            cert = verify_magic(d, use_cache=False)
            assert cert.valid, cert.failed
            assert set(cert.checks) >= {"I", "II", "III", "IV", "V", "VI", "VII"}

    @pytest.mark.slow
    def test_verify_48(self):
        """d = 48 certifies, including the sign pattern of H."""
        cert = verify_magic(48, use_cache=False)
        assert cert.valid, cert.failed
        assert cert.checks["sign48"]
        assert "sign48_float" not in cert.checks
        assert cert.diagnostics == {"sign48_float": True}
        assert cert.to_dict()["diagnostics"] == {"sign48_float": True}
