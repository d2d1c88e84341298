"""
End-to-end integration tests for MagicPack.

These tests chain the library operations the way the CLI does: solve, certify,
persist, reload and bound.
"""

import json
import shutil
import tempfile
from fractions import Fraction
from pathlib import Path
import sys

import pytest
import sympy

# Add the magicpack package to the path
sys.path.insert(0, '.')

from magicpack.config.manager import load_config, set_global_config
from magicpack.core.bounds import cluster_bounds, kissing_bound, lattice_shells, lp_ratio_check, poisson_residual
from magicpack.core.magic import clear_magic_functions, magic_function, verify_magic, verify_many
from magicpack.core.packing1d import (
    DistanceSet,
    fejer_kissing_bound,
    fejer_sharpness,
    optimal_packing,
    reduce_to_finite,
)
from magicpack.core.persistence import (
    cache_path,
    read_accumulation,
    read_certificate,
    read_shells,
    write_certificate,
    write_shells,
)
from magicpack.utils.cache import clear_all_caches


class IntegrationTestBase:
    def setup_method(self):
        self.temp_dir = Path(tempfile.mkdtemp())
        self.cache_dir = self.temp_dir / "cache"
        set_global_config(load_config(config_dict={
            "cache": {"enabled": True, "directory": str(self.cache_dir)},
            "certificate": {"include_timing": True},
        }))
        clear_magic_functions()

    def teardown_method(self):
        clear_magic_functions()
        clear_all_caches()
        set_global_config(None)
        shutil.rmtree(self.temp_dir, ignore_errors=True)


class TestEndToEndWorkflows(IntegrationTestBase):
    """Complete workflows."""

    def test_solution_cache_lifecycle(self):
        """A solve lands in the configured cache directory and is reused after a reset."""
        fn = magic_function(8)
        path = cache_path(self.cache_dir, 8, True, 10)
        assert path.exists()
        clear_magic_functions()
        again = magic_function(8)
        assert again.c_phi == fn.c_phi
        assert again.n_trunc == fn.n_trunc

    def test_accumulation_workflow(self):
        """Description file → finite reduction → optimal packing → cluster bounds."""
        desc_path = self.temp_dir / "desc.json"
        desc_path.write_text(json.dumps({"core": ["1", "2", "5"],
                                         "tails": [{"alpha": "2", "c": "1/2", "rho": "1/2"}]}))
        reduced = reduce_to_finite(read_accumulation(desc_path))
        packing = optimal_packing(reduced)
        assert 0 < packing.density <= 1
        lower, upper = cluster_bounds(1, packing.density, reduced.sup, 2 * reduced.sup, 1)
        assert lower.exact < upper.exact

    def test_fejer_workflow(self):
        """F(0)/F̂(0) = 1/(1+2N) in the general kissing bound gives the sharpness ratio."""
        lam = Fraction(100)
        n, ratio = fejer_sharpness(lam)
        general = kissing_bound(1, lam, Fraction(1, 1 + 2 * n), Fraction(1))
        assert general.exact == fejer_kissing_bound(lam).exact
        assert general.exact == sympy.Rational(ratio.numerator, ratio.denominator)

    def test_packing_scales(self):
        """Scaling a distance set by λ divides the optimal density by λ."""
        K = DistanceSet.of([1, 2, Fraction(7, 2)])
        assert optimal_packing(K.scaled(2)).density * 2 == optimal_packing(K).density

    @pytest.mark.slow
    def test_certificate_lifecycle(self):
        """Verify, write, read back, then use the certificate for the LP ratio."""
        cert = verify_magic(8)
        assert cert.valid, cert.failed
        path = write_certificate(cert, self.temp_dir / "cert-d8.json", include_timing=True)
        data = read_certificate(path)
        assert data["C_phi"] == list(cert.c_phi)
        assert data["N"] == cert.n_trunc
        assert data["runtime_secs"] > 0
        assert lp_ratio_check(8, cert)

    @pytest.mark.slow
    def test_lattice_workflow(self):
        """Leech shells written to disk balance Poisson summation in d = 24."""
        path = write_shells(lattice_shells("leech", 70), self.temp_dir / "leech.json")
        shells = read_shells(path)
        result = poisson_residual(shells, shells, 24)
        assert result.relative < 1e-10

    @pytest.mark.slow
    def test_parallel_verification(self):
        """A process pool gives the same certificates as sequential runs."""
        pooled = verify_many([8, 24], workers=2)
        assert [c.params.d for c in pooled] == [8, 24]
        assert all(c.valid for c in pooled)
