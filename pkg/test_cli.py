"""
Tests for the magicpack command line.
"""

import json
import shutil
import sys
import tempfile
from pathlib import Path

import pytest
from click.testing import CliRunner

sys.path.insert(0, '.')

from magicpack.cli.main import main
from magicpack.config.manager import set_global_config
from magicpack.core.magic import clear_magic_functions
from magicpack.utils.cache import clear_all_caches


class TestCLI:
    """Commands run through click's test runner with JSON output."""

    def setup_method(self):
        self.temp_dir = tempfile.mkdtemp()
        self.runner = CliRunner()
        self.env = {"MAGICPACK_CACHE_DIR": str(Path(self.temp_dir) / "cache"), "MAGIC_DMAX": None}
        clear_magic_functions()

    def teardown_method(self):
        clear_magic_functions()
        clear_all_caches()
        set_global_config(None)
        shutil.rmtree(self.temp_dir, ignore_errors=True)

    def invoke(self, *args):
        return self.runner.invoke(main, ['-q', '--format', 'json', *args], env=self.env)

    def json_of(self, result):
        assert result.exit_code == 0, result.output
        return json.loads(result.stdout)

    def test_version(self):
        data = self.json_of(self.invoke('version'))
        assert "version" in data

    def test_params(self):
        """Parameters for d = 48."""
        data = self.json_of(self.invoke('params', '-d', '48'))
        assert (data["a"], data["l"], data["k"], data["b"]) == (6, 10, 38, 2)
        assert data["forbidden_norms"] == [6, 8, 10]

    def test_params_table(self):
        rows = self.json_of(self.invoke('params', '--all', '--dmax', '48'))
        assert [row["d"] for row in rows] == [8, 24, 32, 48]

    def test_params_needs_dimension(self):
        """Neither -d nor --all is a usage error."""
        assert self.invoke('params').exit_code == 2

    def test_invalid_dimension(self):
        """A dimension that is not a multiple of 8 fails with exit code 1."""
        assert self.invoke('params', '-d', '12').exit_code == 1

    def test_excluded_dimension(self):
        assert self.invoke('params', '-d', '40').exit_code == 1

    def test_dimension_cap(self):
        """Dimensions above the cap exit with the resource code."""
        assert self.invoke('params', '-d', '224').exit_code == 3

    def test_density(self):
        data = self.json_of(self.invoke('density', '-d', '8'))
        assert data["exact"] == "pi**4/384"
        assert data["decimal"].startswith("0.2536695079")
        assert data["c"] == "0"

    def test_pack1d(self):
        """{1, 2, 7/2} packs with period 1 1 7/2."""
        data = self.json_of(self.invoke('pack1d', '--k', '1,2,7/2', '--greedy', '6'))
        assert data["period"] == "1 1 7/2"
        assert data["density"] == "6/11"
        assert data["closed_form_density"] == "6/11"
        assert data["greedy_density"] == "6/11"

    def test_pack1d_bad_set(self):
        """A set without 1 is a usage error."""
        assert self.invoke('pack1d', '--k', '2,3').exit_code == 2

    def test_pack1d_vertex_cap(self):
        """Exceeding the vertex cap exits with the resource code."""
        result = self.invoke('pack1d', '--k', '1,11/10,6/5,13/10,7/5,3/2,8/5,17/10,9/5,2,6',
                             '--max-vertices', '10')
        assert result.exit_code == 3

    def test_fejer(self):
        data = self.json_of(self.invoke('fejer', '--lambda', '100'))
        assert data["N"] == 16
        assert data["ratio"] == "34/11"
        assert data["kissing_bound"] == "34/11"

    def test_fejer_errors(self):
        """λ < 7 fails; a non-rational λ is a usage error."""
        assert self.invoke('fejer', '--lambda', '6').exit_code == 1
        assert self.invoke('fejer', '--lambda', 'x').exit_code == 2

    def test_reduce(self):
        """A geometric tail accumulating at 2 reduces to {1, 2, 9/4, 5}."""
        path = Path(self.temp_dir) / "desc.json"
        path.write_text(json.dumps({"core": ["1", "2", "5"],
                                    "tails": [{"alpha": "2", "c": "1/2", "rho": "1/2"}]}))
        data = self.json_of(self.invoke('reduce', '--desc', str(path), '--no-solve'))
        assert data["C"] == 1
        assert data["reduced"] == "1,2,9/4,5"
        assert data["size"] == 4

    def test_shells(self):
        """E8 shells are written to a JSON file."""
        output = Path(self.temp_dir) / "e8.json"
        data = self.json_of(self.invoke('shells', '--lattice', 'e8', '--max-norm', '10', '-o', str(output)))
        assert data["d"] == 8
        assert data["first"] == [[2, 240], [4, 2160], [6, 6720]]
        assert output.exists()

    def test_config_get(self):
        data = self.json_of(self.invoke('config', '--get', 'magic.dimension_cap'))
        assert data == {"magic.dimension_cap": 200}

    def test_config_unknown_key(self):
        assert self.invoke('config', '--get', 'magic.nothing').exit_code == 1

    def test_bad_ladder(self):
        """A malformed rung is a usage error."""
        assert self.invoke('verify', '-d', '8', '--ladder', '20,2').exit_code == 2

    def test_rung_not_on_ladder(self):
        assert self.invoke('verify', '-d', '8', '--ladder', '21,2,4').exit_code == 1

    @pytest.mark.slow
    def test_verify_writes_certificate(self):
        """d = 8 certifies and the certificate lands on disk."""
        output = Path(self.temp_dir) / "cert-d8.json"
        data = self.json_of(self.invoke('verify', '-d', '8', '-o', str(output)))
        assert data["valid"] is True
        assert json.loads(output.read_text())["d"] == 8

    @pytest.mark.slow
    def test_cvectors_48(self):
        data = self.json_of(self.invoke('cvectors', '-d', '48'))
        assert data["N"] == 130
        assert data["C_psi"][0] == 565675

    @pytest.mark.slow
    def test_poisson_from_shell_file(self):
        """Shells written by the CLI feed the Poisson check."""
        output = Path(self.temp_dir) / "e8.json"
        assert self.invoke('shells', '--lattice', 'e8', '--max-norm', '70', '-o', str(output)).exit_code == 0
        data = self.json_of(self.invoke('poisson', '--shells', str(output), '--tolerance', '1e-10'))
        assert data["d"] == 8
