"""
Tests for certificate, lattice shell, accumulation and cache files.
"""

import json
import shutil
import sys
import tempfile
from fractions import Fraction
from pathlib import Path

import msgpack
import pytest

sys.path.insert(0, '.')

from magicpack.core.bounds import LatticeShellData, lattice_shells
from magicpack.core.exactnum import PrecisionLadder
from magicpack.core.magic import MagicCertificate, compute_params
from magicpack.core.packing1d import AccumulationDescription, DistanceSet, GeometricTail
from magicpack.core.persistence import (
    accumulation_from_dict,
    cache_path,
    certificate_json,
    load_cached_solution,
    parse_rational,
    read_accumulation,
    read_certificate,
    read_shells,
    render_rational,
    store_cached_solution,
    write_accumulation,
    write_certificate,
    write_shells,
)
from magicpack.exceptions import AccumulationError, PersistenceError, ValidationError


class TestRationals:
    """"p/q" strings."""

    def test_render(self):
        assert render_rational(Fraction(6, 4)) == "3/2"
        assert render_rational(5) == "5"

    def test_parse(self):
        assert parse_rational("397/250") == Fraction(397, 250)
        assert parse_rational(7) == 7

    def test_parse_rejects_floats_and_garbage(self):
        """Floats and booleans are not exact."""
        for bad in (0.5, True, "1/0", "x", None):
            with pytest.raises(PersistenceError):
                parse_rational(bad)


class TestCertificates:
    """Certificate files."""

    def setup_method(self):
        self.temp_dir = tempfile.mkdtemp()
        self.certificate = MagicCertificate(
            compute_params(32), (3, 1, 4), (1, -5, 9, 2), 72, PrecisionLadder.bottom(),
            {"I": True, "II": True, "III": True}, timings={"magic.solve": 1.25, "conditions.exact": 0.5},
        )

    def teardown_method(self):
        shutil.rmtree(self.temp_dir, ignore_errors=True)

    def test_canonical_json(self):
        """Keys are sorted and the text ends with a newline."""
        text = certificate_json(self.certificate)
        assert text.endswith("\n")
        data = json.loads(text)
        assert list(data) == sorted(data)
        assert data["c"] == "397/250"

    def test_write_and_read(self):
        """A written certificate reads back with c as a Fraction."""
        path = Path(self.temp_dir) / "nested" / "cert-d32.json"
        write_certificate(self.certificate, path)
        data = read_certificate(path)
        assert data["d"] == 32
        assert data["C_psi"] == [1, -5, 9, 2]
        assert data["c"] == Fraction(397, 250)
        assert data["checks"] == {"I": True, "II": True, "III": True}

    def test_timing_is_optional(self):
        """Timings only appear when requested."""
        plain = json.loads(certificate_json(self.certificate))
        timed = json.loads(certificate_json(self.certificate, include_timing=True))
        assert "runtime_secs" not in plain
        assert timed["runtime_secs"] == 1.75

    def test_missing_file(self):
        with pytest.raises(PersistenceError):
            read_certificate(Path(self.temp_dir) / "absent.json")

    def test_missing_fields(self):
        """A JSON object without the certificate fields is rejected."""
        path = Path(self.temp_dir) / "partial.json"
        path.write_text(json.dumps({"d": 8}))
        with pytest.raises(PersistenceError):
            read_certificate(path)

    def test_not_an_object(self):
        path = Path(self.temp_dir) / "list.json"
        path.write_text("[1, 2]")
        with pytest.raises(PersistenceError):
            read_certificate(path)


class TestShells:
    """Lattice shell files."""

    def setup_method(self):
        self.temp_dir = tempfile.mkdtemp()

    def teardown_method(self):
        shutil.rmtree(self.temp_dir, ignore_errors=True)

    def test_roundtrip(self):
        """E8 shells survive a write and read."""
        shells = lattice_shells("E8", 10)
        path = write_shells(shells, Path(self.temp_dir) / "e8.json")
        assert read_shells(path) == shells

    def test_invalid_shells(self):
        """Odd norms are rejected when loading."""
        path = Path(self.temp_dir) / "bad.json"
        path.write_text(json.dumps({"d": 8, "shells": [[3, 10]]}))
        with pytest.raises(ValidationError):
            read_shells(path)

    def test_malformed_shells(self):
        path = Path(self.temp_dir) / "bad.json"
        path.write_text(json.dumps({"shells": [[2, 240]]}))
        with pytest.raises(PersistenceError):
            read_shells(path)

    def test_covolume_default(self):
        """Covolume defaults to 1."""
        path = Path(self.temp_dir) / "plain.json"
        path.write_text(json.dumps({"d": 8, "shells": [[2, 240]]}))
        assert read_shells(path) == LatticeShellData(8, ((2, 240),))


class TestAccumulationFiles:
    """Accumulation descriptions."""

    def setup_method(self):
        self.temp_dir = tempfile.mkdtemp()

    def teardown_method(self):
        shutil.rmtree(self.temp_dir, ignore_errors=True)

    def test_roundtrip(self):
        desc = AccumulationDescription(DistanceSet.of([1, 2, 5]),
                                       (GeometricTail(Fraction(2), Fraction(1, 2), Fraction(1, 2)),))
        path = write_accumulation(desc, Path(self.temp_dir) / "acc.json")
        assert read_accumulation(path) == desc

    def test_missing_core(self):
        with pytest.raises(PersistenceError):
            accumulation_from_dict({"tails": []})

    def test_incomplete_tail(self):
        with pytest.raises(PersistenceError):
            accumulation_from_dict({"core": ["1", "2"], "tails": [{"alpha": "2"}]})

    def test_bad_tail(self):
        """A non-geometric tail surfaces as an accumulation error."""
        with pytest.raises(AccumulationError):
            accumulation_from_dict({"core": ["1", "2", "5"],
                                    "tails": [{"alpha": "2", "c": "1/2", "rho": "3/2"}]})


class TestSolutionCache:
    """msgpack cache of solved magic functions."""

    def setup_method(self):
        self.temp_dir = tempfile.mkdtemp()

    def teardown_method(self):
        shutil.rmtree(self.temp_dir, ignore_errors=True)

    def test_roundtrip_big_integers(self):
        """Integers beyond 64 bits survive the cache."""
        big = 3 ** 90
        store_cached_solution(self.temp_dir, 48, True, 10, [big, 1], [-big], 130)
        assert load_cached_solution(self.temp_dir, 48, True, 10) == ((big, 1), (-big,), 130)

    def test_settings_are_part_of_the_key(self):
        """Other strictness or step settings miss the cache."""
        store_cached_solution(self.temp_dir, 8, True, 10, [1], [2], 52)
        assert load_cached_solution(self.temp_dir, 8, False, 10) is None
        assert load_cached_solution(self.temp_dir, 8, True, 20) is None

    def test_stale_payload_ignored(self):
        """A payload written for another dimension is ignored."""
        path = cache_path(self.temp_dir, 8, True, 10)
        path.write_bytes(msgpack.packb({"format": 1, "d": 24, "strict": True, "n_step": 10,
                                        "C_phi": ["1"], "C_psi": ["1"], "N": 10}))
        assert load_cached_solution(self.temp_dir, 8, True, 10) is None

    def test_corrupt_payload_ignored(self):
        path = cache_path(self.temp_dir, 8, True, 10)
        path.write_bytes(b"\xc1 not msgpack")
        assert load_cached_solution(self.temp_dir, 8, True, 10) is None
