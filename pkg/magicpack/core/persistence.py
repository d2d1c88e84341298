"""
Persistence operations for MagicPack

Certificates, lattice shell files and accumulation descriptions are written as
JSON; solved magic functions are cached as msgpack files under the configured
cache directory. Rationals travel as "p/q" strings and large integers as
decimal strings inside msgpack, which cannot hold integers beyond 64 bits.
"""

import json
import logging
import threading
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import msgpack

from ..exceptions import PersistenceError
from ..types import FilePath
from .bounds import LatticeShellData
from .magic import MagicCertificate
from .packing1d import AccumulationDescription, GeometricTail, DistanceSet

logger = logging.getLogger(__name__)

CACHE_FORMAT = 1
_cache_lock = threading.Lock()


def render_rational(x) -> str:
    """Fraction or int as "p/q" (or "p" for integers)."""
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_rational(value, field: str = "value") -> Fraction:
    """
    Parse an int or a "p/q" / "p" string into a Fraction.

    Raises:
        PersistenceError: If the value is not an exact rational
    """
    if isinstance(value, bool) or isinstance(value, float):
        raise PersistenceError(f"{field} must be an exact rational, got {value!r}",
                               operation="parse", format="json")
    try:
        return Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError) as e:
        raise PersistenceError(f"{field} is not a rational: {value!r} ({e})",
                               operation="parse", format="json")


def dumps_json(data: Dict[str, Any]) -> str:
    """Canonical JSON text: sorted keys, 2-space indent, trailing newline."""
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _write_text(path: FilePath, text: str, kind: str) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise PersistenceError(f"Failed to write {kind} to {path}: {e}",
                               file_path=str(path), operation="save", format="json")
    logger.debug("Wrote %s to %s (%d bytes)", kind, path, len(text.encode("utf-8")))
    return path


def _read_json(path: FilePath, kind: str) -> Dict[str, Any]:
    path = Path(path)
    if not path.exists():
        raise PersistenceError(f"File not found: {path}", file_path=str(path),
                               operation="load", format="json")
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise PersistenceError(f"Failed to read {kind} from {path}: {e}",
                               file_path=str(path), operation="load", format="json")
    if not isinstance(data, dict):
        raise PersistenceError(f"{kind} file must hold a JSON object", file_path=str(path),
                               operation="load", format="json")
    return data


# Certificates

def certificate_json(certificate: MagicCertificate, include_timing: bool = False) -> str:
    """Canonical JSON rendering of a certificate."""
    return dumps_json(certificate.to_dict(include_timing=include_timing))


def write_certificate(certificate: MagicCertificate, path: FilePath,
                      include_timing: bool = False) -> Path:
    """
    Write a certificate as canonical JSON.

    Args:
        certificate: Certificate from verify_magic
        path: Output file
        include_timing: Add runtime_secs and per-stage timings

    Returns:
        Path written

    Raises:
        PersistenceError: If the file cannot be written
    """
    return _write_text(path, certificate_json(certificate, include_timing), "certificate")


def read_certificate(path: FilePath) -> Dict[str, Any]:
    """
    Load a certificate file as a dictionary, with c parsed back to a Fraction.

    Raises:
        PersistenceError: If the file is missing, unreadable or lacks required fields
    """
    data = _read_json(path, "certificate")
    missing = [key for key in ("d", "C_phi", "C_psi", "N", "checks", "version") if key not in data]
    if missing:
        raise PersistenceError(f"Certificate is missing fields {missing}", file_path=str(path),
                               operation="load", format="json")
    if data.get("c") is not None:
        data["c"] = parse_rational(data["c"], "c")
    return data


# Lattice shells

def shells_to_dict(shells: LatticeShellData) -> Dict[str, Any]:
    return {
        "d": shells.d,
        "covolume": render_rational(shells.covolume),
        "shells": [[norm, count] for norm, count in shells.shells],
    }


def write_shells(shells: LatticeShellData, path: FilePath) -> Path:
    """Write lattice shell data as {d, covolume, shells: [[norm2, count], ...]}."""
    return _write_text(path, dumps_json(shells_to_dict(shells)), "lattice shells")


def read_shells(path: FilePath) -> LatticeShellData:
    """
    Load lattice shell data.

    Raises:
        PersistenceError: If the file is missing or malformed
        ValidationError: If the shell data violates its invariants
    """
    data = _read_json(path, "lattice shells")
    try:
        d = int(data["d"])
        pairs = [(int(norm), int(count)) for norm, count in data["shells"]]
    except (KeyError, TypeError, ValueError) as e:
        raise PersistenceError(f"Malformed lattice shell file {path}: {e}", file_path=str(path),
                               operation="load", format="json")
    covolume = parse_rational(data.get("covolume", 1), "covolume")
    return LatticeShellData(d=d, shells=tuple(pairs), covolume=covolume)


# Accumulation descriptions

def accumulation_to_dict(description: AccumulationDescription) -> Dict[str, Any]:
    return {
        "core": [render_rational(x) for x in description.core.values],
        "tails": [
            {"alpha": render_rational(t.alpha), "c": render_rational(t.c), "rho": render_rational(t.rho)}
            for t in description.tails
        ],
    }


def write_accumulation(description: AccumulationDescription, path: FilePath) -> Path:
    return _write_text(path, dumps_json(accumulation_to_dict(description)), "accumulation description")


def accumulation_from_dict(data: Dict[str, Any]) -> AccumulationDescription:
    """
    Build an AccumulationDescription from {core: [...], tails: [{alpha, c, rho}, ...]}.

    Raises:
        PersistenceError: If a field is missing or not rational
        AccumulationError: If the description violates the reduction preconditions
    """
    if "core" not in data:
        raise PersistenceError("Accumulation description needs a 'core' list",
                               operation="parse", format="json")
    core = DistanceSet.of([parse_rational(x, "core") for x in data["core"]])
    tails = []
    for i, entry in enumerate(data.get("tails", [])):
        try:
            tails.append(GeometricTail(
                alpha=parse_rational(entry["alpha"], f"tails[{i}].alpha"),
                c=parse_rational(entry["c"], f"tails[{i}].c"),
                rho=parse_rational(entry["rho"], f"tails[{i}].rho"),
            ))
        except (KeyError, TypeError) as e:
            raise PersistenceError(f"tails[{i}] needs alpha, c and rho: {e}",
                                   operation="parse", format="json")
    return AccumulationDescription(core=core, tails=tuple(tails))


def read_accumulation(path: FilePath) -> AccumulationDescription:
    return accumulation_from_dict(_read_json(path, "accumulation description"))


# Solved magic function cache

def cache_path(directory: FilePath, d: int, strict: bool, n_step: int) -> Path:
    mode = "strict" if strict else "literal"
    return Path(directory) / f"magic-d{d}-{mode}-n{n_step}.msgpack"


def _pack_ints(values: Sequence[int]) -> List[str]:
    return [str(int(v)) for v in values]


def store_cached_solution(directory: FilePath, d: int, strict: bool, n_step: int,
                          c_phi: Sequence[int], c_psi: Sequence[int], n_trunc: int) -> Optional[Path]:
    """
    Cache a solved (C_φ, C_ψ, N) triple. Failures are logged, never raised.

    Returns:
        The cache file, or None if it could not be written
    """
    path = cache_path(directory, d, strict, n_step)
    payload = {
        "format": CACHE_FORMAT,
        "d": d,
        "strict": bool(strict),
        "n_step": n_step,
        "C_phi": _pack_ints(c_phi),
        "C_psi": _pack_ints(c_psi),
        "N": n_trunc,
    }
    try:
        with _cache_lock:
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "wb") as f:
                f.write(msgpack.packb(payload, use_bin_type=True))
    except OSError as e:
        logger.warning("Could not write magic function cache %s: %s", path, e)
        return None
    logger.debug("Cached magic function d=%d at %s", d, path)
    return path


def load_cached_solution(directory: FilePath, d: int, strict: bool,
                         n_step: int) -> Optional[Tuple[Tuple[int, ...], Tuple[int, ...], int]]:
    """
    Read a cached (C_φ, C_ψ, N) triple.

    Returns:
        The triple, or None when absent, unreadable or written for other settings
    """
    path = cache_path(directory, d, strict, n_step)
    if not path.exists():
        return None
    try:
        with _cache_lock, open(path, "rb") as f:
            payload = msgpack.unpackb(f.read(), raw=False)
        if (payload.get("format") != CACHE_FORMAT or payload.get("d") != d
                or payload.get("strict") != bool(strict) or payload.get("n_step") != n_step):
            logger.debug("Ignoring stale cache entry %s", path)
            return None
        c_phi = tuple(int(v) for v in payload["C_phi"])
        c_psi = tuple(int(v) for v in payload["C_psi"])
        return c_phi, c_psi, int(payload["N"])
    except (OSError, ValueError, KeyError, TypeError, AttributeError, msgpack.exceptions.ExtraData,
            msgpack.exceptions.UnpackException) as e:
        logger.warning("Discarding unreadable cache entry %s: %s", path, e)
        return None
