"""
Settings schema for MagicPack

Every setting is declared once in SCHEMA with its type, bounds and default;
``get_default_config`` derives the default tree from it. Path defaults starting
with ``~`` are expanded when the tree is built.
"""

from pathlib import Path
from typing import Any, Dict, List, Optional


def _section(required: bool = True, **properties: Dict[str, Any]) -> Dict[str, Any]:
    return {"type": "dict", "required": required, "properties": properties}


def _int(default: int, low: Optional[int] = None, high: Optional[int] = None) -> Dict[str, Any]:
    entry: Dict[str, Any] = {"type": "integer", "default": default}
    if low is not None:
        entry["min"] = low
    if high is not None:
        entry["max"] = high
    return entry


def _int_list(default: List[int]) -> Dict[str, Any]:
    return {"type": "array", "items": {"type": "integer"}, "min_items": 1, "default": default}


def _flag(default: bool) -> Dict[str, Any]:
    return {"type": "boolean", "default": default}


SCHEMA: Dict[str, Any] = {
    # Solving the magic functions
    "magic": _section(
        dimension_cap=_int(200, low=8),
        strict_tails=_flag(True),
        n_step=_int(10, 1, 100),
        tail_digits=_int(11, 2, 100),
        basis_order_factor=_int(1, 1, 16),
        max_doublings=_int(4, 0, 10),
    ),
    # Escalation ladder for the exact positivity checks
    "precision": _section(
        pi_digits=_int_list([20, 40, 60, 80, 100]),
        gamma_digits=_int_list([2, 5, 8, 11]),
        split_exponents=_int_list([4, 3, 2, 1, 0]),
        exp_cap=_int(4096, low=1),
        descartes_depth=_int(8, 0, 32),
    ),
    "evaluation": _section(
        float_digits=_int(60, 15, 1000),
        pole_tolerance={"type": "float", "min": 0.0, "max": 0.5, "default": 1e-6},
        sign_scan_step={"type": "string", "pattern": r"^\d+(/\d+)?$", "default": "1/200"},
        certified_pieces=_int(200, low=1),
        certified_cutoff=_int(6, low=2),
    ),
    "packing": _section(max_vertices=_int(20000, low=1)),
    "certificate": _section(include_timing=_flag(False)),
    "cache": _section(
        required=False,
        enabled=_flag(True),
        directory={"type": "string", "default": "~/.cache/magicpack"},
        memo_size=_int(4096, low=16),
    ),
    "cli": _section(
        default_output_format={"type": "string", "enum": ["table", "json", "yaml", "plain"], "default": "table"},
    ),
    "logging": _section(
        level={"type": "string", "enum": ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"], "default": "INFO"},
        file_logging=_flag(False),
        log_file={"type": "string", "default": "~/.cache/magicpack/logs/magicpack.log"},
    ),
}

ENV_VARIABLES: Dict[str, str] = {
    "MAGIC_DMAX": "magic.dimension_cap",
    "MAGIC_STRICT_TAILS": "magic.strict_tails",
    "MAGIC_FLOAT_DIGITS": "evaluation.float_digits",
    "MAGIC_MAX_VERTICES": "packing.max_vertices",
    "MAGICPACK_CACHE_DIR": "cache.directory",
    "MAGICPACK_LOG_LEVEL": "logging.level",
    "MAGICPACK_LOG_FILE": "logging.log_file",
}


def _default_value(value: Any) -> Any:
    if isinstance(value, str) and value.startswith("~"):
        return str(Path(value).expanduser())
    if isinstance(value, list):
        return list(value)
    return value


def get_default_config() -> Dict[str, Any]:
    """Fresh default settings tree, one section per SCHEMA entry."""
    return {
        name: {prop: _default_value(entry["default"]) for prop, entry in section["properties"].items()}
        for name, section in SCHEMA.items()
    }


def get_config_schema() -> Dict[str, Any]:
    return SCHEMA


def get_env_config_mapping() -> Dict[str, str]:
    """Environment variable → dotted settings key."""
    return dict(ENV_VARIABLES)


def get_user_config_paths() -> List[Path]:
    """Candidate user settings files, most specific first; the first existing one is used."""
    home = Path.home()
    return [
        Path.cwd() / name for name in ("magicpack.yaml", "magicpack.json")
    ] + [
        base / f"config.{ext}"
        for base in (home / ".config" / "magicpack", home / ".magicpack")
        for ext in ("yaml", "json")
    ]
