"""
Schema checks for MagicPack settings.

Values arriving from YAML, JSON or MAGIC_* environment variables are coerced to the
declared type, then checked for range, enum and pattern. The precision ladder gets
an extra cross-field check: digits grow and split exponents shrink from rung to rung.
"""

import re
from typing import Any, Callable, Dict, List

from ..exceptions import ConfigurationError, ValidationError

Schema = Dict[str, Any]

_TRUE = {"true", "1", "yes", "on"}
_FALSE = {"false", "0", "no", "off"}
_INTEGER = re.compile(r"\s*[+-]?\d+\s*")


def _fail(field: str, value: Any, reason: str) -> ValidationError:
    return ValidationError(f"{field}: {reason} (got {value!r})", field=field, value=value)


def _to_boolean(value: Any) -> bool:
    if isinstance(value, bool):
        return value
    if isinstance(value, int):
        return bool(value)
    if isinstance(value, str) and value.strip().lower() in _TRUE | _FALSE:
        return value.strip().lower() in _TRUE
    raise ValueError("expected a boolean")


def _to_integer(value: Any) -> int:
    # bool is an int subclass
    if isinstance(value, bool):
        raise ValueError("expected an integer, not a boolean")
    if isinstance(value, int):
        return value
    if isinstance(value, float) and value.is_integer():
        return int(value)
    if isinstance(value, str) and _INTEGER.fullmatch(value):
        return int(value)
    raise ValueError("expected an integer")


def _to_float(value: Any) -> float:
    if isinstance(value, bool):
        raise ValueError("expected a number, not a boolean")
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ValueError("expected a number") from None


_COERCE: Dict[str, Callable[[Any], Any]] = {
    "boolean": _to_boolean,
    "integer": _to_integer,
    "float": _to_float,
    "string": str,
}


class ConfigValidator:
    """Checks a merged settings tree against a section → property schema."""

    def __init__(self, schema: Schema = None):
        self.schema = schema or {}

    def validate(self, config: Dict[str, Any]) -> Dict[str, Any]:
        """
        Coerce and check every known property; unknown sections and keys pass through.

        Missing properties take their schema default; missing required sections are
        filled entirely from defaults.

        Raises:
            ConfigurationError: If config is not a mapping
            ValidationError: If a value has the wrong type, range, enum or pattern
        """
        if not isinstance(config, dict):
            raise ConfigurationError(f"Configuration must be a mapping, got {type(config).__name__}")

        checked = dict(config)
        for name, section_schema in self.schema.items():
            if name in config:
                checked[name] = self._section(name, config[name], section_schema)
            elif section_schema.get("required", False):
                checked[name] = self._section(name, {}, section_schema)
        if isinstance(checked.get("precision"), dict):
            self._check_ladder(checked["precision"])
        return checked

    def _section(self, name: str, section: Any, schema: Schema) -> Dict[str, Any]:
        if not isinstance(section, dict):
            raise _fail(name, section, "section must be a mapping")
        result = dict(section)
        for prop, prop_schema in schema.get("properties", {}).items():
            path = f"{name}.{prop}"
            if prop in section:
                result[prop] = self._value(path, section[prop], prop_schema)
            elif "default" in prop_schema:
                result[prop] = prop_schema["default"]
            elif prop_schema.get("required", False):
                raise _fail(path, None, "required setting is missing")
        return result

    def _value(self, path: str, value: Any, schema: Schema) -> Any:
        kind = schema.get("type")
        if kind == "array":
            return self._array(path, value, schema)
        coerce = _COERCE.get(kind)
        if coerce is not None:
            try:
                value = coerce(value)
            except ValueError as e:
                raise _fail(path, value, str(e)) from None
        self._check_constraints(path, value, schema)
        return value

    def _array(self, path: str, value: Any, schema: Schema) -> List[Any]:
        # MAGIC_* variables carry lists as "20, 40 60"
        if isinstance(value, str):
            value = [part for part in re.split(r"[,\s]+", value.strip()) if part]
        if not isinstance(value, (list, tuple)):
            raise _fail(path, value, "expected a list")
        if len(value) < schema.get("min_items", 0):
            raise _fail(path, value, f"needs at least {schema['min_items']} entries")
        items = schema.get("items")
        if not items:
            return list(value)
        return [self._value(f"{path}[{i}]", item, items) for i, item in enumerate(value)]

    @staticmethod
    def _check_constraints(path: str, value: Any, schema: Schema) -> None:
        if "enum" in schema and value not in schema["enum"]:
            raise _fail(path, value, f"must be one of {schema['enum']}")
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            low, high = schema.get("min"), schema.get("max")
            if low is not None and value < low:
                raise _fail(path, value, f"must be >= {low}")
            if high is not None and value > high:
                raise _fail(path, value, f"must be <= {high}")
        pattern = schema.get("pattern")
        if pattern and isinstance(value, str) and not re.match(pattern, value):
            raise _fail(path, value, f"must match {pattern}")

    @staticmethod
    def _check_ladder(precision: Dict[str, Any]) -> None:
        """Digits must grow and split exponents must shrink along the ladder."""
        for key in ("pi_digits", "gamma_digits"):
            values = precision.get(key, [])
            if any(v <= 0 for v in values) or values != sorted(values):
                raise _fail(f"precision.{key}", values, "must be positive and nondecreasing")
        splits = precision.get("split_exponents", [])
        if any(v < 0 for v in splits) or splits != sorted(splits, reverse=True):
            raise _fail("precision.split_exponents", splits, "must be nonnegative and nonincreasing")
