"""
Layered settings for MagicPack

Settings are assembled from up to five layers, later layers winning:

    package defaults < first user file found < --config file < MAGIC_* environment < call-site dict

The merged tree is checked against the schema in defaults.py once, after all layers
are in, so environment strings reach the validator and are converted there.
"""

import json
import logging
import os
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

import yaml

from ..exceptions import ConfigurationError
from .defaults import get_config_schema, get_default_config, get_env_config_mapping, get_user_config_paths
from .validator import ConfigValidator

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
Settings = Dict[str, Any]

_READERS: Dict[str, Callable[[Any], Any]] = {".json": json.load, ".yaml": yaml.safe_load, ".yml": yaml.safe_load}


def read_settings_file(path: PathLike) -> Settings:
    """
    Read one settings file; JSON for .json, YAML for anything else.

    Raises:
        ConfigurationError: If the file is missing, unparsable or not a mapping
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"Configuration file not found: {path}", config_path=str(path))
    reader = _READERS.get(path.suffix.lower(), yaml.safe_load)
    try:
        with path.open("r") as handle:
            loaded = reader(handle)
    except (yaml.YAMLError, json.JSONDecodeError, OSError) as e:
        raise ConfigurationError(f"Cannot read settings from {path}: {e}", config_path=str(path)) from e
    if loaded is None:
        return {}
    if not isinstance(loaded, dict):
        raise ConfigurationError(f"Settings in {path} must form a mapping, got {type(loaded).__name__}",
                                 config_path=str(path))
    return loaded


def deep_merge(base: Settings, override: Settings) -> Settings:
    """New tree with override laid over base; nested mappings merge key by key."""
    merged = dict(base)
    for key, value in override.items():
        below = merged.get(key)
        merged[key] = deep_merge(below, value) if isinstance(below, dict) and isinstance(value, dict) else value
    return merged


def put_dotted(tree: Settings, key_path: str, value: Any) -> None:
    *parents, leaf = key_path.split(".")
    for key in parents:
        tree = tree.setdefault(key, {})
    tree[leaf] = value


class ConfigManager:
    """
    Merged and validated MagicPack settings.

    Attributes:
        sources: Names of the layers that contributed, lowest priority first
            ("defaults", "user:<path>", "file:<path>", "env:<VAR>", "call")
    """

    def __init__(self, config_file: Optional[PathLike] = None,
                 config_dict: Optional[Settings] = None,
                 validate: bool = True):
        self.config_file = config_file
        self.config_dict = config_dict
        self.validate = validate
        self.sources: List[str] = []
        self._config: Settings = {}
        self._assemble()

    def _layers(self) -> List[Tuple[str, Settings]]:
        layers = [("defaults", get_default_config())]
        user_file = next((p for p in get_user_config_paths() if p.is_file()), None)
        if user_file is not None:
            try:
                layers.append((f"user:{user_file}", read_settings_file(user_file)))
            except ConfigurationError as e:
                logger.warning("Ignoring user settings: %s", e)
        if self.config_file:
            layers.append((f"file:{self.config_file}", read_settings_file(self.config_file)))
        for var, key_path in get_env_config_mapping().items():
            raw = os.getenv(var)
            if raw is not None:
                env_layer: Settings = {}
                put_dotted(env_layer, key_path, raw)
                layers.append((f"env:{var}", env_layer))
        if self.config_dict:
            layers.append(("call", self.config_dict))
        return layers

    def _assemble(self) -> None:
        merged: Settings = {}
        self.sources = []
        for name, layer in self._layers():
            if layer:
                merged = deep_merge(merged, layer)
                self.sources.append(name)
        if self.validate:
            merged = ConfigValidator(get_config_schema()).validate(merged)
        logger.debug("Settings assembled from %s", ", ".join(self.sources))
        self._config = merged

    def get_config(self) -> Settings:
        """Shallow copy of the merged tree."""
        return dict(self._config)

    def get(self, key_path: str, default: Any = None) -> Any:
        """Value at a dotted path such as "magic.dimension_cap", or default when absent."""
        node: Any = self._config
        for key in key_path.split("."):
            if not isinstance(node, dict) or key not in node:
                return default
            node = node[key]
        return node

    def set(self, key_path: str, value: Any) -> None:
        """Override one value in place; the validator is not rerun."""
        put_dotted(self._config, key_path, value)

    def get_fraction(self, key_path: str, default: Any = None) -> Fraction:
        """Read a rational setting such as ``evaluation.sign_scan_step``."""
        value = self.get(key_path, default)
        try:
            return Fraction(str(value))
        except (ValueError, ZeroDivisionError) as e:
            raise ConfigurationError(
                f"Setting {key_path} is not a rational number: {value!r}",
                config_key=key_path
            ) from e

    def ladder_rungs(self) -> List[tuple]:
        """
        Expand the precision lists into escalation rungs.

        Rung i uses pi_digits[i], gamma_digits[i] and split_exponents[i], each list
        saturating at its last entry; the ladder length is the longest list.

        Returns:
            List of (pi_digits, gamma_digits, split_exponent) tuples
        """
        lists = [self.get(f"precision.{name}") for name in ("pi_digits", "gamma_digits", "split_exponents")]
        height = max(len(values) for values in lists)
        return [tuple(values[min(i, len(values) - 1)] for values in lists) for i in range(height)]

    def save_config(self, file_path: PathLike) -> None:
        """
        Write the merged settings; JSON when the suffix is .json, YAML otherwise.

        Raises:
            ConfigurationError: If the file cannot be written
        """
        path = Path(file_path)
        try:
            with path.open("w") as handle:
                if path.suffix.lower() == ".json":
                    json.dump(self._config, handle, indent=2, sort_keys=True, default=str)
                else:
                    yaml.safe_dump(self._config, handle, default_flow_style=False, sort_keys=True)
        except (OSError, yaml.YAMLError, TypeError) as e:
            raise ConfigurationError(f"Cannot write settings to {path}: {e}", config_path=str(path)) from e

    def __repr__(self) -> str:
        return f"ConfigManager(sources={self.sources})"


_global_config: Optional[ConfigManager] = None


def get_global_config() -> ConfigManager:
    """The process-wide settings, built from defaults, user files and environment on first use."""
    global _global_config
    if _global_config is None:
        _global_config = ConfigManager()
    return _global_config


def set_global_config(config_manager: Optional[ConfigManager]) -> None:
    """Replace the process-wide settings; None rebuilds them on next use."""
    global _global_config
    _global_config = config_manager


def load_config(config_file: Optional[PathLike] = None,
                config_dict: Optional[Settings] = None,
                validate: bool = True) -> ConfigManager:
    """
    Build a settings manager without installing it globally.

    Example:
        config = load_config("magicpack.yaml")
        config = load_config(config_dict={"magic": {"strict_tails": False}})
    """
    return ConfigManager(config_file=config_file, config_dict=config_dict, validate=validate)
