"""
Configuration management for MagicPack

This module provides configuration management functionality including:
- Default configuration values and schema
- Configuration validation
- Configuration loading and merging
- Environment variable support (MAGIC_DMAX, MAGIC_STRICT_TAILS, ...)
"""

from .manager import ConfigManager, get_global_config, set_global_config, load_config
from .defaults import get_default_config
from .validator import ConfigValidator

__all__ = [
    "ConfigManager",
    "get_default_config",
    "ConfigValidator",
    "get_global_config",
    "set_global_config",
    "load_config",
]
