"""
Command-line interface for MagicPack
"""

from .main import main, run_cli

__all__ = ["main", "run_cli"]
