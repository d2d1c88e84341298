"""
Utility modules for MagicPack: memo tables and stage timing.
"""

from .cache import CacheManager, LRUCache, memoized, get_global_cache_manager, clear_all_caches
from .performance import StageLedger, stage, get_stage_ledger, log_stage_summary

__all__ = [
    "CacheManager",
    "LRUCache",
    "memoized",
    "get_global_cache_manager",
    "clear_all_caches",
    "StageLedger",
    "stage",
    "get_stage_ledger",
    "log_stage_summary",
]
