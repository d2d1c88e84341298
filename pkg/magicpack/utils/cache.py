"""
Memo tables for MagicPack

Expansions of the generators (theta powers, Eisenstein series, Delta powers) and
divisor sums are requested repeatedly with the same (name, order) keys while bases,
conditions and evaluations are assembled. This module keeps them in thread-safe
LRU tables shared by the whole process.
"""

import threading
from collections import OrderedDict
from functools import wraps
from typing import Any, Callable, Dict, Optional

from ..config.manager import get_global_config
from ..exceptions import CacheError

_MISSING = object()


class CacheManager:
    """
    Owns the named memo tables.

    Tables are created lazily by ``get_cache`` and cleared together.
    """

    def __init__(self, default_size: int = 4096):
        self.default_size = default_size
        self._caches: Dict[str, 'LRUCache'] = {}
        self._lock = threading.RLock()

    def get_cache(self, name: str, size: Optional[int] = None) -> 'LRUCache':
        """
        Get or create a table.

        Args:
            name: Table name
            size: Capacity for a new table (default_size when omitted)

        Returns:
            LRUCache instance

        Raises:
            CacheError: If size is not positive
        """
        with self._lock:
            if name not in self._caches:
                capacity = self.default_size if size is None else size
                if capacity <= 0:
                    raise CacheError(f"Cache size must be positive, got {capacity}",
                                     cache_key=name, operation="create")
                self._caches[name] = LRUCache(capacity)
            return self._caches[name]

    def clear_all_caches(self) -> None:
        with self._lock:
            for cache in self._caches.values():
                cache.clear()


class LRUCache:
    """
    Least Recently Used table guarded by a re-entrant lock.

    Stored values may be falsy (a zero coefficient, an empty tuple); absence is
    reported through ``default`` rather than None.
    """

    def __init__(self, max_size: int):
        self._lock = threading.RLock()
        self._max_size = max_size
        self._cache: "OrderedDict[Any, Any]" = OrderedDict()

    def get(self, key: Any, default: Any = None) -> Any:
        with self._lock:
            value = self._cache.pop(key, _MISSING)
            if value is _MISSING:
                return default
            self._cache[key] = value
            return value

    def put(self, key: Any, value: Any) -> None:
        with self._lock:
            if key in self._cache:
                self._cache.pop(key)
            elif len(self._cache) >= self._max_size:
                self._cache.popitem(last=False)
            self._cache[key] = value

    def clear(self) -> None:
        with self._lock:
            self._cache.clear()

    def __contains__(self, key: Any) -> bool:
        with self._lock:
            return key in self._cache

    def __len__(self) -> int:
        return len(self._cache)


def memoized(cache_name: str, size: Optional[int] = None):
    """
    Decorator memoizing a function of hashable positional arguments in a named table.

    Args:
        cache_name: Table name in the global CacheManager
        size: Capacity used if the table does not exist yet

    Returns:
        Decorated function; ``wrapper.cache_name`` names its table
    """
    def decorator(func: Callable) -> Callable:
        @wraps(func)
        def wrapper(*args):
            cache = get_global_cache_manager().get_cache(cache_name, size)
            key = (func.__name__,) + args
            result = cache.get(key, _MISSING)
            if result is _MISSING:
                result = func(*args)
                cache.put(key, result)
            return result

        wrapper.cache_name = cache_name
        return wrapper
    return decorator


_global_cache_manager: Optional[CacheManager] = None


def get_global_cache_manager() -> CacheManager:
    global _global_cache_manager
    if _global_cache_manager is None:
        _global_cache_manager = CacheManager(get_global_config().get("cache.memo_size", 4096))
    return _global_cache_manager


def set_global_cache_manager(manager: Optional[CacheManager]) -> None:
    global _global_cache_manager
    _global_cache_manager = manager


def clear_all_caches() -> None:
    """Clear all global memo tables."""
    get_global_cache_manager().clear_all_caches()

