"""
Stage timing for MagicPack

Pipeline stages (basis solving, truncation search, each positivity condition,
evaluations) run inside ``stage``. Each stage logs its duration at INFO, adds it to
the process-wide ledger and, when the caller passes a dict, stores it there for the
timing block of a certificate.
"""

import contextlib
import logging
import threading
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

logger = logging.getLogger(__name__)


@dataclass
class StageTotals:
    """Accumulated wall time of one stage name."""
    calls: int = 0
    seconds: float = 0.0
    slowest: float = 0.0

    def add(self, seconds: float) -> None:
        self.calls += 1
        self.seconds += seconds
        self.slowest = max(self.slowest, seconds)


class StageLedger:
    """Thread-safe totals per stage name."""

    def __init__(self):
        self._totals: Dict[str, StageTotals] = {}
        self._lock = threading.Lock()

    def add(self, name: str, seconds: float) -> None:
        with self._lock:
            self._totals.setdefault(name, StageTotals()).add(seconds)

    def get(self, name: str) -> Optional[StageTotals]:
        with self._lock:
            totals = self._totals.get(name)
            return None if totals is None else StageTotals(totals.calls, totals.seconds, totals.slowest)

    def slowest_first(self) -> List[Tuple[str, StageTotals]]:
        with self._lock:
            return sorted(self._totals.items(), key=lambda item: -item[1].seconds)

    def reset(self) -> None:
        with self._lock:
            self._totals.clear()


@contextlib.contextmanager
def stage(name: str, timings: Optional[Dict[str, float]] = None, **metadata):
    """
    Time a pipeline stage, log it at INFO and optionally store the duration.

    Args:
        name: Stage name, e.g. "conditions.VII"
        timings: Dictionary receiving ``name -> seconds`` on exit
        **metadata: Context shown in the start line, e.g. d=48
    """
    context = " ".join(f"{k}={v}" for k, v in metadata.items())
    logger.info("Stage %s started%s", name, f" ({context})" if context else "")
    started = time.perf_counter()
    try:
        yield
    finally:
        elapsed = time.perf_counter() - started
        get_stage_ledger().add(name, elapsed)
        if timings is not None:
            timings[name] = round(elapsed, 6)
        logger.info("Stage %s finished in %.3fs", name, elapsed)


def log_stage_summary(level: int = logging.INFO) -> None:
    """One log line per stage name seen in this process, slowest first."""
    for name, totals in get_stage_ledger().slowest_first():
        logger.log(level, "%-28s %5d calls %10.3fs total %9.3fs slowest",
                   name, totals.calls, totals.seconds, totals.slowest)


_ledger: Optional[StageLedger] = None


def get_stage_ledger() -> StageLedger:
    global _ledger
    if _ledger is None:
        _ledger = StageLedger()
    return _ledger


def set_stage_ledger(ledger: Optional[StageLedger]) -> None:
    global _ledger
    _ledger = ledger
