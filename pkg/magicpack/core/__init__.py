"""
Core functionality for MagicPack

Exact arithmetic, r-series and modular forms, the magic function pipeline,
density bounds and one-dimensional packings.
"""

from .exactnum import RatPoly, RationalInterval, PrecisionLadder, sturm_count_roots, poly_positive_on
from .series import RSeries
from .magic import MagicParams, MagicFunction, MagicCertificate, compute_params, magic_function, verify_magic
from .evaluation import evaluate_h, estimate_last_sign_change
from .packing1d import DistanceSet, PeriodicPacking, optimal_packing, build_domino_graph, reduce_to_finite

__all__ = [
    "RatPoly",
    "RationalInterval",
    "PrecisionLadder",
    "sturm_count_roots",
    "poly_positive_on",
    "RSeries",
    "MagicParams",
    "MagicFunction",
    "MagicCertificate",
    "compute_params",
    "magic_function",
    "verify_magic",
    "evaluate_h",
    "estimate_last_sign_change",
    "DistanceSet",
    "PeriodicPacking",
    "optimal_packing",
    "build_domino_graph",
    "reduce_to_finite",
]
