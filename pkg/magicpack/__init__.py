"""
MagicPack: magic functions for sphere packings with forbidden distances

- Exact rational r-series of theta functions and Eisenstein series
- Magic function construction and Sturm-certified sign conditions per dimension
- Float and interval evaluation of H and its Fourier transform
- Linear-programming density bounds and Poisson summation checks
- Optimal one-dimensional packings via domino graphs and ratio cycles
- Configuration-driven setup and a CLI that writes reproducible certificates
"""

from __future__ import annotations

__version__ = "1.0.0"
__author__ = "MagicPack Developers"
__description__ = "Magic functions and forbidden-distance sphere packings in exact arithmetic"

# Core exports
from .core.magic import (
    MagicParams,
    MagicFunction,
    MagicCertificate,
    compute_params,
    parameters_table,
    magic_function,
    verify_magic,
    verify_many,
)
from .core.evaluation import evaluate_h, estimate_last_sign_change
from .core.conditions import check_conditions, check_sign_48
from .core.bounds import extremal_density, lp_ratio_check, poisson_residual, lattice_shells, kissing_bound
from .core.packing1d import (
    DistanceSet,
    PeriodicPacking,
    build_domino_graph,
    max_density_cycle,
    optimal_packing,
    kalbe,
    greedy,
    reduce_to_finite,
    fejer_sharpness,
)

# Configuration exports
from .config.manager import ConfigManager, get_global_config, load_config
from .config.defaults import get_default_config

# Exception exports
from .exceptions import (
    MagicPackError,
    ConfigurationError,
    ValidationError,
    PersistenceError,
    DimensionError,
    DimensionExcludedError,
    ConditionFailedError,
    LadderExhaustedError,
    GraphSizeError,
    AcyclicGraphError,
    AccumulationError,
    CLIError,
)

__all__ = [
    # Version info
    "__version__",
    "__author__",
    "__description__",

    # Magic functions
    "MagicParams",
    "MagicFunction",
    "MagicCertificate",
    "compute_params",
    "parameters_table",
    "magic_function",
    "verify_magic",
    "verify_many",
    "evaluate_h",
    "estimate_last_sign_change",
    "check_conditions",
    "check_sign_48",

    # Bounds
    "extremal_density",
    "lp_ratio_check",
    "poisson_residual",
    "lattice_shells",
    "kissing_bound",

    # One-dimensional packings
    "DistanceSet",
    "PeriodicPacking",
    "build_domino_graph",
    "max_density_cycle",
    "optimal_packing",
    "kalbe",
    "greedy",
    "reduce_to_finite",
    "fejer_sharpness",

    # Configuration
    "ConfigManager",
    "get_global_config",
    "load_config",
    "get_default_config",

    # Exceptions
    "MagicPackError",
    "ConfigurationError",
    "ValidationError",
    "PersistenceError",
    "DimensionError",
    "DimensionExcludedError",
    "ConditionFailedError",
    "LadderExhaustedError",
    "GraphSizeError",
    "AcyclicGraphError",
    "AccumulationError",
    "CLIError",
]

# Initialize logging
import logging
logging.getLogger(__name__).addHandler(logging.NullHandler())
