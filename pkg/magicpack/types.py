"""
Type definitions for MagicPack

This module contains common type aliases used throughout the MagicPack package.
"""

from __future__ import annotations
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

# Exact scalars
Rational = Union[int, Fraction]
RationalLike = Union[int, Fraction, str]

# Series coefficient components: index i holds the coefficient of w^i
WComponents = Tuple[Optional[List[Rational]], Optional[List[Rational]], Optional[List[Rational]]]

# Monomial keys
ThetaExponent = Tuple[int, int, int]        # (i, j, k) for U^i V^j W^k
EisensteinExponent = Tuple[int, int, int]   # (i, j, n) for E2^i E4^j E6^n

# Linear algebra
Vector = List[Fraction]
Matrix = List[List[Fraction]]

# Precision rung: (pi_digits, gamma_digits, split_exponent)
Rung = Tuple[int, int, int]

# One-dimensional packings
Word = Tuple[Fraction, ...]
DistanceList = Sequence[Fraction]

# Lattice shells: (squared norm, count)
Shell = Tuple[int, int]

# Config types
ConfigValue = Union[str, int, float, bool, Dict[str, Any], List[Any]]
ConfigDict = Dict[str, ConfigValue]

# CLI types
CLIOptions = Dict[str, Any]

# Serialization
Serializable = Union[str, int, float, bool, Dict, List, Tuple, None]

# File system types
FilePath = Union[str, Path]

# Timing block of a certificate
Timings = Dict[str, float]

ErrorHandler = Callable[[Exception], None]
