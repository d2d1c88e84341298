"""
Custom exceptions for MagicPack

This module defines all custom exception classes used throughout the MagicPack package.
"""


class MagicPackError(Exception):
    """Base exception class for all MagicPack errors."""

    def __init__(self, message: str, details: dict = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def __str__(self) -> str:
        if self.details:
            return f"{self.message} (Details: {self.details})"
        return self.message


class ConfigurationError(MagicPackError):
    """Raised when there's an error in configuration."""

    def __init__(self, message: str, config_path: str = None, config_key: str = None):
        super().__init__(message)
        self.config_path = config_path
        self.config_key = config_key
        self.details = {
            "config_path": config_path,
            "config_key": config_key,
        }


class ValidationError(MagicPackError):
    """Raised when data validation fails."""

    def __init__(self, message: str, field: str = None, value: any = None):
        super().__init__(message)
        self.field = field
        self.value = value
        self.details = {
            "field": field,
            "value": value,
        }


class PersistenceError(MagicPackError):
    """Raised when a certificate, shell file or cache entry cannot be read or written."""

    def __init__(self, message: str, file_path: str = None, operation: str = None, format: str = None):
        super().__init__(message)
        self.file_path = file_path
        self.operation = operation  # "save" or "load"
        self.format = format
        self.details = {
            "file_path": file_path,
            "operation": operation,
            "format": format,
        }


class CacheError(MagicPackError):
    """Raised when there's an error in cache operations."""

    def __init__(self, message: str, cache_key: str = None, operation: str = None):
        super().__init__(message)
        self.cache_key = cache_key
        self.operation = operation
        self.details = {
            "cache_key": cache_key,
            "operation": operation,
        }


class CLIError(MagicPackError):
    """Raised when there's an error in CLI operations."""

    def __init__(self, message: str, command: str = None, args: dict = None):
        super().__init__(message)
        self.command = command
        self.args = args or {}
        self.details = {
            "command": command,
            "args": self.args,
        }


# Exact arithmetic

class EndpointRootError(MagicPackError):
    """Raised when a Sturm count is requested on an interval whose endpoint is a root."""

    def __init__(self, endpoint):
        super().__init__(f"Polynomial vanishes at interval endpoint {endpoint}")
        self.endpoint = endpoint
        self.details = {"endpoint": str(endpoint)}


class ExpCapError(MagicPackError):
    """Raised when an exponential enclosure is requested beyond the configured cap."""

    def __init__(self, argument, cap):
        super().__init__(f"Exponent {argument} exceeds the configured cap {cap}")
        self.argument = argument
        self.cap = cap
        self.details = {"argument": str(argument), "cap": cap}


# Series

class TruncationError(MagicPackError):
    """Raised when a coefficient outside the known range of a truncated series is read."""

    def __init__(self, r_power: int, start: int, order: int):
        super().__init__(
            f"Coefficient r^{r_power} is outside the known range [{start}, {order}]"
        )
        self.r_power = r_power
        self.details = {"r_power": r_power, "start": start, "order": order}


class WDegreeError(MagicPackError):
    """Raised when a product would carry a power of w above 2."""

    def __init__(self, degree: int):
        super().__init__(f"w-degree {degree} exceeds the supported maximum of 2")
        self.degree = degree
        self.details = {"degree": degree}


class NonUnitError(MagicPackError):
    """Raised when inverting a series whose lowest coefficient is not a unit."""

    def __init__(self, message: str, start: int = None):
        super().__init__(message)
        self.start = start
        self.details = {"start": start}


class ConsistencyError(MagicPackError):
    """Raised when an internal self-test fails."""

    def __init__(self, message: str, check: str = None, **extra):
        super().__init__(message)
        self.check = check
        self.details = {"check": check, **{k: str(v) for k, v in extra.items()}}


# Magic functions

class DimensionError(MagicPackError):
    """Raised for dimensions that are not admissible for the construction."""

    def __init__(self, message: str, dimension: int = None, cap: int = None):
        super().__init__(message)
        self.dimension = dimension
        self.cap = cap
        self.details = {"dimension": dimension, "cap": cap}


class DimensionExcludedError(DimensionError):
    """Raised for d = 16 mod 24, where the construction fails positivity."""

    def __init__(self, dimension: int):
        super().__init__(
            f"Dimension {dimension} is excluded (d = 16 mod 24)", dimension=dimension
        )


class DimensionCapError(DimensionError):
    """Raised when d exceeds the configured dimension cap."""

    def __init__(self, dimension: int, cap: int):
        super().__init__(
            f"Dimension {dimension} exceeds the configured cap {cap}",
            dimension=dimension, cap=cap,
        )


class RankMismatchError(MagicPackError):
    """Raised when a basis does not reach the expected dimension."""

    def __init__(self, basis: str, expected: int, found: int, order: int):
        super().__init__(
            f"{basis} basis has dimension {found}, expected {expected} (order {order})"
        )
        self.basis = basis
        self.expected = expected
        self.found = found
        self.details = {"basis": basis, "expected": expected, "found": found, "order": order}


class SolutionSpaceError(MagicPackError):
    """Raised when the C-vector system does not have a one-dimensional solution space."""

    def __init__(self, dimension: int):
        super().__init__(f"Solution space has dimension {dimension}, expected 1")
        self.dimension = dimension
        self.details = {"dimension": dimension}


class ConditionFailedError(MagicPackError):
    """Raised when a certificate condition is false."""

    def __init__(self, condition: str, dimension: int = None, message: str = None):
        super().__init__(message or f"Condition ({condition}) failed for d={dimension}")
        self.condition = condition
        self.dimension = dimension
        self.details = {"condition": condition, "dimension": dimension}


class LadderExhaustedError(MagicPackError):
    """Raised when positivity stays inconclusive at the top precision rung."""

    def __init__(self, dimension: int, failed: list):
        super().__init__(
            f"Positivity inconclusive at maximal precision for d={dimension}: {', '.join(failed)}"
        )
        self.dimension = dimension
        self.failed = list(failed)
        self.details = {"dimension": dimension, "failed": self.failed}


class PoleProximityError(MagicPackError):
    """Raised when a float evaluation is requested too close to an even-integer pole."""

    def __init__(self, s, pole: int):
        super().__init__(f"s={s} is too close to the pole s={pole}")
        self.details = {"s": str(s), "pole": pole}


class RegionError(MagicPackError):
    """Raised when a certified evaluation is requested outside its convergence region."""

    def __init__(self, s, bound, side: str):
        super().__init__(f"Certified {side} evaluation needs s > {bound}, got {s}")
        self.details = {"s": str(s), "bound": str(bound), "side": side}


# One-dimensional packings

class GraphSizeError(MagicPackError):
    """Raised when the domino graph would exceed the vertex cap."""

    def __init__(self, vertices: int, cap: int):
        super().__init__(f"Domino graph exceeds {cap} vertices (reached {vertices})")
        self.vertices = vertices
        self.cap = cap
        self.details = {"vertices": vertices, "cap": cap}


class AcyclicGraphError(MagicPackError):
    """Raised when the domino graph has no cycle, so no periodic packing exists."""

    def __init__(self, distances: list):
        super().__init__("Domino graph is acyclic: no periodic packing exists")
        self.details = {"K": [str(x) for x in distances]}


class DeadEndError(MagicPackError):
    """Raised when greedy placement finds no feasible next distance."""

    def __init__(self, prefix: list):
        super().__init__(f"Greedy placement reached a dead end after {len(prefix)} steps")
        self.prefix = list(prefix)
        self.details = {"prefix": [str(x) for x in prefix]}


class AccumulationError(MagicPackError):
    """Raised when an accumulation description violates its preconditions."""

    def __init__(self, message: str, condition: str = None):
        super().__init__(message)
        self.condition = condition
        self.details = {"condition": condition}
