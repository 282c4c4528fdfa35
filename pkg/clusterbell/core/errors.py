"""Exception types shared across clusterbell."""
from __future__ import annotations

from collections.abc import Iterable


class ClusterBellError(Exception):
    """Base class for every error raised by the package."""


class DimensionError(ClusterBellError, ValueError):
    pass


class InvalidGraphError(ClusterBellError, ValueError):
    pass


class NonHermitianError(ClusterBellError, ValueError):
    pass


class UnsupportedInputSetError(ClusterBellError, ValueError):
    pass


class GeometryError(ClusterBellError, ValueError):
    """A strategy output reads an input outside its light cone."""

    def __init__(self, output: int, position: int, depth: int):
        super().__init__(
            f"output {output} depends on input position {position}, "
            f"which is outside cycle distance {depth}"
        )
        self.output = output
        self.position = position
        self.depth = depth


class SearchSpaceError(ClusterBellError, RuntimeError):
    """Exhaustive search refused because it exceeds the evaluation guard."""

    def __init__(self, size: int, limit: int):
        super().__init__(
            f"search needs {size:,} strategy-input evaluations, guard is {limit:,}"
        )
        self.size = size
        self.limit = limit


class CoverageError(ClusterBellError, ValueError):
    def __init__(self, missing: Iterable[str]):
        self.missing = sorted(missing)
        preview = ", ".join(self.missing[:8])
        more = "" if len(self.missing) <= 8 else f" (+{len(self.missing) - 8} more)"
        super().__init__(f"missing stabilizers: {preview}{more}")


class CliqueMismatchError(ClusterBellError, ValueError):
    pass


class SingularConfusionError(ClusterBellError, ValueError):
    pass


class EmptyDatasetError(ClusterBellError, ValueError):
    pass


class ConfigError(ClusterBellError, ValueError):
    pass


__all__ = [
    "ClusterBellError",
    "DimensionError",
    "InvalidGraphError",
    "NonHermitianError",
    "UnsupportedInputSetError",
    "GeometryError",
    "SearchSpaceError",
    "CoverageError",
    "CliqueMismatchError",
    "SingularConfusionError",
    "EmptyDatasetError",
    "ConfigError",
]
