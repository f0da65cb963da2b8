"""Exception types shared across the package.

Every failure mode that callers are expected to branch on gets its own
class; plain ValueError is reserved for programming errors.
"""

__all__ = [
    "WeakbeamError",
    "FieldFormatError",
    "GridError",
    "WindowError",
    "ParameterError",
    "SelectionError",
    "DegenerateDataError",
    "AggregationError",
    "DimensionError",
    "RankDeficiencyWarning",
]


class WeakbeamError(Exception):
    """Base class for all package-specific errors."""


class FieldFormatError(WeakbeamError):
    """A field file violates the text format (header, counts, parse)."""


class GridError(WeakbeamError):
    """Grid axes are malformed: non-uniform, non-increasing, wrong size."""


class WindowError(WeakbeamError):
    """A requested time window does not intersect the grid."""


class ParameterError(WeakbeamError):
    """A numeric parameter is out of its admissible range."""


class SelectionError(WeakbeamError):
    """Hyperparameter selection cannot produce an admissible configuration."""


class DegenerateDataError(WeakbeamError):
    """The data is identically zero or otherwise carries no signal."""


class AggregationError(WeakbeamError):
    """An ensemble produced no successful runs to aggregate."""


class DimensionError(WeakbeamError):
    """Two fields that must share a grid do not."""


class RankDeficiencyWarning(UserWarning):
    """Least-squares system was rank deficient; solution is minimum-norm."""
