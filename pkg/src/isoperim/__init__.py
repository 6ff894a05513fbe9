"""Rigorous interval-arithmetic verification of the sharp Hamming-cube
isoperimetric inequality for the square root of the edge boundary, together
with exhaustive discrete cross-checks on small cubes."""

__version__ = "0.1.0"

from .interval import Interval, DomainError, IntervalError, RangeError
from .gaussian import BellmanParams, default_params
from .report import Report, ReportItem

__all__ = [
    "Interval",
    "DomainError",
    "IntervalError",
    "RangeError",
    "BellmanParams",
    "default_params",
    "Report",
    "ReportItem",
    "__version__",
]
