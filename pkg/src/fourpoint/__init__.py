"""Solver for four-anchor inverse-square distance systems in the plane."""

__version__ = "0.1.0"

from .geometry import Configuration, Point2, PlaneTransform, normalize, validate  # noqa: E402
from .solver import Classification, SolutionPair, SolveReport, Tolerances, solve  # noqa: E402

__all__ = [
    "Classification",
    "Configuration",
    "PlaneTransform",
    "Point2",
    "SolutionPair",
    "SolveReport",
    "Tolerances",
    "normalize",
    "solve",
    "validate",
]
