# Expose commonly used symbols for convenience

from .types import CurvatureMethod, MatrixTuple, MetricSample, PencilPoint, ResolventSample, CurvatureSample
from .config import DEFAULT_TOLERANCES, Tolerances

__all__ = [
    "CurvatureMethod",
    "CurvatureSample",
    "MatrixTuple",
    "MetricSample",
    "PencilPoint",
    "ResolventSample",
    "DEFAULT_TOLERANCES",
    "Tolerances",
]
