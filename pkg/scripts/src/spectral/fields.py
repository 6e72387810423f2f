"""Metric fields: a metric matrix function z -> g(z) together with its domain.

Curvature and path-length code only needs three things from a metric: its
value at a point, log det g there, and whether a point (with some safety
margin) lies in the domain. `MetricField` bundles them so that tuple
metrics, single-operator metrics and test fields all flow through the same
numerics. Values follow the squared-norm convention g = |.|^2.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Optional

import numpy as np

from src.lib.config import DEFAULT_TOLERANCES, Tolerances
from src.lib.errors import DimensionMismatchError
from src.lib.linalg import sigma_extremes
from src.lib.types import MatrixTuple, MetricSample, PencilPoint, as_point
from src.operators.base import AnalyticOperator
from src.operators.matrix import FiniteMatrix

from .forms import StateFunctional, metric_matrix, metric_sample
from .pencil import pencil_eval

Evaluator = Callable[[PencilPoint], MetricSample]
Contains = Callable[[PencilPoint, float], bool]


def as_operator(v: Any, tol: Tolerances = DEFAULT_TOLERANCES) -> AnalyticOperator:
    if isinstance(v, AnalyticOperator):
        return v
    return FiniteMatrix(np.asarray(v, dtype=complex), tol=tol)


def _scalar(p: PencilPoint) -> complex:
    if p.n != 1:
        raise DimensionMismatchError(f"single-operator metrics live on C, got a point with {p.n} coordinates")
    return complex(p.z[0])


def _resolvent_columns(op: AnalyticOperator, z: complex) -> np.ndarray:
    if isinstance(op, FiniteMatrix):
        return op.resolvent_matrix(z)
    k = op.dim
    if k is None:
        raise ValueError(f"{op.variant} has no finite matrix form")
    return np.stack([op.resolvent_apply(e, z) for e in np.eye(k, dtype=complex)], axis=1)


@dataclass(frozen=True, eq=False)
class MetricField:
    evaluator: Evaluator
    n: int
    contains: Contains
    description: str = ""
    log_det_fn: Optional[Callable[[PencilPoint], float]] = None

    def __call__(self, z) -> MetricSample:
        p = as_point(z)
        if p.n != self.n:
            raise DimensionMismatchError(f"field lives on C^{self.n}, got {p.n} coordinates")
        return self.evaluator(p)

    def log_det(self, z) -> float:
        """log det g(z); -inf or nan when g is not positive definite there."""
        p = as_point(z)
        if self.log_det_fn is not None:
            return float(self.log_det_fn(p))
        sign, logdet = np.linalg.slogdet(self(p).g)
        if np.real(sign) <= 0:
            return float("nan")
        return float(logdet)

    def speed_sq(self, z, dz) -> float:
        """v^* g(z) v for the tangent vector v = dz."""
        v = np.atleast_1d(np.asarray(dz, dtype=complex))
        g = self(z).g
        return float(np.real(np.vdot(v, g @ v)))

    # constructors --------------------------------------------------------

    @classmethod
    def from_tuple(
        cls, a: MatrixTuple, phi: Optional[StateFunctional] = None, tol: Tolerances = DEFAULT_TOLERANCES
    ) -> "MetricField":
        phi = phi or StateFunctional.trace()

        def contains(p: PencilPoint, margin: float = 1.0) -> bool:
            smin, smax = sigma_extremes(pencil_eval(a, p))
            return bool(smax > 0 and smin > margin * tol.singularity * smax)

        return cls(
            evaluator=lambda p: metric_matrix(a, p, phi, tol),
            n=a.n,
            contains=contains,
            description=f"{phi.kind.value}-state metric of a {a.k}x{a.k} tuple of length {a.n}",
        )

    @classmethod
    def vector_state(cls, op: Any, x: Any, tol: Tolerances = DEFAULT_TOLERANCES) -> "MetricField":
        """g_x(z) = |(V - z)^{-1} x|^2 on the resolvent set of a single operator."""
        v = as_operator(op, tol)
        xv = v.vector(x)

        def evaluate(p: PencilPoint) -> MetricSample:
            g = v.vector_metric(xv, _scalar(p))
            return metric_sample(p, np.array([[g]], dtype=complex), tol)

        return cls(
            evaluator=evaluate,
            n=1,
            contains=lambda p, margin=1.0: v.in_resolvent_set(_scalar(p), margin),
            description=f"vector-state metric of {v.spec_string()}",
            log_det_fn=lambda p: v.log_vector_metric(xv, _scalar(p)),
        )

    @classmethod
    def trace_state(cls, op: Any, tol: Tolerances = DEFAULT_TOLERANCES) -> "MetricField":
        """g_V(z) = Tr(R^* R)/k with R = (V - z)^{-1}."""
        v = as_operator(op, tol)

        def log_g(p: PencilPoint) -> float:
            r = _resolvent_columns(v, _scalar(p))
            return float(2.0 * np.log(np.linalg.norm(r)) - np.log(r.shape[0]))

        return cls(
            evaluator=lambda p: metric_sample(p, np.array([[np.exp(log_g(p))]], dtype=complex), tol),
            n=1,
            contains=lambda p, margin=1.0: v.in_resolvent_set(_scalar(p), margin),
            description=f"trace-state metric of {v.spec_string()}",
            log_det_fn=log_g,
        )

    @classmethod
    def operator_norm(cls, op: Any, tol: Tolerances = DEFAULT_TOLERANCES) -> "MetricField":
        """g(z) = |(V - z)^{-1}|^2; bracketed variants use the bracket midpoint."""
        v = as_operator(op, tol)

        def log_g(p: PencilPoint) -> float:
            lo, hi = v.log_metric_bracket(_scalar(p))
            return 0.5 * (lo + hi)

        return cls(
            evaluator=lambda p: metric_sample(p, np.array([[np.exp(log_g(p))]], dtype=complex), tol),
            n=1,
            contains=lambda p, margin=1.0: v.in_resolvent_set(_scalar(p), margin),
            description=f"operator-norm metric of {v.spec_string()}",
            log_det_fn=log_g,
        )

    @classmethod
    def from_function(
        cls,
        fn: Callable[[np.ndarray], Any],
        n: int,
        contains: Optional[Callable[[np.ndarray], bool]] = None,
        description: str = "",
        tol: Tolerances = DEFAULT_TOLERANCES,
    ) -> "MetricField":
        """Wrap fn(z) -> n x n matrix (a scalar is accepted for n = 1)."""

        def evaluate(p: PencilPoint) -> MetricSample:
            g = np.atleast_2d(np.asarray(fn(p.z), dtype=complex))
            if g.shape != (n, n):
                raise DimensionMismatchError(f"metric function returned shape {g.shape}, expected {(n, n)}")
            return metric_sample(p, g, tol)

        inside = contains or (lambda z: True)
        return cls(
            evaluator=evaluate,
            n=n,
            contains=lambda p, margin=1.0: bool(inside(p.z)),
            description=description or "user metric",
        )

    @classmethod
    def euclidean(cls, n: int = 1) -> "MetricField":
        return cls.from_function(lambda z: np.eye(n), n, description=f"euclidean metric on C^{n}")
