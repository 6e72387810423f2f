"""Ricci curvature R_jk = -d_j dbar_k log det g.

Normalization: d dbar = (1/4) Laplacian, so that d dbar |z|^2 = 1.

For a vector-state metric g_x(z) = |r_1|^2 with r_1 = (V - z)^{-1} x and
r_2 = (V - z)^{-2} x the curvature has the closed form

    R = -(|r_2|^2 |r_1|^2 - |<r_2, r_1>|^2) / |r_1|^4,

which is evaluated as -|r_2 - P r_2|^2 / |r_1|^2 (P the orthogonal projection
onto r_1) so that the sign never flips through cancellation. The trace-state
metric of a single matrix is the same formula on matrices with the Frobenius
inner product. Everything else goes through the finite-difference Hessian of
log det g over the 2n real coordinates.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np

from src.lib.config import DEFAULT_TOLERANCES, Tolerances
from src.lib.errors import InvalidTupleError, SingularPointError, StencilError
from src.lib.types import CurvatureMethod, CurvatureSample, MatrixTuple, PencilPoint, as_point
from src.operators.matrix import FiniteMatrix

from .fields import MetricField, as_operator
from .forms import StateFunctional, metric_matrix
from .pencil import pencil_eval

log = logging.getLogger(__name__)

STENCIL_MARGIN = 10.0


def _projected_curvature(r1: np.ndarray, r2: np.ndarray, inner: Callable[[Any, Any], complex]) -> float:
    n1 = float(np.real(inner(r1, r1)))
    if n1 <= 0:
        raise SingularPointError("resolvent vanishes on the chosen vector")
    resid = r2 - (inner(r2, r1) / n1) * r1
    return -float(np.real(inner(resid, resid))) / n1


def ricci_vector_state(v: Any, x: Any, z: complex, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """Closed-form curvature of g_x; always <= 0 and invariant under x -> c x."""
    op = as_operator(v, tol)
    z = complex(z)
    op.check_resolvent_point(z)
    r1 = op.resolvent_apply(x, z)
    r2 = op.resolvent_apply(r1, z)
    return _projected_curvature(r1, r2, op.inner)


def ricci_trace_state(v: Any, z: complex, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """Closed-form curvature of g_V(z) = Tr(R^* R)/k, R = (V - z)^{-1}."""
    op = as_operator(v, tol)
    if not isinstance(op, FiniteMatrix):
        raise ValueError("trace-state curvature needs a finite matrix")
    r = op.resolvent_matrix(complex(z))
    r1 = r.reshape(-1)
    r2 = (r @ r).reshape(-1)
    return _projected_curvature(r1, r2, lambda a, b: complex(np.vdot(b, a)))


def default_step(z: PencilPoint) -> float:
    return 1e-4 * max(1.0, float(np.linalg.norm(z.z)))


def ricci_tensor_fd(
    field: MetricField,
    z,
    h: Optional[float] = None,
    margin: float = STENCIL_MARGIN,
) -> CurvatureSample:
    """Finite-difference Ricci tensor of `field` at z, O(h^2) accurate.

    Real coordinates are ordered (x_1..x_n, y_1..y_n). Diagonal second
    derivatives use the three-point stencil, mixed ones the four-point
    stencil; every stencil point must lie in the field's domain with
    `margin` times the usual singularity threshold.
    """
    p = as_point(z)
    n = p.n
    if n != field.n:
        raise StencilError(f"field lives on C^{field.n}, point has {n} coordinates")
    step = float(h) if h is not None else default_step(p)
    if not step > 0:
        raise ValueError("finite-difference step must be positive")
    cache: Dict[Tuple[int, ...], float] = {}

    def f(offset: Tuple[int, ...]) -> float:
        if offset not in cache:
            shift = np.array(offset[:n], dtype=float) + 1j * np.array(offset[n:], dtype=float)
            q = p.shifted(step * shift)
            if not field.contains(q, margin):
                raise StencilError(f"stencil point {q.z} leaves the domain of the metric")
            val = field.log_det(q)
            if not np.isfinite(val):
                raise StencilError(f"det g is not positive at {q.z}")
            cache[offset] = val
        return cache[offset]

    m = 2 * n
    zero = (0,) * m

    def unit(*pairs: Tuple[int, int]) -> Tuple[int, ...]:
        out = [0] * m
        for idx, s in pairs:
            out[idx] += s
        return tuple(out)

    hess = np.zeros((m, m))
    f0 = f(zero)
    for a in range(m):
        hess[a, a] = (f(unit((a, 1))) - 2.0 * f0 + f(unit((a, -1)))) / step**2
    for a, b in itertools.combinations(range(m), 2):
        val = (
            f(unit((a, 1), (b, 1)))
            - f(unit((a, 1), (b, -1)))
            - f(unit((a, -1), (b, 1)))
            + f(unit((a, -1), (b, -1)))
        ) / (4.0 * step**2)
        hess[a, b] = hess[b, a] = val

    hx = hess[:n, :n]
    hy = hess[n:, n:]
    hxy = hess[:n, n:]
    ricci = -0.25 * ((hx + hy) + 1j * (hxy - hxy.T))
    log.debug("ricci_tensor_fd: %d log-det evaluations at h=%.2e", len(cache), step)
    return CurvatureSample(z=p, ricci=ricci, method=CurvatureMethod.FINITE_DIFFERENCE, step=step)


def ricci_analytic_sample(v: Any, z: complex, x: Any = None, tol: Tolerances = DEFAULT_TOLERANCES) -> CurvatureSample:
    """Closed-form curvature wrapped as a sample: vector state when x is given, trace state otherwise."""
    value = ricci_vector_state(v, x, z, tol) if x is not None else ricci_trace_state(v, z, tol)
    return CurvatureSample(
        z=PencilPoint.of(z), ricci=np.array([[value]], dtype=complex), method=CurvatureMethod.ANALYTIC
    )


@dataclass(frozen=True)
class GLkDeterminant:
    """det of the unnormalized-trace metric next to |det alpha|^2 |det A(z)|^{-2k}."""

    det_g: float
    predicted: float
    k: int

    @property
    def relative_error(self) -> float:
        return abs(self.det_g - self.predicted) / max(abs(self.det_g), abs(self.predicted))

    def to_dict(self) -> dict:
        return {
            "det_g": self.det_g,
            "predicted": self.predicted,
            "relative_error": self.relative_error,
            "trace_convention": "unnormalized Tr (k times the Tr/k metric)",
        }


def glk_metric_det(a: MatrixTuple, z, tol: Tolerances = DEFAULT_TOLERANCES) -> GLkDeterminant:
    k = a.k
    if a.n != k * k:
        raise InvalidTupleError(f"a spanning tuple of M_{k} has {k * k} entries, got {a.n}")
    alpha = np.stack([m.reshape(-1) for m in a.matrices], axis=1)
    sign_a, logdet_a = np.linalg.slogdet(alpha)
    if abs(sign_a) == 0:
        raise InvalidTupleError("tuple does not span the full matrix algebra")
    sample = metric_matrix(a, z, StateFunctional.trace(), tol)
    sign_g, logdet_g = np.linalg.slogdet(k * sample.g)
    if np.real(sign_g) <= 0:
        raise SingularPointError("metric is degenerate at z")
    _, logdet_p = np.linalg.slogdet(pencil_eval(a, z))
    return GLkDeterminant(
        det_g=float(np.exp(logdet_g)),
        predicted=float(np.exp(2.0 * logdet_a - 2.0 * k * logdet_p)),
        k=k,
    )
