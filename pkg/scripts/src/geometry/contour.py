"""Riesz projections by trapezoidal contour quadrature.

Orientation: P0 = (1/2 pi i) oint (z - V)^{-1} dz and
V0 = (1/2 pi i) oint z (z - V)^{-1} dz over a positively oriented circle,
so a quasi-nilpotent V has P0 = I and V0 = V. The trapezoid rule on
equispaced nodes converges geometrically for these analytic integrands;
nodes double from `ContourSpec.nodes` until successive results agree to
`tol.quad_rel`.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, List, Optional, Tuple

import numpy as np
import scipy.linalg as sla

from src.lib.config import DEFAULT_TOLERANCES, Tolerances
from src.lib.errors import ContourError, ConvergenceError
from src.lib.linalg import sigma_extremes
from src.operators.base import AnalyticOperator

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ContourSpec:
    center: complex = 0.0
    radius: float = 1.0
    nodes: int = 32
    max_nodes: int = 8192

    def __post_init__(self) -> None:
        if not self.radius > 0:
            raise ValueError("contour radius must be positive")
        if self.nodes < 8:
            raise ValueError("contour quadrature needs at least 8 nodes")

    def points(self, m: int) -> Tuple[np.ndarray, np.ndarray]:
        """Nodes z_m and the weights (z_m - c)/M of (1/2 pi i) dz."""
        theta = 2.0 * np.pi * np.arange(m) / m
        offset = self.radius * np.exp(1j * theta)
        return complex(self.center) + offset, offset / m

    def to_dict(self) -> dict:
        c = complex(self.center)
        return {"center": [c.real, c.imag], "radius": self.radius, "nodes": self.nodes}


@dataclass(frozen=True, eq=False)
class RieszResult:
    P0: np.ndarray
    V0: np.ndarray
    nodes: int
    contour: ContourSpec

    @property
    def shifted_nilpotent(self) -> np.ndarray:
        """(V - c) P0, the part of V0 - c P0 that is nilpotent when c is the only enclosed eigenvalue."""
        return self.V0 - complex(self.contour.center) * self.P0

    def idempotency_defect(self) -> float:
        return float(np.linalg.norm(self.P0 @ self.P0 - self.P0))


def dense_matrix(v: Any) -> np.ndarray:
    if isinstance(v, AnalyticOperator):
        m = v.matrix()
        if m is None:
            raise ValueError(f"{v.variant} has no dense form for contour quadrature")
        return m
    m = np.asarray(v, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("contour quadrature needs a square matrix")
    return m


def _sum(v: np.ndarray, c: ContourSpec, m: int, tol: Tolerances) -> Tuple[np.ndarray, np.ndarray]:
    k = v.shape[0]
    eye = np.eye(k, dtype=complex)
    p0 = np.zeros((k, k), dtype=complex)
    v0 = np.zeros((k, k), dtype=complex)
    nodes, weights = c.points(m)
    for z, w in zip(nodes, weights):
        shifted = z * eye - v
        smin, smax = sigma_extremes(shifted)
        if smin <= tol.singularity * smax:
            raise ContourError(f"contour node {z} meets the spectrum")
        r = sla.solve(shifted, eye)
        p0 += w * r
        v0 += w * z * r
    return p0, v0


def _rel_change(new: np.ndarray, old: np.ndarray) -> float:
    return float(np.linalg.norm(new - old) / max(1.0, np.linalg.norm(new)))


def riesz_projection(v: Any, c: ContourSpec, tol: Tolerances = DEFAULT_TOLERANCES) -> RieszResult:
    mat = dense_matrix(v)
    m = c.nodes
    p_old, v_old = _sum(mat, c, m, tol)
    while True:
        m *= 2
        if m > c.max_nodes:
            raise ConvergenceError(f"Riesz quadrature did not converge with {c.max_nodes} nodes")
        p_new, v_new = _sum(mat, c, m, tol)
        change = max(_rel_change(p_new, p_old), _rel_change(v_new, v_old))
        log.debug("riesz_projection: %d nodes, relative change %.2e", m, change)
        if change < tol.quad_rel:
            return RieszResult(P0=p_new, V0=v_new, nodes=m, contour=c)
        p_old, v_old = p_new, v_new


def principal_part(
    v: Any,
    x: np.ndarray,
    c: ContourSpec,
    n_max: Optional[int] = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
    floor: float = 1e-12,
) -> List[np.ndarray]:
    """[P0 x, N P0 x, N^2 P0 x, ...] with N = V0 - c P0.

    These are the coefficients of the principal part of (V - z)^{-1} x at the
    enclosed point. The list stops at `n_max` terms or with the first term
    of norm below `floor`, which is kept as the terminator.
    """
    res = riesz_projection(v, c, tol)
    x = np.asarray(x, dtype=complex)
    n = res.shifted_nilpotent
    limit = n_max if n_max is not None else x.shape[0] + 1
    out: List[np.ndarray] = []
    term = res.P0 @ x
    while len(out) < limit:
        out.append(term)
        if np.linalg.norm(term) < floor:
            break
        term = n @ term
    return out
