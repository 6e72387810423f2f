"""Generic finite matrices as gallery members.

Near an isolated eigenvalue c the plain solve of (V - z) y = x loses all
accuracy once |z - c| drops below the pseudospectral radius of a non-normal
cluster (for a Jordan-like block that happens far above 1e-6). When an
isolated point is declared, the resolvent inside the isolating disc is
evaluated through the Riesz split

    (V - z)^{-1} = -sum_{j<m} N^j / (z - c)^{j+1} + B_z^{-1} - P0,
    B_z = (V - z)(I - P0) + P0,   N = (V - c) P0,

where m is the nilpotency index of N. The first sum is exact and B_z stays
well conditioned near c.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, List, Optional

import numpy as np
import scipy.linalg as sla

from src.geometry.contour import ContourSpec, riesz_projection
from src.lib.config import DEFAULT_TOLERANCES, Tolerances
from src.lib.errors import NotIsolatedError
from src.lib.linalg import sigma_extremes, spectral_norm

from .base import AnalyticOperator, ResolventNorm

log = logging.getLogger(__name__)

CLUSTER_FACTOR = 1e-2
NILPOTENT_FACTOR = 1e-10


@dataclass(frozen=True, eq=False)
class RieszSplit:
    center: complex
    radius: float
    P0: np.ndarray
    powers: List[np.ndarray]  # P0, N, N^2, ..., N^{m-1}

    @property
    def index(self) -> int:
        return len(self.powers)


def nilpotency_index(n: np.ndarray, factor: float = NILPOTENT_FACTOR) -> Optional[int]:
    """Smallest m <= dim with |N^m| <= factor * max(1, |N|)^m, or None."""
    scale = max(1.0, spectral_norm(n)) if n.size else 1.0
    power = np.eye(n.shape[0], dtype=complex)
    for m in range(1, n.shape[0] + 1):
        power = power @ n
        if spectral_norm(power) <= factor * scale**m:
            return m
    return None


def build_split(v: np.ndarray, c: complex, tol: Tolerances = DEFAULT_TOLERANCES) -> RieszSplit:
    k = v.shape[0]
    eig = sla.eigvals(v)
    scale = max(1.0, spectral_norm(v))
    dist = np.abs(eig - c)
    cluster = dist <= CLUSTER_FACTOR * scale
    if not np.any(cluster):
        raise NotIsolatedError(f"{c} is not an eigenvalue")
    eye = np.eye(k, dtype=complex)
    if np.all(cluster):
        radius = np.inf
        p0 = eye
    else:
        radius = 0.5 * float(np.min(dist[~cluster]))
        p0 = riesz_projection(v, ContourSpec(center=c, radius=radius), tol).P0
    n = (v - c * eye) @ p0
    m = nilpotency_index(n)
    if m is None:
        raise NotIsolatedError(f"the eigenvalue cluster at {c} is not a single point")
    powers = [p0]
    for _ in range(1, m):
        powers.append(powers[-1] @ n)
    log.debug("Riesz split at %s: radius %.3g, nilpotency index %d", c, radius, m)
    return RieszSplit(center=complex(c), radius=radius, P0=p0, powers=powers)


class FiniteMatrix(AnalyticOperator):
    variant = "matrix"

    def __init__(
        self,
        matrix: np.ndarray,
        isolated_point: Optional[complex] = None,
        tol: Tolerances = DEFAULT_TOLERANCES,
        source: Optional[str] = None,
    ) -> None:
        m = np.asarray(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("finite_matrix needs a square matrix")
        params: dict = {"k": m.shape[0]}
        if source:
            params["source"] = source
        if isolated_point is not None:
            params["isolated_point"] = [complex(isolated_point).real, complex(isolated_point).imag]
        super().__init__(params)
        self._m = m
        self.tol = tol
        self.source = source
        self.split = build_split(m, complex(isolated_point), tol) if isolated_point is not None else None

    def matrix(self) -> np.ndarray:
        return self._m

    @property
    def isolated_zero(self) -> bool:
        return self.split is not None and self.split.center == 0

    def _in_disc(self, z: complex) -> bool:
        return self.split is not None and abs(z - self.split.center) < self.split.radius

    def in_spectrum(self, z: complex) -> bool:
        return not self.in_resolvent_set(z)

    def in_resolvent_set(self, z: complex, margin: float = 1.0) -> bool:
        z = complex(z)
        if self._in_disc(z):
            return z != self.split.center  # type: ignore[union-attr]
        smin, smax = sigma_extremes(self._m - z * np.eye(self._m.shape[0]))
        return bool(smax > 0 and smin > margin * self.tol.singularity * smax)

    def spectrum_description(self) -> str:
        eig = np.sort_complex(sla.eigvals(self._m))
        return "eigenvalues " + ", ".join(f"{complex(e):.6g}" for e in eig)

    def resolvent_matrix(self, z: complex) -> np.ndarray:
        z = complex(z)
        self.check_resolvent_point(z)
        k = self._m.shape[0]
        eye = np.eye(k, dtype=complex)
        if self._in_disc(z):
            sp = self.split
            assert sp is not None
            d = z - sp.center
            out = np.zeros((k, k), dtype=complex)
            for j, pw in enumerate(sp.powers):
                out -= pw / d ** (j + 1)
            if sp.radius != np.inf:
                b = (self._m - z * eye) @ (eye - sp.P0) + sp.P0
                out += sla.solve(b, eye) - sp.P0
            return out
        return sla.solve(self._m - z * eye, eye)

    def resolvent_apply(self, x: Any, z: complex) -> np.ndarray:
        return self.resolvent_matrix(z) @ self.vector(x)

    def resolvent_norm(self, z: complex) -> ResolventNorm:
        return ResolventNorm.exact_value(spectral_norm(self.resolvent_matrix(z)))

    def spec_string(self) -> str:
        return f"matrix:{self.source}" if self.source else f"matrix[{self._m.shape[0]}x{self._m.shape[0]}]"
