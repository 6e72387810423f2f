"""Matrix pencils A(z) = z_1 A_1 + ... + z_n A_n and their joint spectrum.

A point z belongs to the projective joint spectrum P(A) when A(z) is not
invertible. Numerically that is decided by the scale-free test
sigma_min(A(z)) <= tol.singularity * sigma_max(A(z)); the threshold is the
only place where "not invertible" gets a meaning, and callers can change it
through `Tolerances`.

`spectrum_slice` samples sigma_min on a grid over one or two free coordinates
and refines the candidate cells, instead of root-finding det A(z), which
under/overflows for large k.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as sla

from src.lib.config import DEFAULT_TOLERANCES, Tolerances
from src.lib.errors import DimensionMismatchError, SingularPointError
from src.lib.grid import GridAxis, ordered_map
from src.lib.linalg import sigma_extremes
from src.lib.types import MatrixTuple, PencilPoint, ResolventSample, as_point

log = logging.getLogger(__name__)


def pencil_eval(a: MatrixTuple, z) -> np.ndarray:
    """Sum_j z_j A_j, accumulated in index order."""
    p = as_point(z)
    if p.n != a.n:
        raise DimensionMismatchError(f"point has {p.n} coordinates, tuple has {a.n} entries")
    out = np.zeros((a.k, a.k), dtype=complex)
    for zj, aj in zip(p.z, a.matrices):
        out += zj * aj
    return out


def resolvent(a: MatrixTuple, z, tol: Tolerances = DEFAULT_TOLERANCES) -> ResolventSample:
    p = as_point(z)
    m = pencil_eval(a, p)
    smin, smax = sigma_extremes(m)
    invertible = smax > 0 and smin > tol.singularity * smax
    inverse = None
    if invertible:
        inverse = sla.solve(m, np.eye(a.k, dtype=complex))
        resid = np.linalg.norm(m @ inverse - np.eye(a.k))
        bound = tol.residual * (1.0 + np.linalg.norm(m) * np.linalg.norm(inverse))
        if resid > bound:
            log.warning("resolvent residual %.3e exceeds %.3e at z=%s", resid, bound, p.z)
    return ResolventSample(
        z=p,
        pencil_value=m,
        inverse=inverse,
        smallest_singular_value=smin,
        largest_singular_value=smax,
        invertible=invertible,
    )


def in_joint_spectrum(a: MatrixTuple, z, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
    return not resolvent(a, z, tol).invertible


def maurer_cartan_coeffs(a: MatrixTuple, z, tol: Tolerances = DEFAULT_TOLERANCES) -> List[np.ndarray]:
    """Coefficients omega_j(z) = A(z)^{-1} A_j of the Maurer-Cartan form."""
    sample = resolvent(a, z, tol)
    if not sample.invertible:
        raise SingularPointError(f"z={sample.z.z} lies in the joint spectrum")
    inv = sample.inverse
    assert inv is not None
    return [inv @ aj for aj in a.matrices]


def left_multiply(a: MatrixTuple, l: np.ndarray) -> MatrixTuple:
    """The tuple LA = (L A_1, ..., L A_n); P(LA) = P(A) for invertible L."""
    l = np.asarray(l, dtype=complex)
    return MatrixTuple(matrices=tuple(l @ m for m in a.matrices), normalized=False, tol=a.tol)


@dataclass(frozen=True)
class FreeAxis:
    """One real direction of a spectrum slice: z[coord] += t * direction."""

    coord: int
    axis: GridAxis
    direction: complex = 1.0


@dataclass(frozen=True, eq=False)
class SliceSpec:
    base: PencilPoint
    axes: Tuple[FreeAxis, ...]
    flag_level: float = 0.25
    crossing_factor: float = 4.0
    refine_tol: float = 1e-2

    def __post_init__(self) -> None:
        if not self.axes:
            raise ValueError("spectrum slice needs at least one free axis")
        if len(self.axes) > 2:
            raise ValueError("spectrum slice supports one or two grid axes")
        for ax in self.axes:
            if not 0 <= ax.coord < self.base.n:
                raise DimensionMismatchError(f"free coordinate {ax.coord} out of range")

    @classmethod
    def complex_plane(cls, base: PencilPoint, coord: int, re: GridAxis, im: GridAxis, **kw) -> "SliceSpec":
        """One free complex coordinate sampled over a rectangle."""
        return cls(base=base, axes=(FreeAxis(coord, re, 1.0), FreeAxis(coord, im, 1j)), **kw)

    @classmethod
    def real_pair(cls, base: PencilPoint, coords: Tuple[int, int], x: GridAxis, y: GridAxis, **kw) -> "SliceSpec":
        """Two free coordinates restricted to real values."""
        return cls(base=base, axes=(FreeAxis(coords[0], x), FreeAxis(coords[1], y)), **kw)

    def point(self, params: Sequence[float]) -> PencilPoint:
        z = np.array(self.base.z, dtype=complex)
        for t, ax in zip(params, self.axes):
            z[ax.coord] += t * ax.direction
        return PencilPoint(z)


@dataclass(frozen=True, eq=False)
class SlicePoint:
    grid_index: Tuple[int, ...]
    params: Tuple[float, ...]
    z: PencilPoint
    sigma_ratio: float

    def to_dict(self) -> dict:
        return {
            "grid_index": list(self.grid_index),
            "params": list(self.params),
            "z": self.z.to_list(),
            "sigma_ratio": self.sigma_ratio,
        }


def _sigma_ratio(a: MatrixTuple, spec: SliceSpec, params: Sequence[float]) -> float:
    smin, smax = sigma_extremes(pencil_eval(a, spec.point(params)))
    return 0.0 if smax == 0 else smin / smax


def _flagged(values: np.ndarray, spec: SliceSpec) -> List[Tuple[int, ...]]:
    flagged = []
    padded = np.pad(values, 1, mode="constant", constant_values=np.inf)
    for idx in itertools.product(*(range(s) for s in values.shape)):
        v = values[idx]
        center = tuple(i + 1 for i in idx)
        local_min = False
        steep = False
        for d in range(values.ndim):
            lo = list(center)
            hi = list(center)
            lo[d] -= 1
            hi[d] += 1
            nb_lo, nb_hi = padded[tuple(lo)], padded[tuple(hi)]
            if v <= nb_lo and v <= nb_hi:
                local_min = True
            finite = [x for x in (nb_lo, nb_hi) if np.isfinite(x)]
            if v > 0 and finite and max(finite) / v > spec.crossing_factor:
                steep = True
        if (local_min and v <= spec.flag_level) or steep or v == 0.0:
            flagged.append(idx)
    return flagged


def _refine(a: MatrixTuple, spec: SliceSpec, params: np.ndarray, value: float, depth: int) -> Tuple[np.ndarray, float]:
    step = np.array([ax.axis.step for ax in spec.axes])
    best, best_v = params.copy(), value
    moves = list(itertools.product((-1.0, 0.0, 1.0), repeat=len(spec.axes)))
    for _ in range(depth):
        step = step / 2.0
        center = best.copy()
        for mv in moves:
            cand = center + step * np.asarray(mv)
            v = _sigma_ratio(a, spec, cand)
            if v < best_v:
                best, best_v = cand, v
    return best, best_v


def spectrum_slice(
    a: MatrixTuple,
    spec: SliceSpec,
    refine_depth: int = 12,
    workers: Optional[int] = None,
) -> List[SlicePoint]:
    """Sampled points of P(A) on a one- or two-parameter slice.

    Grid nodes are flagged where sigma_min/sigma_max has a local dip below
    `spec.flag_level` or jumps by more than `spec.crossing_factor` against a
    neighbour; each flagged node is then refined by a shrinking pattern search.
    Points whose final ratio exceeds `spec.refine_tol` are dropped. Output is
    ordered by grid index.
    """
    grids = [ax.axis.values() for ax in spec.axes]
    shape = tuple(len(g) for g in grids)
    if any(s == 0 for s in shape):
        raise ValueError("empty grid")
    indices = list(itertools.product(*(range(s) for s in shape)))
    values = ordered_map(
        lambda idx: _sigma_ratio(a, spec, [g[i] for g, i in zip(grids, idx)]),
        indices,
        workers,
    )
    table = np.array(values).reshape(shape)
    flagged = _flagged(table, spec)
    log.debug("spectrum_slice: %d of %d grid nodes flagged", len(flagged), len(indices))

    def refine(idx):
        start = np.array([g[i] for g, i in zip(grids, idx)], dtype=float)
        return _refine(a, spec, start, float(table[idx]), refine_depth)

    refined = ordered_map(refine, flagged, workers)
    min_sep = min(ax.axis.step for ax in spec.axes) * 2.0 ** (-refine_depth)
    out: List[SlicePoint] = []
    for idx, (params, ratio) in zip(flagged, refined):
        if ratio > spec.refine_tol:
            continue
        if any(np.max(np.abs(np.asarray(p.params) - params)) <= min_sep for p in out):
            continue
        out.append(SlicePoint(idx, tuple(float(t) for t in params), spec.point(params), float(ratio)))
    log.info("spectrum_slice: %d spectral points after refinement", len(out))
    return out
