"""Path lengths under (possibly singular) metric fields.

A path is parametrized on t in [0, 1]. Its length under a metric field is
the integral of sqrt(z'(t)^* g(z(t)) z'(t)). A piece whose endpoint lies
outside the field's domain is integrated as an improper integral: the
parameter interval is cut into dyadic levels toward the bad endpoint and the
level contributions are summed with a geometric tail estimate. Contributions
that stop decaying mean the length is infinite, which is reported rather than
raised.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src.lib.config import DEFAULT_TOLERANCES, Tolerances
from src.lib.data import complex_to_pair, pair_to_complex
from src.lib.errors import ConvergenceError, DimensionMismatchError, SingularPointError
from src.lib.linalg import log_singular_sum
from src.lib.quadrature import adaptive_quad
from src.lib.types import MatrixTuple, PencilPoint
from src.spectral.fields import MetricField, as_operator
from src.spectral.pencil import pencil_eval

log = logging.getLogger(__name__)

DIVERGENCE_CAP = 1e6
STALL_RATIO = 0.95
STALL_LEVELS = 5
MAX_LEVELS = 48


class PathKind(Enum):
    POLYLINE = "polyline"
    CIRCLE = "circle"
    CALLABLE = "callable"


@dataclass(frozen=True, eq=False)
class ParamPath:
    kind: PathKind
    vertices: Optional[np.ndarray] = None
    center: complex = 0.0
    radius: float = 1.0
    turns: int = 1
    orientation: int = 1
    fn: Optional[Callable[[float], Any]] = field(default=None, repr=False)
    deriv: Optional[Callable[[float], Any]] = field(default=None, repr=False)
    dim: int = 1

    def __post_init__(self) -> None:
        if self.kind is PathKind.POLYLINE:
            if self.vertices is None:
                raise ValueError("polyline needs vertices")
            v = np.asarray(self.vertices, dtype=complex)
            if v.ndim == 1:
                v = v[:, None]
            if v.shape[0] < 2:
                raise ValueError("polyline needs at least two vertices")
            v.setflags(write=False)
            object.__setattr__(self, "vertices", v)
            object.__setattr__(self, "dim", v.shape[1])
        elif self.kind is PathKind.CIRCLE:
            if not self.radius > 0:
                raise ValueError("circle radius must be positive")
            if self.turns < 1 or self.orientation not in (1, -1):
                raise ValueError("circle needs turns >= 1 and orientation +1 or -1")
        elif self.fn is None or self.deriv is None:
            raise ValueError("callable path needs z(t) and z'(t)")

    @classmethod
    def polyline(cls, vertices: Sequence[Any]) -> "ParamPath":
        return cls(PathKind.POLYLINE, vertices=np.asarray(vertices, dtype=complex))

    @classmethod
    def segment(cls, a: Any, b: Any) -> "ParamPath":
        return cls.polyline([np.atleast_1d(a), np.atleast_1d(b)])

    @classmethod
    def circle(cls, center: complex = 0.0, radius: float = 1.0, turns: int = 1, orientation: int = 1) -> "ParamPath":
        return cls(PathKind.CIRCLE, center=complex(center), radius=float(radius), turns=int(turns), orientation=int(orientation))

    @classmethod
    def from_callable(cls, fn: Callable[[float], Any], deriv: Callable[[float], Any], dim: int = 1) -> "ParamPath":
        return cls(PathKind.CALLABLE, fn=fn, deriv=deriv, dim=dim)

    @property
    def breakpoints(self) -> np.ndarray:
        if self.kind is PathKind.POLYLINE:
            assert self.vertices is not None
            return np.linspace(0.0, 1.0, self.vertices.shape[0])
        return np.array([0.0, 1.0])

    def _segment(self, t: float) -> Tuple[int, float]:
        assert self.vertices is not None
        m = self.vertices.shape[0] - 1
        i = min(int(np.floor(t * m)), m - 1)
        return i, t * m - i

    def point(self, t: float) -> np.ndarray:
        if self.kind is PathKind.POLYLINE:
            assert self.vertices is not None
            i, s = self._segment(t)
            return (1.0 - s) * self.vertices[i] + s * self.vertices[i + 1]
        if self.kind is PathKind.CIRCLE:
            w = 2.0 * np.pi * self.orientation * self.turns * t
            return np.array([self.center + self.radius * np.exp(1j * w)])
        assert self.fn is not None
        return np.atleast_1d(np.asarray(self.fn(t), dtype=complex))

    def velocity(self, t: float) -> np.ndarray:
        if self.kind is PathKind.POLYLINE:
            assert self.vertices is not None
            i, _ = self._segment(t)
            return (self.vertices[i + 1] - self.vertices[i]) * (self.vertices.shape[0] - 1)
        if self.kind is PathKind.CIRCLE:
            k = 2.0 * np.pi * self.orientation * self.turns
            return 1j * k * (self.point(t) - self.center)
        assert self.deriv is not None
        return np.atleast_1d(np.asarray(self.deriv(t), dtype=complex))

    def to_dict(self) -> dict:
        if self.kind is PathKind.POLYLINE:
            assert self.vertices is not None
            return {"kind": "polyline", "vertices": [[complex_to_pair(c) for c in row] for row in self.vertices]}
        if self.kind is PathKind.CIRCLE:
            return {
                "kind": "circle",
                "center": complex_to_pair(self.center),
                "radius": self.radius,
                "turns": self.turns,
                "orientation": self.orientation,
            }
        raise ValueError("callable paths are not serializable")

    @classmethod
    def from_dict(cls, d: dict) -> "ParamPath":
        kind = d.get("kind")
        if kind == "polyline":
            rows = []
            for row in d["vertices"]:
                # a vertex is [re, im] on C or a list of pairs on C^n
                if len(row) == 2 and not isinstance(row[0], (list, tuple)):
                    rows.append([pair_to_complex(row)])
                else:
                    rows.append([pair_to_complex(p) for p in row])
            return cls.polyline(rows)
        if kind == "circle":
            return cls.circle(
                center=pair_to_complex(d.get("center", [0.0, 0.0])),
                radius=float(d["radius"]),
                turns=int(d.get("turns", 1)),
                orientation=int(d.get("orientation", 1)),
            )
        raise ValueError(f"unknown path kind {kind!r}")


@dataclass(frozen=True)
class PathLength:
    value: float
    diverged: bool = False
    levels: int = 0

    def to_dict(self) -> dict:
        return {"length": None if self.diverged else self.value, "diverged": self.diverged, "dyadic_levels": self.levels}


def _speed(fld: MetricField, path: ParamPath) -> Callable[[float], float]:
    def speed(t: float) -> float:
        return float(np.sqrt(max(fld.speed_sq(PencilPoint(path.point(t)), path.velocity(t)), 0.0)))

    return speed


def _inside(fld: MetricField, path: ParamPath, t: float) -> bool:
    return bool(fld.contains(PencilPoint(path.point(t)), 1.0))


def _improper(
    speed: Callable[[float], float], bad: float, good: float, epsrel: float
) -> Tuple[float, bool, int]:
    """Integral from `good` to the singular endpoint `bad` by dyadic levels."""
    span = good - bad
    total = 0.0
    prev_c: Optional[float] = None
    prev_est: Optional[float] = None
    stalled = 0
    for level in range(MAX_LEVELS):
        near = bad + span / 2.0 ** (level + 1)
        far = bad + span / 2.0**level
        c, _ = adaptive_quad(speed, min(near, far), max(near, far), epsrel=epsrel)
        total += c
        if total > DIVERGENCE_CAP:
            log.warning("path length exceeds %.0e toward t=%g; declared divergent", DIVERGENCE_CAP, bad)
            return float("inf"), True, level + 1
        if prev_c is None or prev_c <= 0.0:
            prev_c = c
            continue
        ratio = c / prev_c
        stalled = stalled + 1 if ratio >= STALL_RATIO else 0
        if stalled >= STALL_LEVELS:
            log.warning("dyadic contributions stopped decaying toward t=%g; declared divergent", bad)
            return float("inf"), True, level + 1
        prev_c = c
        if ratio >= 1.0:
            continue
        est = total + c * ratio / (1.0 - ratio)
        log.debug("level %d: contribution %.3e, ratio %.4f, estimate %.12g", level, c, ratio, est)
        if prev_est is not None and abs(est - prev_est) <= epsrel * abs(est):
            return est, False, level + 1
        if c <= 0.1 * epsrel * total:
            return est, False, level + 1
        prev_est = est
    if prev_est is None:
        raise ConvergenceError(f"improper integral toward t={bad} did not settle")
    log.warning("improper integral toward t=%g stopped at %d levels", bad, MAX_LEVELS)
    return prev_est, False, MAX_LEVELS


def path_length(
    fld: MetricField,
    path: ParamPath,
    epsrel: float = 1e-8,
) -> PathLength:
    """Length of `path` under the metric field, with improper singular endpoints."""
    if path.dim != fld.n:
        raise DimensionMismatchError(f"path lives in C^{path.dim}, field in C^{fld.n}")
    speed = _speed(fld, path)
    bps = path.breakpoints
    for t in bps[1:-1]:
        if not _inside(fld, path, t):
            raise SingularPointError(f"path vertex at t={t:g} leaves the domain of the metric")
    total = 0.0
    levels = 0
    for t0, t1 in zip(bps[:-1], bps[1:]):
        bad0 = not _inside(fld, path, t0)
        bad1 = not _inside(fld, path, t1)
        if not (bad0 or bad1):
            value, _ = adaptive_quad(speed, t0, t1, epsrel=epsrel)
            total += value
            continue
        mid = 0.5 * (t0 + t1)
        if bad0 and bad1:
            if not _inside(fld, path, mid):
                raise SingularPointError(f"path midpoint t={mid:g} leaves the domain of the metric")
            pieces = [(t0, mid), (t1, mid)]
        elif bad0:
            pieces = [(t0, t1)]
        else:
            pieces = [(t1, t0)]
        for bad, good in pieces:
            value, diverged, used = _improper(speed, bad, good, epsrel)
            levels += used
            if diverged:
                return PathLength(float("inf"), diverged=True, levels=levels)
            total += value
    log.info("path length %.10g (%d dyadic levels)", total, levels)
    return PathLength(total, diverged=False, levels=levels)


def circle_length(
    op: Any,
    r: float,
    x: Any = None,
    center: complex = 0.0,
    turns: int = 1,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    """L_x(C_r) = r * int |(V - z)^{-1} x| d theta; with x None the operator norm replaces the vector norm."""
    v = as_operator(op, tol)
    fld = MetricField.vector_state(v, x, tol) if x is not None else MetricField.operator_norm(v, tol)
    path = ParamPath.circle(center=center, radius=r, turns=turns)
    for t in np.linspace(0.0, 1.0, 16, endpoint=False):
        if not _inside(fld, path, float(t)):
            raise SingularPointError(f"circle of radius {r} about {center} meets the spectrum")
    result = path_length(fld, path)
    return result.value


def distance_lower_bound(a: MatrixTuple, p: Any, q: Any) -> float:
    """|phi(log|A(p)|) - phi(log|A(q)|)| with phi = Tr/k; +inf when exactly one endpoint is singular."""
    lp = log_singular_sum(pencil_eval(a, p))
    lq = log_singular_sum(pencil_eval(a, q))
    if np.isinf(lp) and np.isinf(lq):
        raise SingularPointError("both endpoints are singular")
    if np.isinf(lp) or np.isinf(lq):
        return float("inf")
    return abs(lp - lq) / a.k


def winding_number(path: ParamPath, p: complex, samples: int = 256, max_depth: int = 30) -> int:
    """Accumulated change of arg(z(t) - p) over 2 pi, with every step kept below pi/2."""
    if path.dim != 1:
        raise DimensionMismatchError("winding numbers need a path in C")
    p = complex(p)

    def w(t: float) -> complex:
        d = complex(path.point(t)[0]) - p
        if abs(d) <= 1e-14 * max(1.0, abs(p)):
            raise SingularPointError(f"the point {p} lies on the path")
        return d

    def step(t0: float, t1: float, w0: complex, w1: complex, depth: int) -> float:
        delta = float(np.angle(w1 / w0))
        if abs(delta) < 0.5 * np.pi:
            return delta
        if depth >= max_depth:
            raise SingularPointError(f"the point {p} lies on the path")
        tm = 0.5 * (t0 + t1)
        wm = w(tm)
        return step(t0, tm, w0, wm, depth + 1) + step(tm, t1, wm, w1, depth + 1)

    ts = np.linspace(0.0, 1.0, samples + 1)
    vals = [w(float(t)) for t in ts]
    total = sum(step(float(ts[i]), float(ts[i + 1]), vals[i], vals[i + 1], 0) for i in range(samples))
    return int(round(total / (2.0 * np.pi)))


@dataclass(frozen=True, eq=False)
class BlowupProfile:
    """r^{N-1} L(C_r) over a decreasing radius sweep."""

    order: int
    radii: np.ndarray
    lengths: np.ndarray

    @property
    def values(self) -> np.ndarray:
        return self.radii ** (self.order - 1) * self.lengths

    @property
    def bounded(self) -> bool:
        v = self.values
        return bool(np.all(np.isfinite(v)) and v[-1] <= 10.0 * v[0])

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"radius": self.radii, "length": self.lengths, "scaled": self.values})


def blowup_profile(
    op: Any,
    radii: Sequence[float],
    order: int,
    x: Any = None,
    center: complex = 0.0,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> BlowupProfile:
    if order < 1:
        raise ValueError("order must be at least 1")
    r = np.sort(np.asarray(radii, dtype=float))[::-1]
    lengths: List[float] = [circle_length(op, float(ri), x=x, center=center, tol=tol) for ri in r]
    return BlowupProfile(order=int(order), radii=r, lengths=np.asarray(lengths))
