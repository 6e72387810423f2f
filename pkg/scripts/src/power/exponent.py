"""Blow-up exponents k_x and samples of the power set.

k_x = limsup_{z -> 0} log g_x(z) / log g(z), with g_x = |(V - z)^{-1} x|^2 and
g = |(V - z)^{-1}|^2. The limsup is replaced by a finite surrogate: ratios
are sampled on circles of geometrically shrinking radius, maximized over a
fixed angle set, and k_hat is the maximum over the last `window` radii.

When g is only known as a bracket [L, U] (the Volterra operator) every
ratio becomes an interval [log g_x / log U, log g_x / log L]; k_hat is the
midpoint of the window maxima and the interval is reported alongside.
"""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from typing import Any, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src.lib.config import DEFAULT_TOLERANCES, Tolerances
from src.lib.errors import ConvergenceError, NotIsolatedError
from src.lib.grid import geometric_radii, ordered_map
from src.lib.linalg import unit
from src.operators.base import AnalyticOperator
from src.operators.matrix import FiniteMatrix
from src.operators.volterra import Indicator

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PowerSchedule:
    r0: float = 0.1
    q: float = 10.0**-0.5
    count: int = 12
    angles: int = 16
    window: int = 3
    dedup: float = 0.02
    tolerance: float = 0.02

    def __post_init__(self) -> None:
        if self.angles < 1:
            raise ValueError("need at least one sample angle")
        if not 1 <= self.window <= self.count:
            raise ValueError("window must lie between 1 and the number of radii")
        if self.dedup < 0 or self.tolerance < 0:
            raise ValueError("tolerances must be nonnegative")
        geometric_radii(self.r0, self.q, self.count)

    def radii(self) -> np.ndarray:
        return geometric_radii(self.r0, self.q, self.count)

    def angle_set(self, right_half_plane: bool = False) -> np.ndarray:
        """Equispaced angles in [-pi, pi), always containing 0."""
        theta = 2.0 * np.pi * np.arange(self.angles) / self.angles
        theta = np.where(theta >= np.pi, theta - 2.0 * np.pi, theta)
        if right_half_plane:
            # cos(pi/2) rounds to 6e-17, which must not count as inside
            theta = theta[np.cos(theta) > 1e-9]
        return np.unique(np.append(theta, 0.0))

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class PowerEstimate:
    vector_id: str
    radii: np.ndarray
    angles: np.ndarray
    ratios: np.ndarray
    k_hat: float
    bracket: Optional[Tuple[float, float]]
    diagnostics: pd.DataFrame = field(repr=False)
    monotone: bool = True

    def to_dict(self) -> dict:
        out = {
            "vector": self.vector_id,
            "radii": [float(r) for r in self.radii],
            "angles": [float(t) for t in self.angles],
            "ratios": [float(v) for v in self.ratios],
            "k_hat": float(self.k_hat),
            "monotone": self.monotone,
        }
        if self.bracket is not None:
            out["bracket"] = [float(self.bracket[0]), float(self.bracket[1])]
        return out


def as_isolated_operator(v: Any, tol: Tolerances = DEFAULT_TOLERANCES) -> AnalyticOperator:
    """Gallery members pass through; bare matrices get their Riesz split at 0."""
    if isinstance(v, AnalyticOperator):
        op = v
    else:
        op = FiniteMatrix(np.asarray(v, dtype=complex), isolated_point=0.0, tol=tol)
    if not op.isolated_zero:
        raise NotIsolatedError(f"0 is not a declared isolated spectral point of {op.spec_string()}")
    return op


def _vector_id(x: Any) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, Indicator):
        return x.label
    if np.isscalar(x):
        return f"f_alpha:{float(x):g}"
    return "custom"


def _safe_ratio(num: float, den: float) -> float:
    if not np.isfinite(num) or not np.isfinite(den) or den <= 0.0:
        return float("nan")
    return num / den


class PowerSampler:
    """Walks the radius schedule for one operator, one vector at a time."""

    def __init__(self, op: Any, schedule: Optional[PowerSchedule] = None, tol: Tolerances = DEFAULT_TOLERANCES) -> None:
        self.op = as_isolated_operator(op, tol)
        self.schedule = schedule or PowerSchedule()
        self.tol = tol
        self.bracketed = not self.op.has_exact_resolvent_norm

    def _prepare(self, x: Any) -> Any:
        xv = self.op.vector(x)
        if isinstance(xv, Indicator) or self.bracketed:
            return xv
        return unit(xv)

    def run(self, x: Any) -> PowerEstimate:
        sched = self.schedule
        xv = self._prepare(x)
        radii = sched.radii()
        angles = sched.angle_set(right_half_plane=self.bracketed)
        rows: List[dict] = []

        for r in radii:
            best_lo = best_hi = -np.inf
            best_theta = 0.0
            lgx_best = lg_lo_best = lg_hi_best = float("nan")
            for theta in angles:
                z = complex(r * np.exp(1j * theta))
                lgx = self.op.log_vector_metric(xv, z)
                lg_lo, lg_hi = self.op.log_metric_bracket(z)
                # larger g gives the smaller ratio
                lo = _safe_ratio(lgx, lg_hi)
                hi = _safe_ratio(lgx, lg_lo)
                if np.isnan(lo) or np.isnan(hi):
                    continue
                if hi > best_hi or (hi == best_hi and lo > best_lo):
                    best_theta, lgx_best, lg_lo_best, lg_hi_best = float(theta), lgx, lg_lo, lg_hi
                best_lo = max(best_lo, lo)
                best_hi = max(best_hi, hi)
            finite = np.isfinite(best_lo) and np.isfinite(best_hi)
            rows.append(
                {
                    "radius": float(r),
                    "ratio": 0.5 * (best_lo + best_hi) if finite else float("nan"),
                    "ratio_lower": best_lo if finite else float("nan"),
                    "ratio_upper": best_hi if finite else float("nan"),
                    "argmax_angle": best_theta,
                    "log_g_x": lgx_best,
                    "log_g_lower": lg_lo_best,
                    "log_g_upper": lg_hi_best,
                }
            )
            log.debug("r=%.3e ratio=%.6f", r, rows[-1]["ratio"])

        diag = pd.DataFrame(rows)
        tail = diag.tail(sched.window)
        if tail["ratio"].isna().all():
            raise ConvergenceError("no finite ratio in the estimation window; extend the radius schedule")
        lo = float(tail["ratio_lower"].max())
        hi = float(tail["ratio_upper"].max())
        k_hat = 0.5 * (lo + hi)
        ratios = diag["ratio"].to_numpy()
        steps = np.diff(ratios[np.isfinite(ratios)])
        monotone = bool(np.all(steps >= -1e-12) or np.all(steps <= 1e-12))
        if k_hat > 1.0 + sched.tolerance or k_hat < -sched.tolerance:
            log.warning("exponent estimate %.4f outside [0, 1]", k_hat)
        return PowerEstimate(
            vector_id=_vector_id(x),
            radii=radii,
            angles=angles,
            ratios=ratios,
            k_hat=k_hat,
            bracket=(lo, hi) if self.bracketed else None,
            diagnostics=diag,
            monotone=monotone,
        )


def power_exponent(
    op: Any, x: Any, schedule: Optional[PowerSchedule] = None, tol: Tolerances = DEFAULT_TOLERANCES
) -> PowerEstimate:
    return PowerSampler(op, schedule, tol).run(x)


@dataclass(frozen=True)
class PowerSetEntry:
    k_hat: float
    witnesses: Tuple[str, ...]


@dataclass(frozen=True, eq=False)
class PowerSetSample:
    entries: Tuple[PowerSetEntry, ...]
    estimates: Tuple[PowerEstimate, ...] = field(repr=False)

    @property
    def values(self) -> List[float]:
        return [e.k_hat for e in self.entries]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {"k_hat": [e.k_hat for e in self.entries], "witnesses": [",".join(e.witnesses) for e in self.entries]}
        )

    def to_dict(self) -> dict:
        return {
            "power_set": [{"k_hat": e.k_hat, "witnesses": list(e.witnesses)} for e in self.entries],
            "estimates": [est.to_dict() for est in self.estimates],
        }


def power_set_sample(
    op: Any,
    vectors: Sequence[Any],
    schedule: Optional[PowerSchedule] = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
    workers: Optional[int] = None,
) -> PowerSetSample:
    """Exponents of `vectors`, sorted and merged when closer than schedule.dedup."""
    sampler = PowerSampler(op, schedule, tol)
    estimates = ordered_map(sampler.run, list(vectors), workers)
    order = sorted(range(len(estimates)), key=lambda i: estimates[i].k_hat)
    groups: List[List[PowerEstimate]] = []
    for i in order:
        est = estimates[i]
        if groups and est.k_hat - groups[-1][0].k_hat <= sampler.schedule.dedup:
            groups[-1].append(est)
        else:
            groups.append([est])
    entries = tuple(
        PowerSetEntry(
            k_hat=float(np.mean([e.k_hat for e in g])),
            witnesses=tuple(e.vector_id for e in g),
        )
        for g in groups
    )
    log.info("power set sample: %s", ", ".join(f"{e.k_hat:.4f}" for e in entries))
    return PowerSetSample(entries=entries, estimates=tuple(estimates))
