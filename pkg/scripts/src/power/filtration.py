"""Numerical probes built on the exponent estimator.

- `filtration_probe`: the subspace M_tau = {x : k_x <= tau} spanned by a
  vector corpus, and how far operators commuting with V move it.
- `similarity_invariance_check`: exponents of x for S^{-1} V S against those of
  S x for V.
- `nilpotency_probe`: whether r^{N-1} L(C_r) stays bounded as r -> 0, next to
  |V0^N| from the Riesz quadrature.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, List, Optional, Sequence

import numpy as np
import pandas as pd
import scipy.linalg as sla

from src.geometry.contour import ContourSpec, dense_matrix, riesz_projection
from src.geometry.paths import BlowupProfile, blowup_profile
from src.lib.config import DEFAULT_TOLERANCES, Tolerances
from src.lib.errors import NonCommutingError
from src.lib.grid import geometric_radii
from src.lib.linalg import orthonormal_span, spectral_norm, unit
from src.operators.matrix import FiniteMatrix

from .exponent import PowerSampler, PowerSchedule, as_isolated_operator

log = logging.getLogger(__name__)

COMMUTE_FACTOR = 1e-10
MAX_CONDITION = 1e6


@dataclass(frozen=True, eq=False)
class FiltrationProbe:
    tau: float
    members: List[int]
    k_hats: np.ndarray
    basis: np.ndarray
    commutant_defect: float

    @property
    def dimension(self) -> int:
        return self.basis.shape[1]

    def to_dict(self) -> dict:
        return {
            "tau": self.tau,
            "members": list(self.members),
            "k_hats": [float(k) for k in self.k_hats],
            "dimension": self.dimension,
            "commutant_defect": self.commutant_defect,
        }


def _check_commutes(v: np.ndarray, gens: Sequence[np.ndarray]) -> None:
    nv = spectral_norm(v)
    for i, b in enumerate(gens):
        bound = COMMUTE_FACTOR * max(1.0, spectral_norm(b) * nv)
        if spectral_norm(b @ v - v @ b) > bound:
            raise NonCommutingError(f"generator {i} does not commute with V")


def filtration_probe(
    v: Any,
    tau: float,
    corpus: Sequence[np.ndarray],
    generators: Sequence[np.ndarray],
    schedule: Optional[PowerSchedule] = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> FiltrationProbe:
    """Span of the corpus vectors with k_hat <= tau and its commutant defect max_B |(I - P) B P|."""
    if not 0.0 <= tau <= 1.0:
        raise ValueError("tau must lie in [0, 1]")
    sampler = PowerSampler(v, schedule, tol)
    mat = dense_matrix(sampler.op)
    gens = [np.asarray(b, dtype=complex) for b in generators]
    _check_commutes(mat, gens)

    k_hats = np.array([sampler.run(np.asarray(x, dtype=complex)).k_hat for x in corpus])
    members = [i for i, k in enumerate(k_hats) if k <= tau + sampler.schedule.tolerance]
    basis = orthonormal_span([corpus[i] for i in members], mat.shape[0])
    defect = 0.0
    if basis.shape[1]:
        comp = np.eye(mat.shape[0]) - basis @ basis.conj().T
        defect = max((spectral_norm(comp @ b @ basis) for b in gens), default=0.0)
    log.info("filtration tau=%.3f: %d members, dimension %d, defect %.2e", tau, len(members), basis.shape[1], defect)
    return FiltrationProbe(tau=float(tau), members=members, k_hats=k_hats, basis=basis, commutant_defect=float(defect))


@dataclass(frozen=True, eq=False)
class SimilarityReport:
    table: pd.DataFrame
    condition: float

    @property
    def max_discrepancy(self) -> float:
        return float(self.table["discrepancy"].max()) if len(self.table) else 0.0

    def to_dict(self) -> dict:
        return {
            "condition": self.condition,
            "max_discrepancy": self.max_discrepancy,
            "rows": self.table.to_dict(orient="records"),
        }


def similarity_invariance_check(
    v: Any,
    s: np.ndarray,
    vectors: Sequence[Any],
    schedule: Optional[PowerSchedule] = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> SimilarityReport:
    """Compare k_x(S^{-1} V S) with k_{Sx}(V) for each x."""
    s = np.asarray(s, dtype=complex)
    cond = float(np.linalg.cond(s))
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise ValueError(f"similarity is near-singular (condition {cond:.3e})")
    original = PowerSampler(v, schedule, tol)
    mat = dense_matrix(original.op)
    similar = PowerSampler(FiniteMatrix(sla.solve(s, mat @ s), isolated_point=0.0, tol=tol), schedule, tol)

    rows = []
    for i, x in enumerate(vectors):
        xv = unit(original.op.vector(x))
        k_sim = similar.run(xv).k_hat
        k_orig = original.run(s @ xv).k_hat
        rows.append(
            {
                "vector": x if isinstance(x, str) else f"x{i}",
                "k_similar": k_sim,
                "k_original": k_orig,
                "discrepancy": abs(k_sim - k_orig),
            }
        )
    table = pd.DataFrame(rows, columns=["vector", "k_similar", "k_original", "discrepancy"])
    return SimilarityReport(table=table, condition=cond)


@dataclass(frozen=True, eq=False)
class NilpotencyProbe:
    order: int
    profile: BlowupProfile = field(repr=False)
    v0_power_norm: float

    @property
    def bounded(self) -> bool:
        return self.profile.bounded

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "bounded": self.bounded,
            "v0_power_norm": self.v0_power_norm,
            "radii": [float(r) for r in self.profile.radii],
            "scaled_lengths": [float(x) for x in self.profile.values],
        }


def nilpotency_probe(
    op: Any,
    order: int,
    radii: Optional[Sequence[float]] = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> NilpotencyProbe:
    v = as_isolated_operator(op, tol)
    r = np.asarray(radii, dtype=float) if radii is not None else geometric_radii(0.1, 10.0**-0.5, 6)
    profile = blowup_profile(v, r, order, tol=tol)
    res = riesz_projection(v, ContourSpec(center=0.0, radius=float(np.max(r))), tol)
    v0n = spectral_norm(np.linalg.matrix_power(res.V0, order))
    log.info("nilpotency probe N=%d: bounded=%s, |V0^N|=%.2e", order, profile.bounded, v0n)
    return NilpotencyProbe(order=int(order), profile=profile, v0_power_norm=v0n)
