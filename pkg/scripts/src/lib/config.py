"""Numerical tolerances used across the project.

Every operation that compares against a threshold takes an optional
`tol: Tolerances`; pass a modified copy (``dataclasses.replace``) to change
a single value for one call.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class Tolerances:
    singularity: float = 1e-8  # sigma_min <= singularity * sigma_max  =>  not invertible
    residual: float = 1e-10
    rank: float = 1e-10  # relative eigenvalue floor of the trace Gram matrix
    state: float = 1e-12
    psd: float = 1e-10
    quad_rel: float = 1e-8
    underflow: float = 1e-300
    fk_singular: float = 1e-12

    def to_dict(self) -> dict:
        return asdict(self)


DEFAULT_TOLERANCES = Tolerances()
