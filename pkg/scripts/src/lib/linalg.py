"""Dense linear-algebra helpers as pure functions.

Small wrappers around scipy.linalg that the numerical modules share:
singular-value extremes, Hermitian symmetrization, orthonormal spans and
log-sums of singular values. Side-effect free.
"""
from __future__ import annotations

from typing import Sequence, Tuple

import numpy as np
import scipy.linalg as sla


def singular_values(a: np.ndarray) -> np.ndarray:
    """Singular values in descending order."""
    return sla.svdvals(np.asarray(a, dtype=complex))


def sigma_extremes(a: np.ndarray) -> Tuple[float, float]:
    s = singular_values(a)
    return float(s[-1]), float(s[0])


def spectral_norm(a: np.ndarray) -> float:
    return float(singular_values(a)[0])


def hermitian_part(g: np.ndarray) -> np.ndarray:
    return 0.5 * (g + g.conj().T)


def log_singular_sum(a: np.ndarray, floor: float = 1e-300) -> float:
    """Sum of log sigma_i(a); -inf as soon as one sigma_i falls below `floor`."""
    s = singular_values(a)
    if s[-1] <= floor:
        return -np.inf
    return float(np.sum(np.log(s)))


def orthonormal_span(vectors: Sequence[np.ndarray], k: int, rcond: float = 1e-8) -> np.ndarray:
    """Orthonormal basis (k x r) for the span of `vectors`; r may be 0."""
    if len(vectors) == 0:
        return np.zeros((k, 0), dtype=complex)
    stacked = np.stack([np.asarray(v, dtype=complex) for v in vectors], axis=1)
    return sla.orth(stacked, rcond=rcond)


def unit(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    nrm = np.linalg.norm(x)
    if nrm == 0:
        raise ValueError("zero vector has no direction")
    return x / nrm


def basis_vector(k: int, index: int) -> np.ndarray:
    """Standard basis vector e_index (1-based, as written in the literature)."""
    e = np.zeros(k, dtype=complex)
    e[index - 1] = 1.0
    return e


def jordan_block(n: int) -> np.ndarray:
    """Nilpotent Jordan block with J e_1 = 0 and J e_k = e_{k-1}."""
    return np.eye(n, k=1, dtype=complex)
