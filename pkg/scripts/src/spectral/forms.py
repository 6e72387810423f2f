"""Fundamental form Omega_A, state functionals and the metric matrix g(z).

Index convention: g_jk(z) = phi(omega_j(z)^* omega_k(z)) with
omega_j = A(z)^{-1} A_j, so that the quadratic form of g is
v -> phi((A^{-1}(z) A(v))^* (A^{-1}(z) A(v))). Every state used here is
positive, which lets the metric be assembled as a Gram matrix W^* W of
"state factors" W_j; the result is PSD by construction and is additionally
symmetrized to suppress round-off asymmetry.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np

from src.lib.config import DEFAULT_TOLERANCES, Tolerances
from src.lib.data import matrix_to_pairs, pairs_to_matrix, pairs_to_vector, vector_to_pairs
from src.lib.errors import InvalidStateError, InvalidTupleError, SingularPointError
from src.lib.linalg import hermitian_part, sigma_extremes
from src.lib.types import MatrixTuple, MetricSample, as_point

from .pencil import maurer_cartan_coeffs, pencil_eval, resolvent

log = logging.getLogger(__name__)


class StateKind(Enum):
    TRACE = "trace"
    VECTOR = "vector"
    DENSITY = "density"


@dataclass(frozen=True, eq=False)
class StateFunctional:
    """A positive normalized functional on k x k matrices.

    trace: Tr(a)/k; vector: <a x, x>; density: Tr(rho a).
    """

    kind: StateKind
    vector: Optional[np.ndarray] = None
    density: Optional[np.ndarray] = None
    tol: Tolerances = field(default=DEFAULT_TOLERANCES, repr=False)

    def __post_init__(self) -> None:
        if self.kind is StateKind.VECTOR:
            if self.vector is None:
                raise InvalidStateError("vector state needs a vector")
            x = np.asarray(self.vector, dtype=complex).reshape(-1)
            if abs(np.linalg.norm(x) - 1.0) > self.tol.state:
                raise InvalidStateError(f"vector state needs a unit vector, |x| = {np.linalg.norm(x)!r}")
            object.__setattr__(self, "vector", x)
        elif self.kind is StateKind.DENSITY:
            if self.density is None:
                raise InvalidStateError("density state needs a density matrix")
            rho = np.asarray(self.density, dtype=complex)
            if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
                raise InvalidStateError("density must be square")
            if np.max(np.abs(rho - rho.conj().T)) > self.tol.state:
                raise InvalidStateError("density must be Hermitian")
            if abs(np.trace(rho).real - 1.0) > self.tol.state:
                raise InvalidStateError("density must have unit trace")
            if np.linalg.eigvalsh(hermitian_part(rho))[0] < -self.tol.state:
                raise InvalidStateError("density must be positive semidefinite")
            object.__setattr__(self, "density", hermitian_part(rho))

    @classmethod
    def trace(cls) -> "StateFunctional":
        return cls(StateKind.TRACE)

    @classmethod
    def vector_state(cls, x) -> "StateFunctional":
        return cls(StateKind.VECTOR, vector=np.asarray(x, dtype=complex))

    @classmethod
    def density_state(cls, rho) -> "StateFunctional":
        return cls(StateKind.DENSITY, density=np.asarray(rho, dtype=complex))

    def _check_dim(self, k: int) -> None:
        if self.kind is StateKind.VECTOR and self.vector is not None and self.vector.shape[0] != k:
            raise InvalidStateError(f"vector state has dimension {self.vector.shape[0]}, matrices are {k}x{k}")
        if self.kind is StateKind.DENSITY and self.density is not None and self.density.shape[0] != k:
            raise InvalidStateError(f"density has dimension {self.density.shape[0]}, matrices are {k}x{k}")

    def __call__(self, a: np.ndarray) -> complex:
        a = np.asarray(a, dtype=complex)
        k = a.shape[0]
        self._check_dim(k)
        if self.kind is StateKind.TRACE:
            return complex(np.trace(a) / k)
        if self.kind is StateKind.VECTOR:
            x = self.vector
            return complex(np.vdot(x, a @ x))
        return complex(np.trace(self.density @ a))

    def factors(self, mats: Sequence[np.ndarray]) -> np.ndarray:
        """Columns W_j with W_i^* W_j = phi(M_i^* M_j)."""
        k = np.asarray(mats[0]).shape[0]
        self._check_dim(k)
        if self.kind is StateKind.TRACE:
            cols = [np.asarray(m).reshape(-1) / np.sqrt(k) for m in mats]
        elif self.kind is StateKind.VECTOR:
            cols = [np.asarray(m) @ self.vector for m in mats]
        else:
            w, u = np.linalg.eigh(self.density)
            root = (u * np.sqrt(np.clip(w, 0.0, None))) @ u.conj().T
            cols = [(np.asarray(m) @ root).reshape(-1) for m in mats]
        return np.stack(cols, axis=1)

    def gram(self, mats: Sequence[np.ndarray]) -> np.ndarray:
        w = self.factors(mats)
        return hermitian_part(w.conj().T @ w)

    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind.value}
        if self.vector is not None:
            out["vector"] = vector_to_pairs(self.vector)
        if self.density is not None:
            out["density"] = matrix_to_pairs(self.density)
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "StateFunctional":
        try:
            kind = StateKind(d["kind"])
        except (KeyError, ValueError) as exc:
            raise InvalidStateError(f"unknown state kind in {d!r}") from exc
        vec = pairs_to_vector(d["vector"]) if "vector" in d else None
        rho = pairs_to_matrix(d["density"]) if "density" in d else None
        return cls(kind, vector=vec, density=rho)


def fundamental_form(a: MatrixTuple, z, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Array of shape (n, n, k, k) with entries omega_j^* omega_k."""
    omega = maurer_cartan_coeffs(a, z, tol)
    out = np.empty((a.n, a.n, a.k, a.k), dtype=complex)
    for j, wj in enumerate(omega):
        for k, wk in enumerate(omega):
            out[j, k] = wj.conj().T @ wk
    return out


def metric_sample(z, g: np.ndarray, tol: Tolerances) -> MetricSample:
    g = hermitian_part(g)
    eig = np.linalg.eigvalsh(g)
    scale = float(np.max(np.abs(eig))) if eig.size else 0.0
    return MetricSample(
        z=as_point(z),
        g=g,
        min_eigenvalue=float(eig[0]),
        positive_definite=bool(eig[0] > tol.psd * scale),
    )


def metric_matrix(a: MatrixTuple, z, phi: StateFunctional, tol: Tolerances = DEFAULT_TOLERANCES) -> MetricSample:
    omega = maurer_cartan_coeffs(a, z, tol)
    return metric_sample(z, phi.gram(omega), tol)


def faithfulness_check(phi: StateFunctional, a: MatrixTuple) -> float:
    """Smallest eigenvalue of G_jk = phi(A_j^* A_k); > 0 iff phi is faithful on span A."""
    return float(np.linalg.eigvalsh(phi.gram(a.matrices))[0])


def kahler_defect(a: MatrixTuple, z, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """max_{j<k} |[omega_j, omega_k]|_F; zero everywhere iff the tuple commutes."""
    if not a.normalized:
        raise InvalidTupleError("the commutator criterion needs a normalized tuple (I, A_1, ...)")
    omega = maurer_cartan_coeffs(a, z, tol)
    worst = 0.0
    for j in range(a.n):
        for k in range(j + 1, a.n):
            c = omega[j] @ omega[k] - omega[k] @ omega[j]
            worst = max(worst, float(np.linalg.norm(c)))
    return worst


def sandwich_bounds(
    a: MatrixTuple, z, phi: StateFunctional, v, tol: Tolerances = DEFAULT_TOLERANCES
) -> Tuple[float, float, float]:
    """(beta * phi(A(v)^* A(v)), v^* g v, alpha * phi(A(v)^* A(v))) for a direction v.

    beta and alpha are the squared extreme singular values of A(z)^{-1}.
    """
    sample = resolvent(a, z, tol)
    if sample.inverse is None:
        raise SingularPointError(f"z={sample.z.z} lies in the joint spectrum")
    v = np.asarray(v, dtype=complex)
    smin, smax = sigma_extremes(sample.inverse)
    av = pencil_eval(a, v)
    base = phi(av.conj().T @ av).real
    g = metric_matrix(a, z, phi, tol).g
    quad = float(np.real(np.vdot(v, g @ v)))
    return smin**2 * base, quad, smax**2 * base


def metric_partials(
    a: MatrixTuple, z, phi: StateFunctional, h: float = 1e-5, tol: Tolerances = DEFAULT_TOLERANCES
) -> np.ndarray:
    """Holomorphic partials d_l g_jk by central differences, shape (n, n, n) indexed [l, j, k]."""
    p = as_point(z)
    out = np.empty((a.n, a.n, a.n), dtype=complex)
    for l in range(a.n):
        e = np.zeros(a.n, dtype=complex)
        e[l] = h
        dx = (metric_matrix(a, p.shifted(e), phi, tol).g - metric_matrix(a, p.shifted(-e), phi, tol).g) / (2 * h)
        dy = (metric_matrix(a, p.shifted(1j * e), phi, tol).g - metric_matrix(a, p.shifted(-1j * e), phi, tol).g) / (2 * h)
        out[l] = 0.5 * (dx - 1j * dy)
    return out


def closedness_defect(
    a: MatrixTuple, z, phi: StateFunctional, h: float = 1e-5, tol: Tolerances = DEFAULT_TOLERANCES
) -> float:
    """max |d_l g_jk - d_k g_jl| over all indices; vanishes iff phi(Omega_A) is closed at z."""
    d = metric_partials(a, z, phi, h, tol)
    worst = 0.0
    for l in range(a.n):
        for j in range(a.n):
            for k in range(a.n):
                worst = max(worst, float(abs(d[l, j, k] - d[k, j, l])))
    log.debug("closedness defect %.3e at h=%.1e", worst, h)
    return worst
