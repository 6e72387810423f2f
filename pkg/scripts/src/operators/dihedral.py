"""Truncation of the dihedral-group pencil R(z) = I + z1 lambda(a) + z2 lambda(t).

lambda(a) = [[0, T], [T^*, 0]] and lambda(t) = [[0, I], [I, 0]] with the
bilateral shift T replaced by the M-point multiplication operator
diag(e^{2 pi i m / M}). In the mode basis the pencil splits into 2 x 2 blocks
with determinant 1 - z1^2 - z2^2 - 2 z1 z2 cos(theta_m), which gives both the
spectrum and the FK determinant of the truncation without dense algebra.

Points are pairs (z1, z2); the associated normalized tuple is
(I, lambda(a), lambda(t)) at the pencil point (1, z1, z2).
"""
from __future__ import annotations

from typing import Any, Sequence, Tuple

import numpy as np
import scipy.linalg as sla

from src.lib.config import DEFAULT_TOLERANCES, Tolerances
from src.lib.errors import SingularPointError
from src.lib.types import MatrixTuple, PencilPoint

from .base import AnalyticOperator, ResolventNorm


def _pair(z: Any) -> Tuple[complex, complex]:
    zz = np.asarray(z, dtype=complex).reshape(-1)
    if zz.shape[0] == 3:
        if zz[0] == 0:
            raise ValueError("dihedral pencil points need a nonzero first coordinate")
        zz = zz[1:] / zz[0]
    if zz.shape[0] != 2:
        raise ValueError("dihedral pencil points are pairs (z1, z2)")
    return complex(zz[0]), complex(zz[1])


class DihedralPencil(AnalyticOperator):
    variant = "dihedral"

    def __init__(self, m: int, tol: Tolerances = DEFAULT_TOLERANCES) -> None:
        if m < 2:
            raise ValueError("truncation parameter must be at least 2")
        super().__init__({"M": int(m)})
        self.m = int(m)
        self.tol = tol

    @property
    def angles(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.m) / self.m

    def generators(self) -> Tuple[np.ndarray, np.ndarray]:
        t = np.diag(np.exp(1j * self.angles))
        eye = np.eye(self.m, dtype=complex)
        zero = np.zeros((self.m, self.m), dtype=complex)
        lam_a = np.block([[zero, t], [t.conj().T, zero]])
        lam_t = np.block([[zero, eye], [eye, zero]])
        return lam_a, lam_t

    def as_tuple(self) -> MatrixTuple:
        lam_a, lam_t = self.generators()
        return MatrixTuple.normalized_from(lam_a, lam_t, labels=("lambda(a)", "lambda(t)"))

    def pencil_point(self, z: Any) -> PencilPoint:
        z1, z2 = _pair(z)
        return PencilPoint.of(1.0, z1, z2)

    def matrix(self):
        return None

    @property
    def dim(self) -> int:
        return 2 * self.m

    def pencil_matrix(self, z: Any) -> np.ndarray:
        z1, z2 = _pair(z)
        lam_a, lam_t = self.generators()
        return np.eye(2 * self.m, dtype=complex) + z1 * lam_a + z2 * lam_t

    def block_determinants(self, z: Any) -> np.ndarray:
        z1, z2 = _pair(z)
        return 1.0 - z1 * z1 - z2 * z2 - 2.0 * z1 * z2 * np.cos(self.angles)

    def in_spectrum(self, z: Any) -> bool:
        r = self.pencil_matrix(z)
        s = sla.svdvals(r)
        return bool(s[-1] <= self.tol.singularity * s[0])

    def spectrum_description(self) -> str:
        return f"conics 1 - z1^2 - z2^2 - 2 z1 z2 cos(2 pi m/{self.m}) = 0"

    def conic_residual(self, z: Any) -> float:
        """Distance of z to the spectrum measured as min_m |block determinant|."""
        return float(np.min(np.abs(self.block_determinants(z))))

    def resolvent_apply(self, x: Any, z: Any) -> np.ndarray:
        if self.in_spectrum(z):
            raise SingularPointError(f"{z} lies in the spectrum of the dihedral truncation")
        return sla.solve(self.pencil_matrix(z), self.vector(x))

    def resolvent_norm(self, z: Any) -> ResolventNorm:
        s = sla.svdvals(self.pencil_matrix(z))
        if s[-1] <= self.tol.singularity * s[0]:
            raise SingularPointError(f"{z} lies in the spectrum of the dihedral truncation")
        return ResolventNorm.exact_value(1.0 / float(s[-1]))

    def fk_det_blocks(self, z: Sequence[complex]) -> float:
        """exp((1/2) mean_m log|f(theta_m)|), the FK determinant of the truncated pencil."""
        d = np.abs(self.block_determinants(z))
        if np.any(d <= self.tol.underflow):
            return 0.0
        return float(np.exp(0.5 * np.mean(np.log(d))))

    def spec_string(self) -> str:
        return f"dihedral:{self.m}"
