"""Unilateral and bilateral shift truncations.

Unilateral: multiplication by w on the Hardy space, truncated to
span{1, w, ..., w^{N-1}} (an N x N lower shift). Bilateral: multiplication by
e^{i theta} on L^2(T, d theta / 2 pi), discretized at M = 2N + 1 equispaced
nodes as diag(e^{i theta_m}); the constant function 1 becomes the normalized
constant vector. Both keep the vector metric of x = 1 in closed form.
"""
from __future__ import annotations

from typing import Any

import numpy as np
import scipy.linalg as sla

from src.lib.errors import SingularPointError
from src.lib.linalg import basis_vector, spectral_norm

from .base import AnalyticOperator, ResolventNorm

UNIT_CIRCLE_TOL = 1e-12


def shift_vector_metric(variant: str, z: complex) -> float:
    """g_1(z) = |(T - z)^{-1} 1|^2: 1/(|z|^2 - 1) (unilateral) or 1/|1 - |z|^2| (bilateral)."""
    r = abs(complex(z))
    if abs(r - 1.0) <= UNIT_CIRCLE_TOL:
        raise SingularPointError("z lies on the unit circle")
    if variant in ("unilateral", "ushift"):
        if r < 1.0:
            raise SingularPointError("the unilateral shift has the closed unit disc as spectrum")
        return 1.0 / (r * r - 1.0)
    if variant in ("bilateral", "bshift"):
        return 1.0 / abs(1.0 - r * r)
    raise ValueError(f"unknown shift variant {variant!r}")


class _Shift(AnalyticOperator):
    def __init__(self, n: int) -> None:
        if n < 2:
            raise ValueError("truncation parameter must be at least 2")
        super().__init__({"N": int(n)})
        self.n = int(n)

    def vector(self, spec: Any) -> Any:
        if isinstance(spec, str) and spec in ("one", "1"):
            return self.constant_vector()
        return super().vector(spec)

    def constant_vector(self) -> np.ndarray:
        raise NotImplementedError


class UnilateralShift(_Shift):
    variant = "ushift"

    def matrix(self) -> np.ndarray:
        return np.eye(self.n, k=-1, dtype=complex)

    def constant_vector(self) -> np.ndarray:
        return basis_vector(self.n, 1)

    def in_spectrum(self, z: complex) -> bool:
        return abs(complex(z)) <= 1.0 + UNIT_CIRCLE_TOL

    def spectrum_description(self) -> str:
        return "closed unit disc"

    def _shifted(self, z: complex) -> np.ndarray:
        self.check_resolvent_point(z)
        return self.matrix() - complex(z) * np.eye(self.n)

    def resolvent_apply(self, x: Any, z: complex) -> np.ndarray:
        return sla.solve_triangular(self._shifted(z), self.vector(x), lower=True)

    def log_vector_metric(self, x: Any, z: complex) -> float:
        """Closed form for multiples of the constant function, truncated solve otherwise."""
        xv = np.asarray(self.vector(x), dtype=complex)
        c = xv[0]
        if c != 0 and not np.any(xv[1:]):
            self.check_resolvent_point(z)
            return float(2.0 * np.log(abs(c)) + np.log(shift_vector_metric("ushift", z)))
        return super().log_vector_metric(xv, z)

    def truncated_vector_metric(self, x: Any, z: complex) -> float:
        """|(T_N - z)^{-1} x|^2 from the N x N truncation."""
        return self.norm_sq(self.resolvent_apply(x, z))

    def resolvent_norm(self, z: complex) -> ResolventNorm:
        inv = sla.solve_triangular(self._shifted(z), np.eye(self.n, dtype=complex), lower=True)
        return ResolventNorm.exact_value(spectral_norm(inv))

    def truncation_tail(self, z: complex) -> float:
        """g_1(z) minus its N-truncation, |z|^{-2N}/(|z|^2 - 1)."""
        r = abs(complex(z))
        return r ** (-2 * self.n) / (r * r - 1.0)

    def spec_string(self) -> str:
        return f"ushift:{self.n}"


class BilateralShift(_Shift):
    variant = "bshift"

    @property
    def nodes(self) -> int:
        return 2 * self.n + 1

    def _diag(self) -> np.ndarray:
        theta = 2.0 * np.pi * np.arange(self.nodes) / self.nodes
        return np.exp(1j * theta)

    def matrix(self) -> np.ndarray:
        return np.diag(self._diag())

    def constant_vector(self) -> np.ndarray:
        return np.full(self.nodes, 1.0 / np.sqrt(self.nodes), dtype=complex)

    def in_spectrum(self, z: complex) -> bool:
        return abs(abs(complex(z)) - 1.0) <= UNIT_CIRCLE_TOL

    def spectrum_description(self) -> str:
        return "unit circle"

    def resolvent_apply(self, x: Any, z: complex) -> np.ndarray:
        self.check_resolvent_point(z)
        return self.vector(x) / (self._diag() - complex(z))

    def resolvent_norm(self, z: complex) -> ResolventNorm:
        self.check_resolvent_point(z)
        return ResolventNorm.exact_value(1.0 / float(np.min(np.abs(self._diag() - complex(z)))))

    def truncation_factor(self, z: complex) -> float:
        """Ratio of the truncated g_1 to the closed form: (1 - q^2)/|1 - q e^{i M arg z}|^2, q = rho^M."""
        z = complex(z)
        r = abs(z)
        rho = min(r, 1.0 / r) if r > 0 else 0.0
        q = rho**self.nodes
        phase = np.exp(1j * self.nodes * np.angle(z)) if r > 0 else 1.0
        return float((1.0 - q * q) / abs(1.0 - q * phase) ** 2)

    def spec_string(self) -> str:
        return f"bshift:{self.n}"
