"""The nilpotent Jordan block J e_1 = 0, J e_k = e_{k-1} as a gallery member.

The resolvent is the finite series -sum_k J^k / z^{k+1}, evaluated with a
rescaling so small |z| does not overflow.
"""
from __future__ import annotations

from typing import Any

import numpy as np

from src.lib.errors import SingularPointError
from src.lib.linalg import jordan_block, spectral_norm

from .base import AnalyticOperator, ResolventNorm


def _shift_down(y: np.ndarray) -> np.ndarray:
    """J y for the Jordan block J e_1 = 0, J e_k = e_{k-1}."""
    out = np.zeros_like(y)
    out[:-1] = y[1:]
    return out


def _scaled_neumann(n: int, x: np.ndarray, z: complex) -> np.ndarray:
    """z^n (J - z)^{-1} x = -sum_{j<n} z^{n-1-j} J^j x."""
    acc = np.zeros(n, dtype=complex)
    y = np.asarray(x, dtype=complex).copy()
    for j in range(n):
        acc -= z ** (n - 1 - j) * y
        y = _shift_down(y)
    return acc


def nilpotent_resolvent_apply(n: int, x: np.ndarray, z: complex) -> np.ndarray:
    """(J_n - z)^{-1} x by the finite Neumann series -w(I + wJ + ... + w^{n-1}J^{n-1})x, w = 1/z."""
    z = complex(z)
    if z == 0:
        raise SingularPointError("the Jordan block is singular at z = 0")
    x = np.asarray(x, dtype=complex)
    if x.shape != (n,):
        raise ValueError(f"vector must have length {n}")
    w = 1.0 / z
    acc = np.zeros(n, dtype=complex)
    y = x.copy()
    p = w
    for _ in range(n):
        acc -= p * y
        y = _shift_down(y)
        p *= w
    return acc


class JordanNilpotent(AnalyticOperator):
    """The n x n nilpotent Jordan block; every resolvent quantity is a finite sum."""

    variant = "jordan"

    def __init__(self, n: int) -> None:
        if n < 1:
            raise ValueError("Jordan block needs n >= 1")
        super().__init__({"n": int(n)})
        self.n = int(n)

    def matrix(self) -> np.ndarray:
        return jordan_block(self.n)

    @property
    def isolated_zero(self) -> bool:
        return True

    def in_spectrum(self, z: complex) -> bool:
        return complex(z) == 0

    def spectrum_description(self) -> str:
        return "{0}"

    def resolvent_apply(self, x: Any, z: complex) -> np.ndarray:
        return nilpotent_resolvent_apply(self.n, self.vector(x), z)

    def _scaled_resolvent(self, z: complex) -> np.ndarray:
        cols = [_scaled_neumann(self.n, e, z) for e in np.eye(self.n, dtype=complex)]
        return np.stack(cols, axis=1)

    def resolvent_norm(self, z: complex) -> ResolventNorm:
        self.check_resolvent_point(z)
        return ResolventNorm.exact_value(spectral_norm(self._scaled_resolvent(z)) / abs(z) ** self.n)

    def log_vector_metric(self, x: Any, z: complex) -> float:
        self.check_resolvent_point(z)
        y = _scaled_neumann(self.n, self.vector(x), complex(z))
        return float(2.0 * np.log(np.linalg.norm(y)) - 2.0 * self.n * np.log(abs(z)))

    def log_metric_bracket(self, z: complex):
        self.check_resolvent_point(z)
        v = float(2.0 * np.log(spectral_norm(self._scaled_resolvent(z))) - 2.0 * self.n * np.log(abs(z)))
        return v, v

    def spec_string(self) -> str:
        return f"jordan:{self.n}"
