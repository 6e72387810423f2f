"""The Volterra operator Vf(x) = int_0^x f(t) dt on L^2[0, 1].

V is quasi-nilpotent, so 0 is its only spectral point. With w = 1/z the
resolvent is

    (V - z)^{-1} f(x) = -w (f(x) + w int_0^x e^{w(x-t)} f(t) dt),

and for the indicator f_alpha = 1_{[alpha, 1]} this gives the closed form
-w e^{w(x - alpha)} on (alpha, 1]. Norms of these functions grow like
e^{1/|z|}, so everything the power-set estimator needs is provided in log
space. Sampled functions live on the uniform grid x_i = i/(m-1).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Tuple

import numpy as np
from scipy import integrate

from src.lib.errors import SingularPointError

from .base import AnalyticOperator, ResolventNorm

MIN_SAMPLES = 16


@dataclass(frozen=True)
class Indicator:
    """f_alpha = 1 on [alpha, 1], 0 before."""

    alpha: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.alpha < 1.0:
            raise ValueError("indicator needs alpha in [0, 1)")

    @property
    def label(self) -> str:
        return f"f_alpha:{self.alpha:g}"


def _check_z(z: complex) -> complex:
    z = complex(z)
    if z == 0:
        raise SingularPointError("the Volterra operator has spectrum {0}")
    return z


def sample_grid(m: int) -> np.ndarray:
    if m < MIN_SAMPLES:
        raise ValueError(f"sampled functions need at least {MIN_SAMPLES} nodes")
    return np.linspace(0.0, 1.0, m)


def indicator_samples(alpha: float, m: int) -> np.ndarray:
    """f_alpha on the grid, with the value 1/2 at a node that hits the jump."""
    x = sample_grid(m)
    f = (x > alpha).astype(complex)
    f[np.isclose(x, alpha, rtol=0.0, atol=1e-12)] = 0.5
    return f


def log_volterra_indicator_norm_sq(alpha: float, z: complex) -> float:
    """log |(V - z)^{-1} f_alpha|^2 without overflow."""
    z = _check_z(z)
    if not 0.0 <= alpha < 1.0:
        raise ValueError("alpha must lie in [0, 1)")
    s = 2.0 * z.real
    r2 = abs(z) ** 2
    if s == 0.0:
        return float(np.log1p(-alpha) - np.log(r2))
    a = s * (1.0 - alpha) / r2
    if a > 0:
        # log(e^a - 1) = a + log(1 - e^{-a})
        return float(a + np.log(-np.expm1(-a)) - np.log(s))
    return float(np.log(-np.expm1(a)) - np.log(-s))


def volterra_indicator_norm_sq(alpha: float, z: complex) -> float:
    """(e^{(z + conj z)(1 - alpha)/|z|^2} - 1)/(z + conj z), with limit (1 - alpha)/|z|^2 on Re z = 0."""
    return float(np.exp(log_volterra_indicator_norm_sq(alpha, z)))


def log_volterra_norm_upper(z: complex) -> float:
    z = _check_z(z)
    return float(1.0 / abs(z) - np.log(abs(z)))


def volterra_norm_upper(z: complex) -> float:
    """Neumann-series bound |(V - z)^{-1}| <= (1/|z|) e^{1/|z|}."""
    return float(np.exp(log_volterra_norm_upper(z)))


def volterra_resolvent_apply(f: np.ndarray, z: complex) -> np.ndarray:
    """Apply (V - z)^{-1} to samples of f on the uniform grid.

    The kernel integral I(x) = int_0^x e^{w(x-t)} f(t) dt is accumulated by
    I_{i+1} = e^{w h} I_i + h/2 (e^{w h} f_i + f_{i+1}).
    """
    z = _check_z(z)
    f = np.asarray(f, dtype=complex)
    m = f.shape[0]
    sample_grid(m)
    h = 1.0 / (m - 1)
    w = 1.0 / z
    decay = np.exp(w * h)
    kernel = np.zeros(m, dtype=complex)
    for i in range(m - 1):
        kernel[i + 1] = decay * kernel[i] + 0.5 * h * (decay * f[i] + f[i + 1])
    return -w * (f + w * kernel)


def indicator_resolvent_closed_form(alpha: float, z: complex, m: int) -> np.ndarray:
    """-w e^{w(x - alpha)} on x > alpha, 0 before, sampled on the grid."""
    z = _check_z(z)
    x = sample_grid(m)
    w = 1.0 / z
    out = np.where(x > alpha, -w * np.exp(w * (x - alpha)), 0.0).astype(complex)
    return out


class Volterra(AnalyticOperator):
    variant = "volterra"
    has_exact_resolvent_norm = False

    def __init__(self, samples: int = 1025) -> None:
        sample_grid(samples)
        super().__init__({"samples": int(samples)})
        self.samples = int(samples)

    @property
    def isolated_zero(self) -> bool:
        return True

    def in_spectrum(self, z: complex) -> bool:
        return complex(z) == 0

    def spectrum_description(self) -> str:
        return "{0} (quasi-nilpotent)"

    def vector(self, spec: Any) -> Any:
        """Select f_alpha by label ("f_alpha:0.25"), float or Indicator; arrays are samples."""
        if isinstance(spec, Indicator):
            return spec
        if isinstance(spec, str):
            if not spec.startswith("f_alpha:"):
                raise ValueError(f"unknown Volterra vector {spec!r}; use f_alpha:<alpha>")
            return Indicator(float(spec.split(":", 1)[1]))
        if np.isscalar(spec):
            return Indicator(float(spec))
        return np.asarray(spec, dtype=complex)

    def samples_of(self, x: Any) -> np.ndarray:
        x = self.vector(x)
        if isinstance(x, Indicator):
            return indicator_samples(x.alpha, self.samples)
        return x

    def apply(self, x: Any) -> np.ndarray:
        """Vf by the cumulative trapezoid rule."""
        f = self.samples_of(x)
        grid = sample_grid(f.shape[0])
        return integrate.cumulative_trapezoid(f, grid, initial=0.0)

    def inner(self, u: Any, v: Any) -> complex:
        u = np.asarray(u, dtype=complex)
        v = np.asarray(v, dtype=complex)
        return complex(integrate.trapezoid(u * v.conj(), sample_grid(u.shape[0])))

    def resolvent_apply(self, x: Any, z: complex) -> np.ndarray:
        return volterra_resolvent_apply(self.samples_of(x), z)

    def resolvent_norm(self, z: complex) -> ResolventNorm:
        lo = np.sqrt(volterra_indicator_norm_sq(0.0, z))
        return ResolventNorm(float(lo), volterra_norm_upper(z))

    def log_vector_metric(self, x: Any, z: complex) -> float:
        x = self.vector(x)
        if isinstance(x, Indicator):
            return log_volterra_indicator_norm_sq(x.alpha, z)
        return super().log_vector_metric(x, z)

    def log_metric_bracket(self, z: complex) -> Tuple[float, float]:
        """(log |(V - z)^{-1} f_0|^2, log ((1/|z|) e^{1/|z|})^2)."""
        return log_volterra_indicator_norm_sq(0.0, z), 2.0 * log_volterra_norm_upper(z)

    def spec_string(self) -> str:
        return "volterra"
