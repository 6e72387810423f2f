"""Adaptive quadrature helpers on top of scipy.integrate.quad.

`log_singular_quad` integrates functions with integrable logarithmic
endpoint singularities: the model singularity m*log|t - endpoint| is
subtracted, integrated in closed form, and only the bounded remainder goes
through QUADPACK.
"""
from __future__ import annotations

import logging
import warnings
from typing import Callable, Iterable, List, Sequence, Tuple

import numpy as np
from scipy import integrate

from .errors import ConvergenceError

log = logging.getLogger(__name__)


def adaptive_quad(
    f: Callable[[float], float],
    a: float,
    b: float,
    epsrel: float = 1e-8,
    epsabs: float = 1e-12,
    limit: int = 200,
    points: Sequence[float] | None = None,
) -> Tuple[float, float]:
    """scipy quad returning (value, abserr).

    Hitting the subdivision limit with an error estimate above the requested
    tolerance raises ConvergenceError; other QUADPACK warnings are logged.
    """
    if a == b:
        return 0.0, 0.0
    inner = None
    if points is not None:
        inner = [p for p in points if min(a, b) < p < max(a, b)] or None
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        value, err = integrate.quad(f, a, b, epsrel=epsrel, epsabs=epsabs, limit=limit, points=inner)
    if not np.isfinite(value):
        raise ConvergenceError(f"quadrature on [{a}, {b}] returned {value}")
    target = max(epsabs, epsrel * abs(value))
    for w in caught:
        if not issubclass(w.category, integrate.IntegrationWarning):
            continue
        if "maximum number of subdivisions" in str(w.message) and err > target:
            raise ConvergenceError(f"quadrature on [{a}, {b}] hit {limit} subdivisions with error {err:.2e}")
        log.warning("quad on [%g, %g]: %s (error %.2e)", a, b, str(w.message).strip().splitlines()[0], err)
    return float(value), float(err)


def _log_moment(length: float) -> float:
    """Integral of log(t) over (0, length]."""
    return length * np.log(length) - length


def log_singular_quad(
    f: Callable[[float], float],
    a: float,
    b: float,
    lo_mult: float = 0.0,
    hi_mult: float = 0.0,
    epsrel: float = 1e-10,
    epsabs: float = 1e-12,
    limit: int = 200,
) -> float:
    """Integral of f over [a, b] where f(t) ~ lo_mult*log(t-a) near a and hi_mult*log(b-t) near b."""
    if not b > a:
        raise ValueError("log_singular_quad needs a < b")

    def remainder(t: float) -> float:
        v = f(t)
        if lo_mult:
            v -= lo_mult * np.log(t - a)
        if hi_mult:
            v -= hi_mult * np.log(b - t)
        return v

    value, _ = adaptive_quad(remainder, a, b, epsrel=epsrel, epsabs=epsabs, limit=limit)
    return value + (lo_mult + hi_mult) * _log_moment(b - a)


def split_periodic(
    f: Callable[[float], float],
    start: float,
    roots: Iterable[Tuple[float, float]],
    epsrel: float = 1e-10,
    epsabs: float = 1e-12,
) -> float:
    """Integral of a 2*pi-periodic f over one period, split at its log singularities.

    `roots` holds (theta, multiplicity) pairs; each piece between consecutive
    roots gets the endpoint subtraction of `log_singular_quad`.
    """
    period = 2.0 * np.pi
    marks: List[Tuple[float, float]] = sorted(((t - start) % period, m) for t, m in roots)
    if not marks:
        value, _ = adaptive_quad(f, start, start + period, epsrel=epsrel, epsabs=epsabs)
        return value
    total = 0.0
    for i, (t0, m0) in enumerate(marks):
        t1, m1 = marks[(i + 1) % len(marks)]
        if i + 1 == len(marks):
            t1 += period
        if t1 - t0 <= 0.0:
            continue
        total += log_singular_quad(
            f, start + t0, start + t1, lo_mult=m0, hi_mult=m1, epsrel=epsrel, epsabs=epsabs
        )
    return total
