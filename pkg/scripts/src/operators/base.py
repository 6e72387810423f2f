"""Operator interface.

Subclass `AnalyticOperator` and implement `resolvent_apply`,
`resolvent_norm`, `in_spectrum` and `spectrum_description` to add a gallery
member. Optional overrides: `log_vector_metric` / `log_metric_bracket` (log
space evaluation for operators whose resolvents overflow), `matrix` (dense
form for finite variants), `vector` (named test vectors) and `inner`.

The base class supplies generic implementations of the derived quantities in
terms of the abstract ones, so a finite variant only has to say how to solve
(V - z) y = x.
"""
from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Optional, Tuple

import numpy as np

from src.lib.errors import SingularPointError
from src.lib.linalg import basis_vector


@dataclass(frozen=True)
class ResolventNorm:
    """|(V - z)^{-1}| as a bracket; exact variants have lower == upper."""

    lower: float
    upper: float

    def __post_init__(self) -> None:
        if self.lower > self.upper * (1.0 + 1e-12):
            raise ValueError(f"inverted bracket [{self.lower}, {self.upper}]")

    @classmethod
    def exact_value(cls, v: float) -> "ResolventNorm":
        return cls(float(v), float(v))

    @property
    def exact(self) -> bool:
        return self.lower == self.upper

    @property
    def value(self) -> float:
        return 0.5 * (self.lower + self.upper)

    def to_list(self) -> list:
        return [self.lower, self.upper]


class AnalyticOperator(ABC):
    """Base operator interface.

    Implementors keep evaluation pure: no caching that depends on call order,
    no I/O. `variant` names the gallery entry, `params` its parameters.
    """

    variant: str = ""
    has_exact_resolvent_norm: bool = True
    has_exact_vector_metric: bool = True

    def __init__(self, params: Optional[dict] = None) -> None:
        self.params = dict(params or {})

    # required ------------------------------------------------------------

    @abstractmethod
    def resolvent_apply(self, x: Any, z: complex) -> np.ndarray:
        """(V - z)^{-1} x."""
        raise NotImplementedError

    @abstractmethod
    def resolvent_norm(self, z: complex) -> ResolventNorm:
        raise NotImplementedError

    @abstractmethod
    def in_spectrum(self, z: complex) -> bool:
        raise NotImplementedError

    @abstractmethod
    def spectrum_description(self) -> str:
        raise NotImplementedError

    # optional ------------------------------------------------------------

    @property
    def dim(self) -> Optional[int]:
        """Hilbert-space dimension of a finite variant, None otherwise."""
        m = self.matrix()
        return None if m is None else m.shape[0]

    @property
    def isolated_zero(self) -> bool:
        """True when 0 is an isolated point of the spectrum."""
        return False

    def matrix(self) -> Optional[np.ndarray]:
        return None

    def apply(self, x: Any) -> np.ndarray:
        m = self.matrix()
        if m is None:
            raise NotImplementedError(f"{self.variant} has no dense form")
        return m @ np.asarray(x, dtype=complex)

    def vector(self, spec: Any) -> Any:
        """Resolve a vector argument: arrays pass through, "e<k>" is a basis vector."""
        if isinstance(spec, str):
            k = self.dim
            if k is None or not spec.startswith("e"):
                raise ValueError(f"unknown vector {spec!r} for {self.variant}")
            idx = int(spec[1:])
            if not 1 <= idx <= k:
                raise ValueError(f"basis index {idx} out of range 1..{k}")
            return basis_vector(k, idx)
        return np.asarray(spec, dtype=complex)

    def inner(self, u: Any, v: Any) -> complex:
        """<u, v>, linear in u."""
        return complex(np.vdot(np.asarray(v), np.asarray(u)))

    def norm_sq(self, u: Any) -> float:
        return float(np.real(self.inner(u, u)))

    def in_resolvent_set(self, z: complex, margin: float = 1.0) -> bool:
        """Membership with a safety factor; variants decided by a threshold scale it by `margin`."""
        return not self.in_spectrum(z)

    def check_resolvent_point(self, z: complex) -> None:
        if self.in_spectrum(z):
            raise SingularPointError(f"z={z} lies in the spectrum of {self.variant}: {self.spectrum_description()}")

    def vector_metric(self, x: Any, z: complex) -> float:
        """g_x(z) = |(V - z)^{-1} x|^2."""
        return float(np.exp(self.log_vector_metric(x, z)))

    def log_vector_metric(self, x: Any, z: complex) -> float:
        return float(np.log(self.norm_sq(self.resolvent_apply(x, z))))

    def log_metric_bracket(self, z: complex) -> Tuple[float, float]:
        """log of the bracket for g(z) = |(V - z)^{-1}|^2."""
        rn = self.resolvent_norm(z)
        return 2.0 * float(np.log(rn.lower)), 2.0 * float(np.log(rn.upper))

    def spec_string(self) -> str:
        return self.variant

    def to_dict(self) -> dict:
        return {"variant": self.variant, "params": dict(self.params)}

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.spec_string()})"
