"""Fuglede-Kadison determinants, phi-singular points and logarithmic potentials.

For a k x k matrix and the normalized trace, det x = exp(phi(log|x|)) is the
geometric mean of the singular values, |det x|^{1/k}. The dihedral pencil has
the integral form

    det R(z) = exp((1/4 pi) * int_0^{2 pi} log|1 - z1^2 - z2^2 - 2 z1 z2 cos t| dt),

which is evaluated by quadrature with the logarithmic singularities at the
real roots of the integrand split off analytically.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

import numpy as np
import scipy.linalg as sla

from src.lib.config import DEFAULT_TOLERANCES, Tolerances
from src.lib.data import complex_to_pair, pair_to_complex
from src.lib.errors import DimensionMismatchError
from src.lib.linalg import singular_values
from src.lib.quadrature import split_periodic
from src.lib.types import MatrixTuple

from .pencil import pencil_eval

log = logging.getLogger(__name__)

DIVERGENCE_EXPONENT = -1e3


def fk_det(x: np.ndarray, k: Optional[int] = None, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """exp((1/k) sum_i log sigma_i(x)); 0 as soon as a singular value underflows."""
    x = np.asarray(x, dtype=complex)
    if k is not None and k != x.shape[0]:
        raise DimensionMismatchError(f"fk_det: k={k} but the matrix is {x.shape[0]}x{x.shape[0]}")
    s = singular_values(x)
    if s[-1] <= tol.underflow:
        return 0.0
    return float(np.exp(np.mean(np.log(s))))


def phi_singular(a: MatrixTuple, z, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
    return fk_det(pencil_eval(a, z), tol=tol) <= tol.fk_singular


def _dihedral_coeffs(z1: complex, z2: complex) -> Tuple[complex, complex]:
    z1, z2 = complex(z1), complex(z2)
    return 1.0 - z1 * z1 - z2 * z2, -2.0 * z1 * z2


def _real_roots(a: complex, b: complex) -> list:
    """Roots of a + b cos t on [0, 2 pi) with their multiplicities."""
    if b == 0:
        return []
    c = -a / b
    if abs(c.imag) > 1e-12 * (1.0 + abs(c)) or abs(c.real) > 1.0 + 1e-12:
        return []
    cr = float(np.clip(c.real, -1.0, 1.0))
    t = float(np.arccos(cr))
    if abs(np.sin(t)) < 1e-8:
        return [(t, 2.0)]
    return [(t, 1.0), (2.0 * np.pi - t, 1.0)]


def dihedral_log_mean(z1: complex, z2: complex) -> float:
    """(1/2 pi) int_0^{2 pi} log|a + b cos t| dt by split quadrature; -inf on S."""
    a, b = _dihedral_coeffs(z1, z2)
    if a == 0 and b == 0:
        return -np.inf
    if b == 0:
        return float(np.log(abs(a)))
    roots = _real_roots(a, b)

    def integrand(t: float) -> float:
        v = abs(a + b * np.cos(t))
        return float(np.log(v)) if v > 0 else -745.0

    total = split_periodic(integrand, 0.0, roots)
    return total / (2.0 * np.pi)


def dihedral_log_mean_exact(z1: complex, z2: complex) -> float:
    """Jensen's formula: log|b/2| + log max(|rho_1|, |rho_2|) with rho the roots of rho^2 + (2a/b) rho + 1."""
    a, b = _dihedral_coeffs(z1, z2)
    if b == 0:
        return -np.inf if a == 0 else float(np.log(abs(a)))
    rho = np.roots([1.0, 2.0 * a / b, 1.0])
    return float(np.log(abs(b) / 2.0) + np.log(np.max(np.abs(rho))))


def dihedral_fk_det(z1: complex, z2: complex) -> float:
    exponent = 0.5 * dihedral_log_mean(z1, z2)
    if exponent < DIVERGENCE_EXPONENT:
        log.debug("dihedral_fk_det: exponent %.3e below cutoff at (%s, %s)", exponent, z1, z2)
        return 0.0
    return float(np.exp(exponent))


class MeasureKind(Enum):
    ATOMIC = "atomic"
    UNIFORM_CIRCLE = "uniform_circle"


@dataclass(frozen=True, eq=False)
class SpectralMeasure:
    """A probability measure on the plane: finitely many atoms or normalized arclength on a circle."""

    kind: MeasureKind
    atoms: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))
    weights: np.ndarray = field(default_factory=lambda: np.zeros(0))
    center: complex = 0.0
    radius: float = 1.0

    def __post_init__(self) -> None:
        if self.kind is MeasureKind.ATOMIC:
            atoms = np.asarray(self.atoms, dtype=complex).reshape(-1)
            w = np.asarray(self.weights, dtype=float).reshape(-1)
            if atoms.shape != w.shape or atoms.size == 0:
                raise ValueError("atomic measure needs one weight per atom")
            if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
                raise ValueError("atomic weights must be nonnegative and sum to 1")
            object.__setattr__(self, "atoms", atoms)
            object.__setattr__(self, "weights", w)
        elif not self.radius > 0:
            raise ValueError("circle measure needs a positive radius")

    @classmethod
    def atomic(cls, atoms, weights) -> "SpectralMeasure":
        return cls(MeasureKind.ATOMIC, atoms=np.asarray(atoms), weights=np.asarray(weights))

    @classmethod
    def uniform_circle(cls, center: complex = 0.0, radius: float = 1.0) -> "SpectralMeasure":
        return cls(MeasureKind.UNIFORM_CIRCLE, center=complex(center), radius=float(radius))

    @classmethod
    def from_normal_matrix(cls, v: np.ndarray, x: np.ndarray, atol: float = 1e-10) -> "SpectralMeasure":
        """Atoms <E(lambda) x, x> of a normal matrix for a unit vector x."""
        v = np.asarray(v, dtype=complex)
        x = np.asarray(x, dtype=complex)
        scale = max(1.0, float(np.linalg.norm(v, 2)) ** 2)
        if np.linalg.norm(v @ v.conj().T - v.conj().T @ v) > atol * scale:
            raise ValueError("matrix is not normal")
        t, q = sla.schur(v, output="complex")
        w = np.abs(q.conj().T @ x) ** 2
        w = w / w.sum()
        return cls.atomic(np.diag(t), w)

    def to_dict(self) -> dict:
        if self.kind is MeasureKind.ATOMIC:
            return {
                "kind": self.kind.value,
                "atoms": [[float(l.real), float(l.imag), float(w)] for l, w in zip(self.atoms, self.weights)],
            }
        return {"kind": self.kind.value, "center": complex_to_pair(self.center), "radius": self.radius}

    @classmethod
    def from_dict(cls, d: dict) -> "SpectralMeasure":
        kind = MeasureKind(d["kind"])
        if kind is MeasureKind.ATOMIC:
            rows = d["atoms"]
            return cls.atomic([complex(r[0], r[1]) for r in rows], [r[2] for r in rows])
        return cls.uniform_circle(pair_to_complex(d.get("center", [0.0, 0.0])), float(d.get("radius", 1.0)))


def _on_circle(mu: SpectralMeasure, z: complex) -> bool:
    return abs(abs(z - mu.center) - mu.radius) <= 1e-12 * mu.radius


def log_potential(mu: SpectralMeasure, z: complex) -> float:
    """V(z) = int log(1/|lambda - z|) dmu(lambda); +inf at an atom of positive mass."""
    z = complex(z)
    if mu.kind is MeasureKind.ATOMIC:
        d = np.abs(mu.atoms - z)
        hit = (d == 0) & (mu.weights > 0)
        if np.any(hit):
            return np.inf
        keep = mu.weights > 0
        return float(-np.sum(mu.weights[keep] * np.log(d[keep])))

    c, r = mu.center, mu.radius

    def integrand(t: float) -> float:
        v = abs(c + r * np.exp(1j * t) - z)
        return float(-np.log(v)) if v > 0 else 745.0

    roots = []
    if _on_circle(mu, z):
        roots = [(float(np.angle(z - c)) % (2.0 * np.pi), -1.0)]
    return split_periodic(integrand, 0.0, roots) / (2.0 * np.pi)


def length_lower_bound_from_potential(mu: SpectralMeasure, z0: complex, z1: complex) -> float:
    """int |log((lambda - z1)/(lambda - z0))| dmu: lower bound for the segment [z0, z1] under g_x.

    The principal logarithm is the continuous branch along a straight segment.
    Infinite when z1 carries an atom.
    """
    z0, z1 = complex(z0), complex(z1)
    if mu.kind is MeasureKind.ATOMIC:
        keep = mu.weights > 0
        lam, w = mu.atoms[keep], mu.weights[keep]
        if np.any(lam == z1) or np.any(lam == z0):
            return np.inf
        return float(np.sum(w * np.abs(np.log((lam - z1) / (lam - z0)))))

    c, r = mu.center, mu.radius

    def integrand(t: float) -> float:
        lam = c + r * np.exp(1j * t)
        num, den = lam - z1, lam - z0
        if num == 0 or den == 0:
            return 745.0
        return float(abs(np.log(num / den)))

    roots = []
    for p in (z0, z1):
        if _on_circle(mu, p):
            roots.append((float(np.angle(p - c)) % (2.0 * np.pi), -1.0))
    # near a hit point |log w| = -log|w| + O(1)
    return split_periodic(integrand, 0.0, roots) / (2.0 * np.pi)
