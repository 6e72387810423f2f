"""Core typed primitives used across the project.

Defines light-weight value objects for matrix tuples, pencil points and the
samples produced by the numerical layers (resolvents, metric matrices,
curvature). They keep the packages decoupled: every module accepts and
returns these types rather than bare arrays where a result carries more than
one number.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, List, Optional, Sequence

import numpy as np

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import DimensionMismatchError, InvalidTupleError


class CurvatureMethod(Enum):
    ANALYTIC = "analytic"
    FINITE_DIFFERENCE = "finite_difference"


@dataclass(frozen=True, eq=False)
class MatrixTuple:
    """Ordered tuple A = (A_1, ..., A_n) of complex k x k matrices."""

    matrices: tuple
    normalized: bool = False
    labels: Optional[tuple] = None
    tol: Tolerances = field(default=DEFAULT_TOLERANCES, repr=False)

    def __post_init__(self) -> None:
        mats = tuple(np.array(m, dtype=complex) for m in self.matrices)
        if not mats:
            raise InvalidTupleError("a tuple needs at least one matrix")
        k = mats[0].shape[0]
        for m in mats:
            if m.ndim != 2 or m.shape != (k, k):
                raise InvalidTupleError(f"all entries must be {k}x{k}, got {m.shape}")
            m.setflags(write=False)
        object.__setattr__(self, "matrices", mats)
        if self.labels is not None:
            labels = tuple(str(s) for s in self.labels)
            if len(labels) != len(mats):
                raise InvalidTupleError("one label per matrix")
            object.__setattr__(self, "labels", labels)
        if self.normalized and not np.array_equal(mats[0], np.eye(k)):
            raise InvalidTupleError("normalized tuple must start with the identity")

        eig = np.linalg.eigvalsh(self.gram())
        if eig[-1] <= 0.0 or eig[0] <= self.tol.rank * eig[-1]:
            raise InvalidTupleError("tuple entries are linearly dependent")

    @classmethod
    def normalized_from(cls, *matrices, labels: Optional[Sequence[str]] = None) -> "MatrixTuple":
        """Prepend the identity to `matrices` and mark the tuple normalized."""
        k = np.asarray(matrices[0]).shape[0]
        lab = None if labels is None else ("I", *labels)
        return cls(matrices=(np.eye(k), *matrices), normalized=True, labels=lab)

    @property
    def n(self) -> int:
        return len(self.matrices)

    @property
    def k(self) -> int:
        return self.matrices[0].shape[0]

    def gram(self) -> np.ndarray:
        """Trace Gram matrix G_jk = Tr(A_j^* A_k)."""
        flat = np.stack([m.reshape(-1) for m in self.matrices], axis=1)
        return flat.conj().T @ flat

    def stacked(self) -> np.ndarray:
        """Array of shape (n, k, k)."""
        return np.stack(self.matrices)


@dataclass(frozen=True, eq=False)
class PencilPoint:
    z: np.ndarray

    def __post_init__(self) -> None:
        z = np.atleast_1d(np.array(self.z, dtype=complex))
        if z.ndim != 1:
            raise DimensionMismatchError("a pencil point is a vector")
        if not np.all(np.isfinite(z)):
            raise ValueError("pencil point has non-finite components")
        z.setflags(write=False)
        object.__setattr__(self, "z", z)

    @classmethod
    def of(cls, *coords: complex) -> "PencilPoint":
        return cls(np.array(coords, dtype=complex))

    @property
    def n(self) -> int:
        return self.z.shape[0]

    def scaled(self, lam: complex) -> "PencilPoint":
        return PencilPoint(lam * self.z)

    def shifted(self, dz: Iterable[complex]) -> "PencilPoint":
        return PencilPoint(self.z + np.asarray(list(dz), dtype=complex))

    def to_list(self) -> List[List[float]]:
        return [[float(c.real), float(c.imag)] for c in self.z]


def as_point(z) -> PencilPoint:
    if isinstance(z, PencilPoint):
        return z
    return PencilPoint(z)


@dataclass(frozen=True, eq=False)
class ResolventSample:
    z: PencilPoint
    pencil_value: np.ndarray
    inverse: Optional[np.ndarray]
    smallest_singular_value: float
    largest_singular_value: float
    invertible: bool


@dataclass(frozen=True, eq=False)
class MetricSample:
    z: PencilPoint
    g: np.ndarray
    min_eigenvalue: float
    positive_definite: bool

    @property
    def n(self) -> int:
        return self.g.shape[0]

    @property
    def det(self) -> float:
        return float(np.real(np.linalg.det(self.g)))

    def to_dict(self) -> dict:
        return {
            "z": self.z.to_list(),
            "g": [[[float(v.real), float(v.imag)] for v in row] for row in self.g],
            "min_eigenvalue": float(self.min_eigenvalue),
        }


@dataclass(frozen=True, eq=False)
class CurvatureSample:
    z: PencilPoint
    ricci: np.ndarray
    method: CurvatureMethod
    step: Optional[float] = None

    @property
    def scalar_ricci(self) -> float:
        if self.ricci.shape != (1, 1):
            raise DimensionMismatchError("scalar Ricci curvature needs n = 1")
        return float(self.ricci[0, 0].real)

    def to_dict(self) -> dict:
        return {
            "z": self.z.to_list(),
            "ricci": [[[float(v.real), float(v.imag)] for v in row] for row in self.ricci],
            "method": self.method.value,
            "step": self.step,
        }
