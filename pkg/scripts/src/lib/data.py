"""JSON data access layer.

Complex numbers travel as ``[re, im]`` pairs and matrices row-major as lists
of rows of pairs. This module converts between that wire format and numpy
arrays and loads/stores `MatrixTuple` files of the form
``{"k": int, "n": int, "normalized": bool, "matrices": [...]}``. Other value
types (states, paths, measures) build on these codecs in their own modules.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, List, Sequence, Union

import numpy as np

from .errors import DimensionMismatchError, InvalidTupleError
from .types import MatrixTuple

PathLike = Union[str, Path]


def complex_to_pair(c: complex) -> List[float]:
    c = complex(c)
    return [float(c.real), float(c.imag)]


def pair_to_complex(pair: Sequence[float]) -> complex:
    if len(pair) != 2:
        raise ValueError(f"complex entries are [re, im] pairs, got {pair!r}")
    return complex(float(pair[0]), float(pair[1]))


def vector_to_pairs(v: np.ndarray) -> List[List[float]]:
    return [complex_to_pair(c) for c in np.asarray(v).reshape(-1)]


def pairs_to_vector(pairs: Sequence[Sequence[float]]) -> np.ndarray:
    return np.array([pair_to_complex(p) for p in pairs], dtype=complex)


def matrix_to_pairs(m: np.ndarray) -> List[List[List[float]]]:
    return [[complex_to_pair(c) for c in row] for row in np.asarray(m)]


def pairs_to_matrix(rows: Sequence[Sequence[Sequence[float]]]) -> np.ndarray:
    m = np.array([[pair_to_complex(p) for p in row] for row in rows], dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {m.shape}")
    return m


def tuple_to_dict(a: MatrixTuple) -> dict:
    return {
        "k": a.k,
        "n": a.n,
        "normalized": a.normalized,
        "matrices": [matrix_to_pairs(m) for m in a.matrices],
    }


def tuple_from_dict(d: dict) -> MatrixTuple:
    try:
        mats = [pairs_to_matrix(m) for m in d["matrices"]]
        k, n = int(d["k"]), int(d["n"])
    except KeyError as exc:
        raise InvalidTupleError(f"tuple JSON misses key {exc}") from exc
    if len(mats) != n or any(m.shape != (k, k) for m in mats):
        raise InvalidTupleError("tuple JSON header (k, n) disagrees with its matrices")
    return MatrixTuple(matrices=tuple(mats), normalized=bool(d.get("normalized", False)))


def load_json(path: PathLike) -> Any:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def dump_json(obj: Any, path: PathLike) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def load_tuple(path: PathLike) -> MatrixTuple:
    return tuple_from_dict(load_json(path))


def save_tuple(a: MatrixTuple, path: PathLike) -> None:
    dump_json(tuple_to_dict(a), path)


def load_matrix(path: PathLike) -> np.ndarray:
    """A bare matrix file: either a list of rows of pairs or {"matrix": ...}."""
    raw = load_json(path)
    if isinstance(raw, dict):
        raw = raw["matrix"]
    return pairs_to_matrix(raw)
