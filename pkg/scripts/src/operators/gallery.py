"""Factory for gallery members from CLI spec strings and JSON.

Spec strings: ``jordan:n``, ``volterra[:samples]``, ``ushift:N``,
``bshift:N``, ``dihedral:M`` and ``matrix:FILE``. A matrix file is either a
bare list of rows of ``[re, im]`` pairs or ``{"matrix": ..., "isolated_point":
[re, im]}``.
"""
from __future__ import annotations

import logging
from typing import Callable, Dict

from src.lib.config import DEFAULT_TOLERANCES, Tolerances
from src.lib.data import load_json, pair_to_complex, pairs_to_matrix

from .base import AnalyticOperator
from .dihedral import DihedralPencil
from .jordan import JordanNilpotent
from .matrix import FiniteMatrix
from .shifts import BilateralShift, UnilateralShift
from .volterra import Volterra

log = logging.getLogger(__name__)


def _int_param(variant: str, arg: str) -> int:
    if not arg:
        raise ValueError(f"{variant} needs a size, e.g. {variant}:4")
    try:
        return int(arg)
    except ValueError as exc:
        raise ValueError(f"{variant} size must be an integer, got {arg!r}") from exc


def load_finite_matrix(path: str, tol: Tolerances = DEFAULT_TOLERANCES) -> FiniteMatrix:
    raw = load_json(path)
    iso = None
    if isinstance(raw, dict):
        if raw.get("isolated_point") is not None:
            iso = pair_to_complex(raw["isolated_point"])
        raw = raw["matrix"]
    return FiniteMatrix(pairs_to_matrix(raw), isolated_point=iso, tol=tol, source=str(path))


_SIZED: Dict[str, Callable[[int, Tolerances], AnalyticOperator]] = {
    "jordan": lambda n, tol: JordanNilpotent(n),
    "ushift": lambda n, tol: UnilateralShift(n),
    "bshift": lambda n, tol: BilateralShift(n),
    "dihedral": lambda n, tol: DihedralPencil(n, tol),
}


def from_spec(spec: str, tol: Tolerances = DEFAULT_TOLERANCES) -> AnalyticOperator:
    variant, _, arg = spec.strip().partition(":")
    variant = variant.lower()
    if variant in _SIZED:
        op = _SIZED[variant](_int_param(variant, arg), tol)
    elif variant == "volterra":
        op = Volterra(_int_param(variant, arg)) if arg else Volterra()
    elif variant == "matrix":
        if not arg:
            raise ValueError("matrix needs a file, e.g. matrix:V.json")
        op = load_finite_matrix(arg, tol)
    else:
        raise ValueError(f"unknown operator {spec!r}; expected one of jordan, volterra, ushift, bshift, dihedral, matrix")
    log.debug("built %r from %r", op, spec)
    return op


def from_dict(d: dict, tol: Tolerances = DEFAULT_TOLERANCES) -> AnalyticOperator:
    """Inverse of `AnalyticOperator.to_dict` for every variant except file-less matrices."""
    variant = d.get("variant")
    params = d.get("params", {})
    if variant == "jordan":
        return JordanNilpotent(int(params["n"]))
    if variant == "volterra":
        return Volterra(int(params.get("samples", 1025)))
    if variant == "ushift":
        return UnilateralShift(int(params["N"]))
    if variant == "bshift":
        return BilateralShift(int(params["N"]))
    if variant == "dihedral":
        return DihedralPencil(int(params["M"]), tol)
    if variant == "matrix":
        if "matrix" in params:
            iso = params.get("isolated_point")
            return FiniteMatrix(
                pairs_to_matrix(params["matrix"]),
                isolated_point=None if iso is None else pair_to_complex(iso),
                tol=tol,
            )
        if "source" in params:
            return load_finite_matrix(params["source"], tol)
    raise ValueError(f"cannot rebuild operator from {d!r}")
