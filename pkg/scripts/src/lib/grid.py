"""Grid specifications, complex-number parsing and ordered parallel maps.

Grid evaluations are embarrassingly parallel; `ordered_map` fans them out on
a thread pool (LAPACK releases the GIL) and always returns results in input
order so output files stay deterministic.
"""
from __future__ import annotations

import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional, Sequence, Tuple, TypeVar

import numpy as np

T = TypeVar("T")
R = TypeVar("R")

_NUM = r"[0-9]*\.?[0-9]+(?:[eE][+-]?[0-9]+)?"
_COMPLEX_RE = re.compile(
    rf"^(?P<re>[+-]?{_NUM})?(?:(?P<im>[+-]{_NUM}|[+-])?[ij])?$"
)
_PURE_IM_RE = re.compile(rf"^(?P<im>[+-]?(?:{_NUM})?)[ij]$")


def parse_complex(text: str) -> complex:
    """Parse `a+bi`, `a-bi`, `a`, `bi` (``j`` accepted for ``i``)."""
    s = text.strip().replace(" ", "")
    if not s:
        raise ValueError("empty complex literal")
    m = _PURE_IM_RE.match(s)
    if m:
        im = m.group("im")
        return complex(0.0, float(im + "1") if im in ("", "+", "-") else float(im))
    m = _COMPLEX_RE.match(s)
    if not m or m.group("re") is None:
        raise ValueError(f"ambiguous or malformed complex literal: {text!r}")
    re_part = float(m.group("re"))
    im = m.group("im")
    if im is None:
        if s[-1] in "ij":
            raise ValueError(f"ambiguous or malformed complex literal: {text!r}")
        return complex(re_part, 0.0)
    im_part = float(im + "1") if im in ("+", "-") else float(im)
    return complex(re_part, im_part)


@dataclass(frozen=True)
class GridAxis:
    lo: float
    hi: float
    count: int

    def __post_init__(self) -> None:
        if self.count < 2:
            raise ValueError("grid resolution must be at least 2 per axis")
        if not self.hi > self.lo:
            raise ValueError("grid axis needs lo < hi")

    @classmethod
    def parse(cls, text: str) -> "GridAxis":
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid axis must be lo:hi:count, got {text!r}")
        return cls(float(parts[0]), float(parts[1]), int(parts[2]))

    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.count)

    @property
    def step(self) -> float:
        return (self.hi - self.lo) / (self.count - 1)


def parse_grid(text: str) -> Tuple[GridAxis, ...]:
    """`x0:x1:nx[,y0:y1:ny]` -> one or two axes."""
    axes = tuple(GridAxis.parse(p) for p in text.split(",") if p.strip())
    if len(axes) not in (1, 2):
        raise ValueError("grid must have one or two axes")
    return axes


def ordered_map(fn: Callable[[T], R], items: Iterable[T], workers: Optional[int] = None) -> List[R]:
    items = list(items)
    if not workers or workers <= 1 or len(items) < 2:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def geometric_radii(r0: float, q: float, count: int) -> np.ndarray:
    if not (r0 > 0 and 0 < q < 1 and count >= 1):
        raise ValueError("radius schedule needs r0 > 0, 0 < q < 1, count >= 1")
    return r0 * q ** np.arange(count)


def parse_radii(text: str) -> Tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"radii must be r0:q:count, got {text!r}")
    return float(parts[0]), float(parts[1]), int(parts[2])


def as_complex_array(values: Sequence[complex]) -> np.ndarray:
    return np.asarray(values, dtype=complex)
