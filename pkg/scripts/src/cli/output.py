"""Artifact writers.

JSON is the canonical format: ``{"metadata": {...}, "result": ...}`` with
sorted keys. CSV is a projection for plotting tools: the metadata as
leading ``# key: value`` lines, then the command's table.
"""
from __future__ import annotations

import json
import sys
from datetime import datetime, timezone
from typing import Any, Optional

import numpy as np
import pandas as pd
import scipy

from .config import RunConfig

METRIC_CONVENTION = "g = squared norm"


def metadata(cfg: RunConfig) -> dict:
    return {
        "command": cfg.command,
        "tolerances": cfg.tol.to_dict(),
        "fd_step": cfg.fd_step,
        "metric_convention": METRIC_CONVENTION,
        "singularity_rule": f"sigma_min <= {cfg.tol.singularity:g} * sigma_max",
        "versions": {"numpy": np.__version__, "scipy": scipy.__version__, "pandas": pd.__version__},
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }


def _plain(obj: Any) -> Any:
    """Replace numpy scalars and non-finite floats by JSON-safe values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if np.isnan(v):
            return None
        if np.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def render_json(cfg: RunConfig, result: Any) -> str:
    return json.dumps(_plain({"metadata": metadata(cfg), "result": result}), indent=2, sort_keys=True) + "\n"


def render_csv(cfg: RunConfig, table: pd.DataFrame) -> str:
    head = []
    for key, value in metadata(cfg).items():
        text = json.dumps(_plain(value), sort_keys=True) if isinstance(value, dict) else str(value)
        head.append(f"# {key}: {text}")
    return "\n".join(head) + "\n" + table.to_csv(index=False, float_format="%.17g", lineterminator="\n")


def write(cfg: RunConfig, result: Any, table: Optional[pd.DataFrame]) -> None:
    if cfg.fmt == "csv":
        if table is None:
            table = pd.json_normalize(_plain(result))
        text = render_csv(cfg, table)
    else:
        text = render_json(cfg, result)
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        cfg.out.write_text(text, encoding="utf-8")
