"""Subcommand implementations.

Each command takes a `RunConfig` and returns ``(result, table)``: the JSON
payload and the pandas table used for CSV output (None lets the writer
flatten the payload). Grid commands keep points outside the domain as rows
with null values so that row order always follows the grid.
"""
from __future__ import annotations

import itertools
import logging
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src.geometry.contour import ContourSpec, dense_matrix, principal_part, riesz_projection
from src.geometry.paths import ParamPath, blowup_profile, circle_length, distance_lower_bound, path_length
from src.lib.data import load_json, load_matrix, load_tuple, matrix_to_pairs, pairs_to_vector, vector_to_pairs
from src.lib.errors import ConvergenceError, SingularPointError
from src.lib.grid import ordered_map, parse_complex
from src.lib.linalg import spectral_norm, unit
from src.lib.types import CurvatureSample, MatrixTuple, PencilPoint
from src.operators.base import AnalyticOperator
from src.operators.dihedral import DihedralPencil
from src.operators.gallery import from_spec
from src.operators.volterra import Volterra
from src.power.exponent import power_exponent, power_set_sample
from src.power.filtration import filtration_probe, similarity_invariance_check
from src.spectral.curvature import ricci_analytic_sample, ricci_tensor_fd
from src.spectral.fields import MetricField
from src.spectral.fk_determinant import (
    SpectralMeasure,
    dihedral_fk_det,
    dihedral_log_mean_exact,
    fk_det,
    length_lower_bound_from_potential,
    log_potential,
    phi_singular,
)
from src.spectral.forms import StateFunctional
from src.spectral.pencil import FreeAxis, SliceSpec, pencil_eval, spectrum_slice

from .config import RunConfig

log = logging.getLogger(__name__)

Result = Tuple[Any, Optional[pd.DataFrame]]

VOLTERRA_DEFAULT_ALPHAS = (0.0, 0.25, 0.5, 0.75)


# ---------------------------------------------------------------------------
# input helpers
# ---------------------------------------------------------------------------


def _point(text: str) -> PencilPoint:
    return PencilPoint([parse_complex(c) for c in text.split(",")])


def _tuple(cfg: RunConfig) -> MatrixTuple:
    return load_tuple(cfg.opt("tuple_path"))


def _operator(cfg: RunConfig) -> AnalyticOperator:
    return from_spec(cfg.opt("op"), cfg.tol)


def _state(cfg: RunConfig) -> StateFunctional:
    spec = cfg.opt("state", "trace")
    if spec == "trace":
        return StateFunctional.trace()
    return StateFunctional.from_dict(load_json(spec))


def _vector_arg(op: AnalyticOperator, text: Optional[str]) -> Any:
    """Vector flags: a name the operator understands, an alpha for Volterra, or a JSON file of pairs."""
    if text is None:
        return None
    if text.endswith(".json"):
        raw = load_json(text)
        return pairs_to_vector(raw["vector"] if isinstance(raw, dict) else raw)
    if isinstance(op, Volterra):
        try:
            return float(text)
        except ValueError:
            pass
    return text


def _vectors(cfg: RunConfig, op: AnalyticOperator) -> List[Any]:
    given = cfg.opt("vector")
    if given:
        return [_vector_arg(op, v) for v in given]
    if isinstance(op, Volterra):
        return [f"f_alpha:{a:g}" for a in VOLTERRA_DEFAULT_ALPHAS]
    if op.dim is None:
        raise ValueError(f"{op.variant} has no standard basis; pass --vector")
    return [f"e{i}" for i in range(1, op.dim + 1)]


def _base(cfg: RunConfig, n: int) -> PencilPoint:
    text = cfg.opt("base")
    base = _point(text) if text else PencilPoint(np.zeros(n, dtype=complex))
    if base.n != n:
        raise ValueError(f"--base has {base.n} coordinates, the pencil has {n}")
    return base


def _coord(cfg: RunConfig, n: int) -> int:
    c = int(cfg.opt("coord", 1))
    if not 1 <= c <= n:
        raise ValueError(f"--coord must lie in 1..{n}")
    return c - 1


def _grid_points(cfg: RunConfig, n: int) -> List[Tuple[Tuple[float, ...], PencilPoint]]:
    """Grid nodes in row-major order: one axis moves z[coord] along the reals, two span its complex plane."""
    base = _base(cfg, n)
    coord = _coord(cfg, n)
    directions = (1.0, 1j)[: len(cfg.grid)]
    out = []
    for params in itertools.product(*(ax.values() for ax in cfg.grid)):
        z = np.array(base.z, dtype=complex)
        z[coord] += sum(t * d for t, d in zip(params, directions))
        out.append((tuple(float(t) for t in params), PencilPoint(z)))
    return out


def _field(cfg: RunConfig) -> MetricField:
    if cfg.opt("tuple_path"):
        return MetricField.from_tuple(_tuple(cfg), _state(cfg), cfg.tol)
    op = _operator(cfg)
    x = _vector_arg(op, cfg.opt("vector"))
    if x is not None:
        return MetricField.vector_state(op, x, cfg.tol)
    if cfg.opt("state") == "trace":
        return MetricField.trace_state(op, cfg.tol)
    return MetricField.operator_norm(op, cfg.tol)


def _param_columns(params: Sequence[float]) -> Dict[str, float]:
    return {name: t for name, t in zip(("x", "y"), params)}


def _matrix_columns(prefix: str, m: Optional[np.ndarray], n: int) -> Dict[str, Optional[float]]:
    out: Dict[str, Optional[float]] = {}
    for j in range(n):
        for k in range(n):
            v = None if m is None else complex(m[j, k])
            out[f"{prefix}{j + 1}{k + 1}_re"] = None if v is None else v.real
            out[f"{prefix}{j + 1}{k + 1}_im"] = None if v is None else v.imag
    return out


def _map_grid(cfg: RunConfig, fn: Callable[[PencilPoint], Any], n: int) -> List[Tuple[Tuple[float, ...], PencilPoint, Any]]:
    points = _grid_points(cfg, n)

    def guarded(item):
        params, p = item
        try:
            return fn(p)
        except SingularPointError as exc:
            log.debug("grid point %s skipped: %s", p.z, exc)
            return None

    values = ordered_map(guarded, points, cfg.workers)
    return [(params, p, v) for (params, p), v in zip(points, values)]


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_spectrum(cfg: RunConfig) -> Result:
    a = _tuple(cfg)
    base = _base(cfg, a.n)
    axes = cfg.grid
    pair = cfg.opt("real_pair")
    if pair:
        coords = tuple(int(c) - 1 for c in pair.split(","))
        if len(coords) != 2 or len(axes) != 2:
            raise ValueError("--real-pair needs two coordinates and a two-axis grid")
        spec = SliceSpec.real_pair(base, (coords[0], coords[1]), axes[0], axes[1])
    elif len(axes) == 2:
        spec = SliceSpec.complex_plane(base, _coord(cfg, a.n), axes[0], axes[1])
    else:
        spec = SliceSpec(base=base, axes=(FreeAxis(_coord(cfg, a.n), axes[0]),))
    points = spectrum_slice(a, spec, refine_depth=int(cfg.opt("refine_depth", 12)), workers=cfg.workers)
    rows = []
    for sp in points:
        row: Dict[str, Any] = {"grid_index": ",".join(str(i) for i in sp.grid_index)}
        row.update({f"t{i + 1}": t for i, t in enumerate(sp.params)})
        for j, c in enumerate(sp.z.z):
            row[f"z{j + 1}_re"], row[f"z{j + 1}_im"] = c.real, c.imag
        row["sigma_ratio"] = sp.sigma_ratio
        rows.append(row)
    result = {
        "base": base.to_list(),
        "axes": [
            {
                "coord": ax.coord + 1,
                "lo": ax.axis.lo,
                "hi": ax.axis.hi,
                "count": ax.axis.count,
                "direction": [complex(ax.direction).real, complex(ax.direction).imag],
            }
            for ax in spec.axes
        ],
        "points": [sp.to_dict() for sp in points],
    }
    return result, pd.DataFrame(rows)


def cmd_metric_grid(cfg: RunConfig) -> Result:
    fld = _field(cfg)
    n = fld.n

    def evaluate(p: PencilPoint):
        if not fld.contains(p, 1.0):
            return None
        return fld(p), fld.log_det(p)

    entries, rows = [], []
    for params, p, value in _map_grid(cfg, evaluate, n):
        sample, logdet = value if value is not None else (None, None)
        entry = {"params": list(params), "z": p.to_list(), "in_domain": sample is not None}
        if sample is not None:
            entry.update(sample.to_dict())
            entry["positive_definite"] = sample.positive_definite
            entry["log_det"] = logdet
        entries.append(entry)
        row: Dict[str, Any] = _param_columns(params)
        row["in_domain"] = sample is not None
        row["log_det"] = logdet
        row["min_eigenvalue"] = None if sample is None else sample.min_eigenvalue
        row.update(_matrix_columns("g", None if sample is None else sample.g, n))
        rows.append(row)
    return {"field": fld.description, "points": entries}, pd.DataFrame(rows)


def cmd_ricci_grid(cfg: RunConfig) -> Result:
    if cfg.opt("analytic"):
        if not cfg.opt("op"):
            raise ValueError("--analytic needs --op")
        op = _operator(cfg)
        x = _vector_arg(op, cfg.opt("vector"))
        n = 1

        def evaluate(p: PencilPoint) -> Optional[CurvatureSample]:
            return ricci_analytic_sample(op, complex(p.z[0]), x=x, tol=cfg.tol)

        description = f"closed-form curvature of {op.spec_string()}"
    else:
        fld = _field(cfg)
        n = fld.n

        def evaluate(p: PencilPoint) -> Optional[CurvatureSample]:
            return ricci_tensor_fd(fld, p, h=cfg.fd_step)

        description = fld.description

    entries, rows = [], []
    for params, p, sample in _map_grid(cfg, evaluate, n):
        entry = {"params": list(params), "z": p.to_list(), "in_domain": sample is not None}
        if sample is not None:
            entry.update(sample.to_dict())
        entries.append(entry)
        row: Dict[str, Any] = _param_columns(params)
        row["in_domain"] = sample is not None
        row.update(_matrix_columns("ricci", None if sample is None else sample.ricci, n))
        rows.append(row)
    return {"field": description, "points": entries}, pd.DataFrame(rows)


def cmd_path_length(cfg: RunConfig) -> Result:
    fld = _field(cfg)
    if cfg.opt("path_file"):
        path = ParamPath.from_dict(load_json(cfg.opt("path_file")))
    else:
        p, q = cfg.opt("segment")
        path = ParamPath.segment(_point(p).z, _point(q).z)
    length = path_length(fld, path, epsrel=cfg.tol.quad_rel)
    result: Dict[str, Any] = {"field": fld.description, "path": path.to_dict()}
    result.update(length.to_dict())
    if cfg.opt("tuple_path"):
        try:
            result["distance_lower_bound"] = distance_lower_bound(_tuple(cfg), path.point(0.0), path.point(1.0))
        except SingularPointError:
            result["distance_lower_bound"] = None
    return result, None


def cmd_circle_length(cfg: RunConfig) -> Result:
    op = _operator(cfg)
    x = _vector_arg(op, cfg.opt("vector"))
    center = complex(cfg.opt("center", 0j))
    order = cfg.opt("order")
    if order is not None:
        profile = blowup_profile(op, cfg.schedule.radii(), int(order), x=x, center=center, tol=cfg.tol)
        result = {
            "order": profile.order,
            "bounded": profile.bounded,
            "rows": profile.to_frame().to_dict(orient="records"),
        }
        return result, profile.to_frame()

    r = cfg.opt("radius")
    if r is None:
        raise ValueError("circle-length needs --radius or --order")
    turns = int(cfg.opt("turns", 1))
    value = circle_length(op, float(r), x=x, center=center, turns=turns, tol=cfg.tol)
    result = {"radius": float(r), "center": [center.real, center.imag], "turns": turns, "length": value}
    if x is not None and op.matrix() is not None:
        xv = unit(np.asarray(op.vector(x), dtype=complex))
        try:
            res = riesz_projection(op, ContourSpec(center=center, radius=float(r)), cfg.tol)
            result["riesz_lower_bound"] = 2.0 * np.pi * turns * float(np.linalg.norm(res.P0 @ xv))
        except ConvergenceError as exc:
            log.warning("no Riesz lower bound: %s", exc)
            result["riesz_lower_bound"] = None
    return result, None


def cmd_fk_det(cfg: RunConfig) -> Result:
    if cfg.opt("dihedral"):
        z1, z2 = cfg.opt("z1"), cfg.opt("z2")
        if z1 is None or z2 is None:
            raise ValueError("--dihedral needs --z1 and --z2")
        value = dihedral_fk_det(z1, z2)
        exact_log = dihedral_log_mean_exact(z1, z2)
        result: Dict[str, Any] = {
            "z1": [z1.real, z1.imag],
            "z2": [z2.real, z2.imag],
            "fk_det": value,
            "fk_det_jensen": 0.0 if np.isinf(exact_log) else float(np.exp(0.5 * exact_log)),
            "singular": value <= cfg.tol.fk_singular,
        }
        m = cfg.opt("truncation")
        if m is not None:
            result["truncation"] = int(m)
            result["fk_det_truncated"] = DihedralPencil(int(m), cfg.tol).fk_det_blocks((z1, z2))
        return result, None

    if cfg.opt("matrix_path"):
        mat = load_matrix(cfg.opt("matrix_path"))
        value = fk_det(mat, tol=cfg.tol)
        return {"k": mat.shape[0], "fk_det": value, "singular": value <= cfg.tol.fk_singular}, None

    text = cfg.opt("point")
    if not text:
        raise ValueError("fk-det --tuple needs --point")
    a = _tuple(cfg)
    p = _point(text)
    return {
        "z": p.to_list(),
        "fk_det": fk_det(pencil_eval(a, p), tol=cfg.tol),
        "singular": phi_singular(a, p, cfg.tol),
    }, None


def cmd_log_potential(cfg: RunConfig) -> Result:
    spec = cfg.opt("measure")
    mu = SpectralMeasure.uniform_circle() if spec == "circle" else SpectralMeasure.from_dict(load_json(spec))
    zs = [complex(z) for z in cfg.opt("z")]
    values = [log_potential(mu, z) for z in zs]
    result: Dict[str, Any] = {
        "measure": mu.to_dict(),
        "points": [{"z": [z.real, z.imag], "potential": v} for z, v in zip(zs, values)],
    }
    target = cfg.opt("to")
    if target is not None:
        result["length_lower_bound"] = length_lower_bound_from_potential(mu, zs[0], complex(target))
    table = pd.DataFrame({"z_re": [z.real for z in zs], "z_im": [z.imag for z in zs], "potential": values})
    return result, table


def cmd_riesz(cfg: RunConfig) -> Result:
    op = _operator(cfg)
    mat = dense_matrix(op)
    contour = ContourSpec(center=complex(cfg.opt("center", 0j)), radius=float(cfg.opt("radius", 1.0)), nodes=int(cfg.opt("nodes", 32)))
    res = riesz_projection(op, contour, cfg.tol)
    result: Dict[str, Any] = {
        "contour": contour.to_dict(),
        "nodes_used": res.nodes,
        "P0": matrix_to_pairs(res.P0),
        "V0": matrix_to_pairs(res.V0),
        "idempotency_defect": res.idempotency_defect(),
        "commutator_defect": spectral_norm(res.P0 @ mat - mat @ res.P0),
    }
    table = None
    x = _vector_arg(op, cfg.opt("vector"))
    if x is not None:
        terms = principal_part(op, np.asarray(op.vector(x), dtype=complex), contour, cfg.opt("terms"), cfg.tol)
        norms = [float(np.linalg.norm(t)) for t in terms]
        result["principal_part"] = [{"term": j, "vector": vector_to_pairs(t), "norm": nrm} for j, (t, nrm) in enumerate(zip(terms, norms))]
        table = pd.DataFrame({"term": range(len(terms)), "norm": norms})
    return result, table


def cmd_power_exponent(cfg: RunConfig) -> Result:
    op = _operator(cfg)
    est = power_exponent(op, _vector_arg(op, cfg.opt("vector")), cfg.schedule, cfg.tol)
    result = est.to_dict()
    result["operator"] = op.to_dict()
    result["schedule"] = cfg.schedule.to_dict()
    return result, est.diagnostics


def cmd_power_set(cfg: RunConfig) -> Result:
    op = _operator(cfg)
    sample = power_set_sample(op, _vectors(cfg, op), cfg.schedule, cfg.tol, cfg.workers)
    result = sample.to_dict()
    result["operator"] = op.to_dict()
    result["schedule"] = cfg.schedule.to_dict()
    return result, sample.to_frame()


def cmd_filtration(cfg: RunConfig) -> Result:
    op = _operator(cfg)
    mat = dense_matrix(op)
    names = _vectors(cfg, op)
    corpus = [unit(np.asarray(op.vector(v), dtype=complex)) for v in names]
    if cfg.opt("commutant"):
        gens = [load_matrix(path) for path in cfg.opt("commutant")]
    else:
        gens = [np.linalg.matrix_power(mat, j) for j in range(1, mat.shape[0])]
    probe = filtration_probe(op, float(cfg.opt("tau")), corpus, gens, cfg.schedule, cfg.tol)
    labels = [v if isinstance(v, str) else f"x{i}" for i, v in enumerate(names)]
    table = pd.DataFrame(
        {
            "vector": labels,
            "k_hat": probe.k_hats,
            "member": [i in probe.members for i in range(len(labels))],
        }
    )
    result = probe.to_dict()
    result["vectors"] = labels
    return result, table


def cmd_similarity_check(cfg: RunConfig) -> Result:
    op = _operator(cfg)
    s = load_matrix(cfg.opt("similarity"))
    report = similarity_invariance_check(op, s, _vectors(cfg, op), cfg.schedule, cfg.tol)
    return report.to_dict(), report.table


COMMAND_TABLE: Dict[str, Callable[[RunConfig], Result]] = {
    "spectrum": cmd_spectrum,
    "metric-grid": cmd_metric_grid,
    "ricci-grid": cmd_ricci_grid,
    "path-length": cmd_path_length,
    "circle-length": cmd_circle_length,
    "fk-det": cmd_fk_det,
    "log-potential": cmd_log_potential,
    "riesz": cmd_riesz,
    "power-exponent": cmd_power_exponent,
    "power-set": cmd_power_set,
    "filtration": cmd_filtration,
    "similarity-check": cmd_similarity_check,
}


def run(cfg: RunConfig) -> Result:
    return COMMAND_TABLE[cfg.command](cfg)
