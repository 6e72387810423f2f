"""Run configuration and the argument parser.

`build_parser` declares every subcommand; `RunConfig.from_args` folds the
flags shared by all of them (tolerances, schedule, output) into one
dataclass, leaving command-specific options on `RunConfig.options`.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

from src.lib.config import DEFAULT_TOLERANCES, Tolerances
from src.lib.grid import GridAxis, parse_complex, parse_grid, parse_radii
from src.power.exponent import PowerSchedule

FORMATS = ("json", "csv")

COMMANDS = (
    "spectrum",
    "metric-grid",
    "ricci-grid",
    "path-length",
    "circle-length",
    "fk-det",
    "log-potential",
    "riesz",
    "power-exponent",
    "power-set",
    "filtration",
    "similarity-check",
)


class CliParser(argparse.ArgumentParser):
    """argparse with exit status 1 for usage errors."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class RunConfig:
    command: str
    tol: Tolerances = DEFAULT_TOLERANCES
    fd_step: Optional[float] = None
    grid: Tuple[GridAxis, ...] = ()
    schedule: PowerSchedule = field(default_factory=PowerSchedule)
    out: Optional[Path] = None
    fmt: str = "json"
    workers: Optional[int] = None
    options: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.fmt not in FORMATS:
            raise ValueError(f"output format must be one of {FORMATS}, got {self.fmt!r}")
        if self.fd_step is not None and not self.fd_step > 0:
            raise ValueError("--fd-step must be positive")
        if self.workers is not None and self.workers < 1:
            raise ValueError("--workers must be at least 1")

    def opt(self, name: str, default: Any = None) -> Any:
        value = self.options.get(name)
        return default if value is None else value

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        if not args.tol_sing > 0 or not args.tol_quad > 0:
            raise ValueError("tolerances must be positive")
        tol = replace(DEFAULT_TOLERANCES, singularity=args.tol_sing, quad_rel=args.tol_quad)
        sched = PowerSchedule()
        if getattr(args, "radii", None):
            r0, q, count = parse_radii(args.radii)
            sched = replace(sched, r0=r0, q=q, count=count, window=min(sched.window, count))
        if getattr(args, "angles", None) is not None:
            sched = replace(sched, angles=args.angles)
        grid = parse_grid(args.grid) if getattr(args, "grid", None) else ()
        shared = {"command", "func", "tol_sing", "tol_quad", "fd_step", "grid", "radii", "angles", "out", "format", "workers", "verbose"}
        return cls(
            command=args.command,
            tol=tol,
            fd_step=args.fd_step,
            grid=grid,
            schedule=sched,
            out=Path(args.out) if args.out else None,
            fmt=args.format,
            workers=args.workers,
            options={k: v for k, v in vars(args).items() if k not in shared},
        )


def _complex(text: str) -> complex:
    try:
        return parse_complex(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("numerics and output")
    g.add_argument("--tol-sing", type=float, default=DEFAULT_TOLERANCES.singularity, help="relative sigma_min threshold for singularity")
    g.add_argument("--tol-quad", type=float, default=DEFAULT_TOLERANCES.quad_rel, help="relative quadrature tolerance")
    g.add_argument("--fd-step", type=float, default=None, help="finite-difference step (default 1e-4 max(1, |z|))")
    g.add_argument("--out", default=None, help="output file (default stdout)")
    g.add_argument("--format", choices=FORMATS, default="json")
    g.add_argument("--workers", type=int, default=None, help="threads for grid evaluation")
    g.add_argument("--verbose", "-v", action="store_true", help="debug logging on stderr")
    return p


def _source(p: argparse.ArgumentParser, vector: bool = True) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--tuple", dest="tuple_path", help="MatrixTuple JSON file")
    src.add_argument("--op", help="gallery operator, e.g. jordan:4, volterra, ushift:256, matrix:V.json")
    p.add_argument("--state", default=None, help="'trace' or a StateFunctional JSON file")
    if vector:
        p.add_argument("--vector", default=None, help="vector for a single operator: e2, 1, f_alpha:0.25 or a JSON file")


def _slice(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--grid", required=required, help="x0:x1:nx[,y0:y1:ny]")
    p.add_argument("--coord", type=int, default=1, help="free coordinate (1-based)")
    p.add_argument("--base", default=None, help="comma-separated base point, e.g. 0,1")


def _schedule(p: argparse.ArgumentParser) -> None:
    p.add_argument("--radii", default=None, help="r0:q:count geometric radius schedule")
    p.add_argument("--angles", type=int, default=None, help="sample angles per circle")


def build_parser() -> argparse.ArgumentParser:
    parser = CliParser(prog="python -m src.cli", description="Geometry of resolvent sets: grids, lengths, determinants, exponents.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=CliParser)
    common = _common()

    p = sub.add_parser("spectrum", parents=[common], help="sample the joint spectrum on a slice")
    p.add_argument("--tuple", dest="tuple_path", required=True)
    _slice(p)
    p.add_argument("--real-pair", default=None, help="two 1-based coordinates varied over real values, e.g. 1,2")
    p.add_argument("--refine-depth", type=int, default=12)

    p = sub.add_parser("metric-grid", parents=[common], help="metric matrix over a grid")
    _source(p)
    _slice(p)

    p = sub.add_parser("ricci-grid", parents=[common], help="Ricci curvature over a grid")
    _source(p)
    _slice(p)
    p.add_argument("--analytic", action="store_true", help="closed-form curvature for a single operator")

    p = sub.add_parser("path-length", parents=[common], help="length of a path under a metric")
    _source(p)
    path = p.add_mutually_exclusive_group(required=True)
    path.add_argument("--path", dest="path_file", help="ParamPath JSON file")
    path.add_argument("--segment", nargs=2, metavar=("P", "Q"), help="endpoints as comma-separated coordinates")

    p = sub.add_parser("circle-length", parents=[common], help="L_x(C_r) or the blow-up profile r^(N-1) L(C_r)")
    p.add_argument("--op", required=True)
    p.add_argument("--vector", default=None)
    p.add_argument("--radius", type=float, default=None)
    p.add_argument("--center", type=_complex, default=0j)
    p.add_argument("--turns", type=int, default=1)
    p.add_argument("--order", type=int, default=None, help="blow-up order N; sweeps --radii")
    _schedule(p)

    p = sub.add_parser("fk-det", parents=[common], help="Fuglede-Kadison determinant")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--tuple", dest="tuple_path", help="determinant of A(z) at --point")
    mode.add_argument("--matrix", dest="matrix_path", help="determinant of a matrix file")
    mode.add_argument("--dihedral", action="store_true", help="integral determinant of the dihedral pencil")
    p.add_argument("--point", default=None, help="comma-separated pencil point for --tuple")
    p.add_argument("--z1", type=_complex, default=None)
    p.add_argument("--z2", type=_complex, default=None)
    p.add_argument("--truncation", type=int, default=None, help="also evaluate the 2M x 2M truncated pencil")

    p = sub.add_parser("log-potential", parents=[common], help="logarithmic potential of a spectral measure")
    p.add_argument("--measure", required=True, help="SpectralMeasure JSON file or 'circle'")
    p.add_argument("--z", type=_complex, action="append", required=True, help="evaluation point (repeatable)")
    p.add_argument("--to", type=_complex, default=None, help="segment endpoint for the length lower bound")

    p = sub.add_parser("riesz", parents=[common], help="Riesz projection and principal part")
    p.add_argument("--op", required=True)
    p.add_argument("--center", type=_complex, default=0j)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--nodes", type=int, default=32)
    p.add_argument("--vector", default=None, help="vector for the principal part")
    p.add_argument("--terms", type=int, default=None, help="maximum number of principal-part terms")

    p = sub.add_parser("power-exponent", parents=[common], help="blow-up exponent k_x")
    p.add_argument("--op", required=True)
    p.add_argument("--vector", required=True)
    _schedule(p)

    p = sub.add_parser("power-set", parents=[common], help="sample of the power set")
    p.add_argument("--op", required=True)
    p.add_argument("--vector", action="append", default=None, help="vector (repeatable); default: standard basis")
    _schedule(p)

    p = sub.add_parser("filtration", parents=[common], help="M_tau membership and commutant defect")
    p.add_argument("--op", required=True)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--vector", action="append", default=None, help="corpus vector (repeatable); default: standard basis")
    p.add_argument("--commutant", action="append", default=None, help="matrix JSON commuting with V (repeatable); default: powers of V")
    _schedule(p)

    p = sub.add_parser("similarity-check", parents=[common], help="k_x(S^-1 V S) against k_Sx(V)")
    p.add_argument("--op", required=True)
    p.add_argument("--similarity", required=True, help="matrix JSON file S")
    p.add_argument("--vector", action="append", default=None, help="vector (repeatable); default: standard basis")
    _schedule(p)

    return parser
