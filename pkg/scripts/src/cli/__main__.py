"""Entry point: ``python -m src.cli <command> [flags]`` (run from scripts/).

Exit status: 0 ok, 1 bad input, 2 domain violation (point in the spectrum,
contour or stencil meeting it), 3 numerical non-convergence.
"""
from __future__ import annotations

import logging
import sys
from typing import Optional, Sequence

from src.lib.errors import ConvergenceError, SingularPointError

from .commands import run
from .config import RunConfig, build_parser
from .output import write

log = logging.getLogger("src.cli")

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_DOMAIN = 2
EXIT_CONVERGENCE = 3


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg = RunConfig.from_args(args)
        result, table = run(cfg)
        write(cfg, result, table)
    except SingularPointError as exc:
        log.error("domain violation: %s", exc)
        return EXIT_DOMAIN
    except ConvergenceError as exc:
        log.error("no convergence: %s", exc)
        return EXIT_CONVERGENCE
    except (ValueError, KeyError, OSError) as exc:
        log.error("bad input: %s", exc)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
