"""
Command line entry point.

    python -m src instance.yaml --mode robust --delta 1e-6 --trace run.csv
    python -m src --seed 7 --rows 4 --cols 10 --mode fast
"""
import argparse
import logging
import sys
from contextlib import ExitStack
from dataclasses import replace
from typing import List, Optional

import numpy as np

from . import get_version
from .config import MODES, SolverSettings, configure_logging, load_config
from .errors import IpmError, MissingParameters
from .instance_io import load_instance
from .instances import random_instance
from .lp import LpParameters
from .solver import InteriorPointSolver
from .trace import CsvTraceSink

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ipm-solve",
        description="Solve min c^T x s.t. A x = b, x >= 0 by interior point path following.",
    )
    parser.add_argument("instance", nargs="?", help="YAML instance file (omit with --seed)")
    parser.add_argument("--mode", choices=MODES, help="path following variant")
    parser.add_argument("--delta", type=float, help="accuracy; the objective is within delta L R of optimal")
    parser.add_argument("--inner-radius", type=float, help="inner radius r")
    parser.add_argument("--outer-radius", type=float, help="outer radius R")
    parser.add_argument("--lipschitz", type=float, help="Lipschitz constant L (>= ||c||_2)")
    parser.add_argument("--eta", type=float, help="vertex gap, needed by --round-to-vertex")
    parser.add_argument("--round-to-vertex", action="store_true", help="round the result to the optimal vertex")
    parser.add_argument("--integral", action="store_true", help="snap the rounded vertex to integer coordinates")
    parser.add_argument("--trace", help="write a per-iteration CSV trace to this path")
    parser.add_argument("--ell-star", type=int, help="snapshot period exponent of the fast mode")
    parser.add_argument("--seed", type=int, help="solve a generated random instance")
    parser.add_argument("--rows", type=int, default=4, help="constraints of the generated instance")
    parser.add_argument("--cols", type=int, default=10, help="variables of the generated instance")
    parser.add_argument("--config", default="config.yaml", help="configuration file")
    parser.add_argument("--log-level", help="logging level (overrides the config file)")
    parser.add_argument("--version", action="version", version=f"%(prog)s {get_version()}")
    return parser


def _resolve_params(lp, params: Optional[LpParameters], args) -> LpParameters:
    r = args.inner_radius if args.inner_radius is not None else (params.inner_radius if params else None)
    R = args.outer_radius if args.outer_radius is not None else (params.outer_radius if params else None)
    if r is None or R is None:
        raise MissingParameters("instance has no params section; pass --inner-radius and --outer-radius")
    lipschitz = args.lipschitz
    if lipschitz is None and params is not None:
        lipschitz = params.lipschitz
    return LpParameters.for_instance(lp, r, R, lipschitz)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.instance is None and args.seed is None:
        parser.error("an instance file or --seed is required")

    try:
        config = load_config(args.config)
        configure_logging(args.log_level or config["logging"]["level"], config["logging"]["format"])
        settings = SolverSettings.from_config(config)
        if args.mode:
            settings = replace(settings, mode=args.mode)

        if args.instance is not None:
            lp, params = load_instance(args.instance)
        else:
            lp, params = random_instance(args.rows, args.cols, args.seed)
        params = _resolve_params(lp, params, args)

        print(f"Instance: {lp.d} constraints, {lp.n} variables")
        print(f"Parameters: r={params.inner_radius:.6g}, R={params.outer_radius:.6g}, L={params.lipschitz:.6g}")

        solver = InteriorPointSolver(config_path=None, settings=settings)
        with ExitStack() as stack:
            sink = stack.enter_context(CsvTraceSink(args.trace)) if args.trace else None
            report = solver.solve(
                lp,
                params,
                delta=args.delta,
                trace=sink,
                ell_star=args.ell_star,
                eta=args.eta,
                round_vertex=args.round_to_vertex,
                integral=args.integral,
            )
    except IpmError as e:
        print(f"✗ {type(e).__name__}: {e}", file=sys.stderr)
        return e.exit_code

    print(f"✓ Solved in {report.iterations} iterations ({report.mode} mode, {report.wall_time:.2f}s)")
    print(f"  Objective: {report.objective:.12g}")
    print(f"  Gap certificate: {report.gap_certificate:.3e}")
    if report.fallback_count:
        print(f"  Dense fallbacks: {report.fallback_count}")
    with np.printoptions(precision=10, suppress=True):
        print(f"  x = {report.x}")
        if report.rounded_x is not None:
            print(f"✓ Optimal vertex: {report.rounded_x}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
