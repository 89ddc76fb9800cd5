"""Entry point for wplab — run with `python -m wplab` or `wplab`."""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .errors import LabError


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--radius", type=float, default=None, help="Orbit-ball truncation radius R.")
    parser.add_argument(
        "--quad-budget",
        type=int,
        default=None,
        metavar="N",
        help="Gauss–Legendre nodes per panel for the curvature quadratures.",
    )
    parser.add_argument("--seed", type=int, default=None, help="Seed for any randomized sampling.")
    parser.add_argument("--out", default=None, metavar="PATH", help="Write results to PATH.")
    parser.add_argument(
        "--json",
        dest="json_output",
        action="store_true",
        help="Emit JSON on stdout instead of Rich output.",
    )


def build_parser() -> argparse.ArgumentParser:
    from .curvature.experiments import EXAMPLES
    from .cli.kernel import KERNELS

    parser = argparse.ArgumentParser(
        prog="wplab",
        description="wplab — hyperbolic surfaces, orbit sums and Weil–Petersson curvature rates.",
    )
    parser.add_argument("-V", "--version", action="version", version=f"wplab {__version__}")
    parser.add_argument(
        "--init-config",
        action="store_true",
        help="Create a default config file and exit.",
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("build", help="Build a surface group from a spec and report diagnostics.")
    p.add_argument("spec", help="SurfaceSpec JSON file.")
    _common(p)

    p = sub.add_parser("kernel", help="Evaluate the K and G orbit sums between two points.")
    p.add_argument("group", help="Group document written by `wplab build`.")
    p.add_argument("--p", dest="p", default="0,1", metavar="X,Y", help="First point (default 0,1).")
    p.add_argument("--q", dest="q", default="0,1", metavar="X,Y", help="Second point (default 0,1).")
    p.add_argument(
        "--kernel",
        choices=[*KERNELS, "both"],
        default="both",
        help="Which sums to evaluate (default both).",
    )
    p.add_argument("--symmetry", action="store_true", help="Also check G(p, q) = G(q, p).")
    _common(p)

    p = sub.add_parser("checks", help="Run invariant checks on a group document.")
    p.add_argument("group", help="Group document written by `wplab build`.")
    _common(p)

    p = sub.add_parser("experiment", help="Run a curvature scaling experiment.")
    p.add_argument("kind", choices=list(EXAMPLES), help="Which example to run.")
    p.add_argument("--grid", default=None, metavar="L1,L2,...", help="Short lengths to sweep.")
    _common(p)
    return parser


def main() -> None:
    parser = build_parser()
    args = parser.parse_args()

    if args.init_config:
        from .config import init_config
        init_config()
        return

    if not args.command:
        parser.print_help()
        sys.exit(2)

    from .config import LabConfig, load_config

    config = load_config()
    # CLI flags override the config file (clamped like file values)
    if args.radius is not None:
        if not args.radius > 0.0:
            print("wplab: --radius must be positive", file=sys.stderr)
            sys.exit(2)
        config.radius = max(LabConfig.MIN_RADIUS, min(LabConfig.MAX_RADIUS, args.radius))
    if args.quad_budget is not None:
        config.quad_budget = max(LabConfig.MIN_BUDGET, min(LabConfig.MAX_BUDGET, args.quad_budget))
    if args.seed is not None:
        config.seed = args.seed

    try:
        code = _dispatch(args, config)
    except LabError as e:
        print(f"wplab: {e}", file=sys.stderr)
        sys.exit(e.exit_code)
    if code:
        sys.exit(code)


def _dispatch(args: argparse.Namespace, config) -> int:
    if args.command == "build":
        from .cli.build import run_build
        run_build(args.spec, config, out=args.out, json_output=args.json_output)
        return 0

    if args.command == "kernel":
        from .cli.kernel import KERNELS, run_kernel
        kernels = KERNELS if args.kernel == "both" else (args.kernel,)
        ok = run_kernel(
            args.group, args.p, args.q, config, kernels=kernels, symmetry=args.symmetry, out=args.out,
            json_output=args.json_output,
        )
        return 0 if ok else 1

    if args.command == "checks":
        from .cli.checks import run_checks
        return 0 if run_checks(args.group, config, out=args.out, json_output=args.json_output) else 1

    from .cli.experiment import parse_grid, run_experiment
    result = run_experiment(
        args.kind, config, grid=parse_grid(args.grid), out=args.out, json_output=args.json_output
    )
    return 1 if result.error else 0


if __name__ == "__main__":
    main()
