import argparse
import logging
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from twocenter.config import settings
from twocenter.errors import ConfigurationError, InsufficientPoints, NumericalError
from twocenter.models import OutputFormat, PhysicalConfig, QuantumNumbers, RunConfig, RunMode
from twocenter.services import report_service
from twocenter.services.run_service import run_service
from twocenter.utils import helpers
from twocenter.utils.validators import check_output_path, check_r_range, check_report_inputs, parse_on_off

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_SOLVER = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twocenter", description=settings.APP_NAME)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Energy curve and separation constants over an R grid")
    run.add_argument("--Z", type=float, required=True, help="Charge of each center")
    run.add_argument("--omega", type=float, required=True, help="Oscillator strength")
    run.add_argument("--n", type=int, default=0, help="Radial node count")
    run.add_argument("--q", type=int, default=0, help="Angular node count")
    run.add_argument("--m", type=int, default=0, help="|magnetic quantum number|")
    run.add_argument("--r-min", type=float, required=True)
    run.add_argument("--r-max", type=float, required=True)
    run.add_argument("--r-steps", type=int, default=1)
    run.add_argument("--mode", choices=[m.value for m in RunMode], default=RunMode.BOTH.value)
    run.add_argument("--order", type=int, choices=[0, 1, 2], default=0, help="Energy expansion order")
    run.add_argument("--out", type=Path, default=None, help="Output file (default: OUTPUT_DIR/<instance>.<format>)")
    run.add_argument("--format", choices=[f.value for f in OutputFormat], default=OutputFormat.CSV.value)
    run.add_argument("--literal-formulas", default="on" if settings.LITERAL_FORMULAS else "off",
                     help="on: printed formulas, off: corrected readings")
    run.add_argument("--tol", type=float, default=settings.MATCH_TOL, help="Matching tolerance")
    run.add_argument("--no-continuation", action="store_true", help="Solve R-points independently in worker processes")
    run.add_argument("--fixtures", type=Path, default=None, help="Oracle fixture file (oracle mode)")
    run.add_argument("--workers", type=int, default=settings.MAX_WORKERS, help="Worker processes for independent R-points")

    rep = sub.add_parser("report", help="Residual-order summary of run outputs")
    rep.add_argument("inputs", nargs="+", type=Path)
    return parser


def run_config_from_args(args: argparse.Namespace) -> RunConfig:
    check_r_range(args.r_min, args.r_max, args.r_steps)
    fmt = OutputFormat(args.format)
    try:
        config = PhysicalConfig(Z=args.Z, omega=args.omega, R=args.r_min)
        qn = QuantumNumbers(n=args.n, q=args.q, m=args.m)
        rc = RunConfig(
            mode=RunMode(args.mode),
            config=config,
            qn=qn,
            r_min=args.r_min,
            r_max=args.r_max,
            r_steps=args.r_steps,
            order=args.order,
            format=fmt,
            literal=parse_on_off(args.literal_formulas),
            tol=args.tol,
            continuation=not args.no_continuation,
            fixtures=args.fixtures,
            workers=args.workers,
        )
    except ValidationError as e:
        raise ConfigurationError(str(e)) from e

    out = check_output_path(args.out, fmt)
    if out is None:
        out = settings.OUTPUT_DIR / f"{helpers.output_stem(rc)}.{fmt.value}"
    return rc.model_copy(update={"output_path": out})


def cmd_run(args: argparse.Namespace) -> int:
    rc = run_config_from_args(args)
    _, code = run_service.run(rc)
    print(f"Results written to {rc.output_path}")
    return code


def cmd_report(args: argparse.Namespace) -> int:
    paths = check_report_inputs(args.inputs)
    for rep in report_service.report(paths):
        print(report_service.render(rep))
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args)
        return cmd_report(args)
    except (ConfigurationError, InsufficientPoints) as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG
    except NumericalError as e:
        logger.error(f"Solver error: {e}")
        return EXIT_SOLVER
