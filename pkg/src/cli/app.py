"""Argument parsing, logging setup and exit codes of the `wave-isp` command."""
from __future__ import annotations

import argparse
import asyncio
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from ..config import config
from ..errors import (
    CFLViolationError,
    ConfigError,
    DataError,
    GridMismatchError,
    SolverBlowUpError,
    StagnationError,
    ToleranceError,
)
from .commands import COMMANDS, CommandArgument, CommandExecutor
from .run_config import load_run_config

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_TOLERANCE = 3
EXIT_SOLVER = 4


def percent_list(text: str) -> List[float]:
    """'1,3,5' -> [1.0, 3.0, 5.0] (noise levels in percent)."""
    try:
        values = [float(item) for item in text.split(",") if item.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a list of numbers: {text!r}") from exc
    if not values or any(v < 0 for v in values):
        raise argparse.ArgumentTypeError(f"noise levels must be >= 0, got {text!r}")
    return values


def _add_argument(parser: argparse.ArgumentParser, arg: CommandArgument) -> None:
    if arg.kind == "flag":
        parser.add_argument(f"--{arg.name.replace('_', '-')}", action="store_true", help=arg.help)
        return
    kwargs: Dict[str, Any] = {"help": arg.help, "type": int if arg.kind == "int" else Path}
    if arg.choices:
        kwargs["choices"] = arg.choices
    if arg.positional:
        parser.add_argument(arg.name, **kwargs)
    else:
        parser.add_argument(f"--{arg.name}", required=arg.required, **kwargs)


def _add_shared(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("overrides")
    group.add_argument("--nx", type=int, help="cell count")
    group.add_argument("--cfl", type=float, help="target courant number dt/dx")
    group.add_argument("--eps", type=float, help="Tikhonov parameter")
    group.add_argument("--stop-tol", type=float, help="stop once J_eps falls below this")
    group.add_argument("--max-iter", type=int, help="iteration cap")
    group.add_argument("--noise", type=percent_list, help="noise levels in percent, e.g. 1,3,5")
    group.add_argument("--seed", type=int, help="noise / random-direction seed")
    group.add_argument("--out", type=Path, help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wave-isp",
        description="Source reconstruction for the wave equation with kinetic boundary conditions.",
    )
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG logging"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for spec in COMMANDS:
        command = sub.add_parser(spec.name, help=spec.description, description=spec.description)
        for arg in spec.arguments:
            _add_argument(command, arg)
        _add_shared(command)
    return parser


def _overrides(args: argparse.Namespace) -> Dict[str, Dict[str, Any]]:
    noise = args.noise[0] if args.noise and len(args.noise) == 1 else None
    return {
        "grid": {"nx": args.nx, "cfl": args.cfl},
        "optimizer": {"eps": args.eps, "stop_tol": args.stop_tol, "max_iter": args.max_iter},
        "data": {"seed": args.seed, "noise": noise},
        "check": {"seed": args.seed},
        "output": {"dir": args.out},
    }


def _configure_logging(verbose: int) -> None:
    level = {0: config.log_level.upper(), 1: "INFO"}.get(verbose, "DEBUG")
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one command; return the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (None, 0) else EXIT_USAGE
    _configure_logging(args.verbose)

    try:
        run_config = load_run_config(args.config).with_overrides(_overrides(args))
        paths = asyncio.run(CommandExecutor(run_config).execute(args.command, vars(args)))
    except (ConfigError, DataError, GridMismatchError, OSError) as exc:
        print(f"wave-isp: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ToleranceError as exc:
        print(f"wave-isp: tolerance violated: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE
    except (CFLViolationError, SolverBlowUpError, StagnationError) as exc:
        print(f"wave-isp: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER

    logger.info("%s: wrote %d files", args.command, len(paths))
    return EXIT_OK
