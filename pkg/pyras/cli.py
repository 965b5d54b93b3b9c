"""Command line front end.

Subcommands: simulate, train, evaluate, oracle-check and sweep. Results
are written as CSV files to --out-dir. On failure the command exits with a
non-zero code and prints one `error: <Class>: <message>` line to stderr.
Argument errors exit with 2 as usual for argparse; a failed oracle check
exits with 3.
"""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Final

from .const import EVALUATION_EPISODES, LOG_LEVEL_MAP, SWEEP_MOVEMENT_COSTS
from .exception_classes import RasError
from .pyras import POLICY_NAMES, PyRas
from .reporting import emit_metrics, write_curves
from .rl.trainer import MODE_PARALLEL, MODE_SINGLE

_LOGGER: Final = logging.getLogger(__name__)

ORACLE_FILE: Final[str] = "oracle_check.csv"
DEFAULT_CHECKPOINT: Final[str] = "agents.npz"
EXIT_OK: Final[int] = 0
EXIT_ERROR: Final[int] = 1
EXIT_ORACLE_FAILED: Final[int] = 3
EXIT_CODES: Final[str] = (
    "exit codes: 0 success, 1 error, 2 invalid arguments, 3 oracle check failed"
)


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(item) for item in text.split(","))
    except ValueError as err:
        raise argparse.ArgumentTypeError(
            f"expected comma separated integers, got '{text}'"
        ) from err


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subparser per command."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="experiment configuration file")
    common.add_argument("--seed", type=int, help="base seed; episode i uses seed + i")
    common.add_argument("--out-dir", type=Path, default=Path("."))
    common.add_argument(
        "--log-level", default="WARNING", choices=sorted(LOG_LEVEL_MAP), type=str.upper
    )

    with_policy = argparse.ArgumentParser(add_help=False)
    with_policy.add_argument("--policy", choices=POLICY_NAMES, default="uniform")
    with_policy.add_argument("--checkpoint", type=Path, help="agent checkpoint")

    parser = argparse.ArgumentParser(
        prog="pyras",
        description="Datacenter capacity reservation simulator",
        epilog=EXIT_CODES,
    )
    commands = parser.add_subparsers(dest="command", required=True)

    simulate = commands.add_parser(
        "simulate", parents=[common, with_policy], help="run one episode"
    )
    simulate.add_argument("--trace", type=Path, help="replay a trace file")

    train = commands.add_parser("train", parents=[common], help="train agents")
    train.add_argument(
        "--mode", choices=(MODE_SINGLE, MODE_PARALLEL), default=MODE_PARALLEL
    )
    train.add_argument("--episodes", type=int, help="episodes per server type")
    train.add_argument(
        "--checkpoint", type=Path, help=f"output file (default {DEFAULT_CHECKPOINT})"
    )

    evaluate = commands.add_parser(
        "evaluate", parents=[common, with_policy], help="evaluate over N episodes"
    )
    evaluate.add_argument("--episodes", type=int, default=EVALUATION_EPISODES)

    oracle = commands.add_parser(
        "oracle-check",
        parents=[common, with_policy],
        help="compare every slot with the exact optimum on a tiny region",
        epilog=EXIT_CODES,
    )
    oracle.add_argument("--episodes", type=int, default=1)

    sweep = commands.add_parser(
        "sweep", parents=[common, with_policy], help="movement cost sweep"
    )
    sweep.add_argument("--episodes", type=int, help="episodes per movement cost")
    sweep.add_argument(
        "--values",
        type=_int_list,
        default=SWEEP_MOVEMENT_COSTS,
        help="comma separated movement costs",
    )
    return parser


def _policy(ras: PyRas, args: argparse.Namespace):
    seed = ras.config.episode.seed if args.seed is None else args.seed
    return ras.build_policy(args.policy, args.checkpoint, seed)


def _simulate(ras: PyRas, args: argparse.Namespace) -> int:
    report = ras.simulate(_policy(ras, args), args.seed, args.trace)
    emit_metrics([report], args.out_dir)
    print(f"total_utility={report.total_utility!r}")
    return EXIT_OK


def _train(ras: PyRas, args: argparse.Namespace) -> int:
    args.out_dir.mkdir(parents=True, exist_ok=True)
    checkpoint = args.checkpoint or args.out_dir / DEFAULT_CHECKPOINT
    result = ras.train(args.mode, args.episodes, args.seed, checkpoint)
    write_curves(result.curve_frame(), args.out_dir)
    print(f"checkpoint={checkpoint}")
    return EXIT_OK


def _evaluate(ras: PyRas, args: argparse.Namespace) -> int:
    result = ras.evaluate(_policy(ras, args), args.episodes, args.seed)
    emit_metrics(result, args.out_dir)
    print(f"median_total_utility={result.median!r}")
    return EXIT_OK


def _oracle_check(ras: PyRas, args: argparse.Namespace) -> int:
    frame = ras.oracle_check(_policy(ras, args), args.episodes, args.seed)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    frame.to_csv(args.out_dir / ORACLE_FILE, index=False, lineterminator="\n")
    failures = int((~frame["dominated"]).sum()) if len(frame) else 0
    print(f"slots={len(frame)} oracle_failures={failures}")
    if failures:
        print(
            f"error: OracleCheckFailed: oracle above the pipeline on {failures} "
            "slot(s)",
            file=sys.stderr,
        )
        return EXIT_ORACLE_FAILED
    return EXIT_OK


def _sweep(ras: PyRas, args: argparse.Namespace) -> int:
    report = ras.sweep(_policy(ras, args), args.values, args.episodes, args.seed)
    report.write(args.out_dir)
    trend = "non-increasing" if report.movements_non_increasing() else "mixed"
    print(f"servers_moved_trend={trend}")
    return EXIT_OK


_COMMANDS: Final = {
    "simulate": _simulate,
    "train": _train,
    "evaluate": _evaluate,
    "oracle-check": _oracle_check,
    "sweep": _sweep,
}


def main(argv: Sequence[str] | None = None) -> int:
    """Run the command line and return its exit code."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=LOG_LEVEL_MAP[args.log_level],
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        ras = PyRas.from_file(args.config) if args.config else PyRas()
        ras.set_log_level(args.log_level)
        return _COMMANDS[args.command](ras, args)
    except (RasError, ValueError, OSError) as err:
        _LOGGER.debug("Command %s failed", args.command, exc_info=True)
        print(f"error: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
