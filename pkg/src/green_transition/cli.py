"""Command-line entry point: ``green-transition <command> --scenario FILE``."""

import argparse
import sys
from collections.abc import Sequence

from loguru import logger

from .errors import PolicyInfeasibleError, ScenarioError
from .runner import COMMANDS, emit, run
from .scenario import apply_overrides, load_scenario

EXIT_OK = 0
EXIT_SCENARIO = 2
EXIT_INFEASIBLE = 3
EXIT_FAILURE = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="green-transition",
        description="Simulate a two-good economy with endogenous social preferences",
    )
    parser.add_argument("command", choices=COMMANDS, help="analysis to run")
    parser.add_argument("--scenario", required=True, help="path to the scenario JSON file")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--out", help="write output here instead of stdout")
    parser.add_argument("--tau", type=float, help="override the scenario with a constant tax")
    parser.add_argument(
        "--seed-state",
        choices=("brown-sse", "pristine"),
        help="override how the previous period's levels are seeded",
    )
    parser.add_argument("--verbose", action="store_true", help="log solver progress")
    return parser


def configure_logging(verbose: bool) -> None:
    logger.remove()
    logger.add(sys.stderr, level="DEBUG" if verbose else "WARNING")


def _write(payload: bytes, out: str | None) -> None:
    if out is None:
        sys.stdout.buffer.write(payload)
        sys.stdout.flush()
        return
    with open(out, "wb") as f:
        f.write(payload)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)

    try:
        doc = load_scenario(args.scenario)
        doc = apply_overrides(doc, tau=args.tau, seed_state=args.seed_state)
    except ScenarioError as e:
        for problem in e.errors:
            logger.error(f"scenario: {problem}")
        return EXIT_SCENARIO
    except OSError as e:
        logger.error(f"cannot read scenario {args.scenario}: {e}")
        return EXIT_SCENARIO

    try:
        result = run(args.command, doc)
        _write(emit(result, args.format), args.out)
    except PolicyInfeasibleError as e:
        logger.error(f"{e} (stalled at j={e.stalled_at})")
        return EXIT_INFEASIBLE
    except Exception as e:
        logger.exception(f"{args.command} failed: {e}")
        return EXIT_FAILURE

    return EXIT_INFEASIBLE if result.infeasible else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
