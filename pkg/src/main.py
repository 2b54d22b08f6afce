# src/main.py
import argparse
import logging
import sys
from typing import Callable, Dict, List, Optional

from .config import get_settings
from .constants import ExitCodes
from .exceptions import (
    FluidGameError,
    NotStabilizableError,
    StrategyUnavailableError,
    UndefinedConditionError,
)
from .models import Verdict
from .services import GameService, apply_overrides, load_scenario

logger = logging.getLogger("fluidgame")

CONDITION_ERRORS = (StrategyUnavailableError, UndefinedConditionError, NotStabilizableError)
PASSING_VERDICTS = {Verdict.VERIFIED, Verdict.NOT_APPLICABLE}

class UsageError(Exception):
    pass

class FluidGameArgumentParser(argparse.ArgumentParser):
    """Usage errors exit with the I/O code instead of argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")

def _fmt(value: Optional[float]) -> str:
    return "n/a" if value is None else f"{value:.6g}"

def cmd_check(service: GameService) -> int:
    """Report epsilon, both solvability conditions and the theorem bounds."""
    report = service.check()
    print(f"epsilon          {_fmt(report.epsilon)}")
    print(f"condition 1      {'holds' if report.condition1 else 'fails'}")
    if report.condition2 is None:
        print("condition 2      undefined (epsilon <= 0)")
    else:
        print(f"condition 2      {'holds' if report.condition2 else 'fails'}")
    print(f"t2_star          {_fmt(report.t2_star)}")
    print(f"queue_growth     {_fmt(report.queue_growth)}")
    print(f"q1_peak_bound    {_fmt(report.q1_peak_bound)}")
    print(f"t1_bound         {_fmt(report.t1_bound)}")
    print(f"classic_drain    {_fmt(report.classic_draining_time)}")
    return ExitCodes.OK if report.both_hold else ExitCodes.CONDITION_FAILURE

def cmd_simulate(service: GameService) -> int:
    """Play the scenario, write the trajectory CSV and the verification report."""
    outcome = service.simulate()
    files = service.export_simulation(outcome)
    report = outcome.report
    term = outcome.trajectory.termination
    print(f"termination      {term.kind.value} at t={_fmt(term.t)}")
    print(f"samples          {len(outcome.trajectory)}")
    print(f"t2 observed      {_fmt(report.t2_observed)} (bound {_fmt(report.t2_star)})")
    print(f"q1 peak          {_fmt(report.q1_peak_observed)} (bound {_fmt(report.q1_peak_bound)})")
    print(f"t1 observed      {_fmt(report.t1_observed)} (bound {_fmt(report.t1_bound)})")
    print(f"verdict          {report.verdict.value}")
    for note in report.notes:
        print(f"  - {note}")
    for name, path in files.items():
        print(f"{name:<16} {path}")
    return ExitCodes.OK if report.verdict in PASSING_VERDICTS else ExitCodes.CONDITION_FAILURE

def cmd_solve(service: GameService) -> int:
    """Search the minimal capture time."""
    result = service.solve()
    if result.capture_time is None:
        print(f"capture time     none within horizon {_fmt(result.horizon)}")
    else:
        print(f"capture time     {_fmt(result.capture_time)}")
    print(f"directions       {result.n_dirs}")
    print(f"quadrature       {result.n_quad}")
    print(f"tol_T            {_fmt(result.tol_T)}")
    print(f"monotone         {'yes' if result.monotone else 'no'}")
    print(f"evaluations      {result.evaluations}")
    return ExitCodes.OK

def cmd_compare(service: GameService) -> int:
    """Compare the stochastic queue with its fluid limit."""
    outcome = service.compare()
    files = service.export_comparison(outcome)
    summary = outcome.summary
    print(f"runs             {summary.n_runs}")
    print(f"sup |E N(t)|     {_fmt(summary.bounded_mean_estimate)}")
    print(f"var N slope      {_fmt(summary.variance_slope)} (R^2 {_fmt(summary.variance_r2)}, {summary.fit_points} points)")
    print(f"max |z|          {_fmt(summary.max_abs_z)}")
    for name, path in files.items():
        print(f"{name:<16} {path}")
    return ExitCodes.OK

COMMANDS: Dict[str, Callable[[GameService], int]] = {
    "check": cmd_check,
    "simulate": cmd_simulate,
    "solve": cmd_solve,
    "compare": cmd_compare,
}

def build_parser() -> argparse.ArgumentParser:
    parser = FluidGameArgumentParser(
        prog="fluidgame",
        description="Conflict-controlled fluid queue game: simulation, verification and solvability analysis.",
    )
    parser.add_argument("--verbose", action="store_true", help="Log at DEBUG level.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=FluidGameArgumentParser)
    for name, handler in COMMANDS.items():
        cmd = sub.add_parser(name, help=(handler.__doc__ or name))
        cmd.add_argument("scenario", help="Path to a JSON scenario file.")
        cmd.add_argument("--out", help="Output directory (overrides output.dir).")
        cmd.add_argument("--svg", action="store_true", help="Render an SVG chart of q1(t), q2(t).")
        cmd.add_argument("--seed", type=int, help="Base seed for stochastic runs and random attackers.")
        cmd.add_argument("--dt", type=float, help="Sampling period (overrides simulation.dt).")
    return parser

def main(argv: Optional[List[str]] = None) -> int:
    settings = get_settings()
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(e, file=sys.stderr)
        return ExitCodes.USAGE_OR_IO

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else settings.LOG_LEVEL,
        format=settings.LOG_FORMAT,
        force=True,
    )

    try:
        scenario = load_scenario(args.scenario)
        scenario = apply_overrides(scenario, out=args.out, svg=args.svg, seed=args.seed, dt=args.dt)
        return COMMANDS[args.command](GameService(scenario))
    except CONDITION_ERRORS as e:
        logger.error(f"{args.command} refused: {e}")
        print(f"error: {e}", file=sys.stderr)
        return ExitCodes.CONDITION_FAILURE
    except (FluidGameError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return ExitCodes.USAGE_OR_IO

if __name__ == "__main__":
    sys.exit(main())
