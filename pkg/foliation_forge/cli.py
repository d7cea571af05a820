import argparse
import logging
import sys
from pathlib import Path

from foliation_forge.defaults import DEFAULT_RESULTS_PATH, DEFAULT_SEED
from foliation_forge.errors import ScenarioError
from foliation_forge.handlers import init_logging, verbosity_to_level
from foliation_forge.reports import emit_report
from foliation_forge.scenarios import (
    PIPELINES,
    SCENARIO_KINDS,
    ScenarioConfig,
    describe_outcome,
    load_scenario,
    parse_point,
)

LOGGER = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED_CHECKS = 1
EXIT_BAD_INPUT = 2


def parse_args(argv=None):
    parser = argparse.ArgumentParser(
        prog="foliation-forge", formatter_class=argparse.ArgumentDefaultsHelpFormatter
    )
    parser.add_argument("command", choices=sorted(PIPELINES))
    parser.add_argument("--config", type=Path, help="JSON scenario file; flags override its fields")
    parser.add_argument("--scenario", choices=SCENARIO_KINDS)
    parser.add_argument("--k", help="Conformal factor as polynomial text, e.g. '1 + x1^2'")
    parser.add_argument(
        "--casimirs", nargs=2, metavar="F", help="Two Casimir polynomials (custom-casimirs)"
    )
    parser.add_argument("--radius", help="Half-width of the chart box off the circle direction")
    parser.add_argument("--f", help="Morse function on (x1, x2, x3) for the near-symplectic form")
    parser.add_argument("--h", help="Hamiltonian for a single flow")
    parser.add_argument("--x0", help="Flow start point, comma separated")
    parser.add_argument("--T", type=float, help="Flow time")
    parser.add_argument("--step", type=float, help="RK4 step")
    parser.add_argument("--radii", help="'a..b', 'a..b:n' or a comma separated list")
    parser.add_argument("--grid", help="Node counts per axis, comma separated")
    parser.add_argument("--seed", type=int, help=f"Defaults to {DEFAULT_SEED}")
    parser.add_argument("--threads", type=int)
    parser.add_argument(
        "--output", type=Path, help=f"Defaults to {DEFAULT_RESULTS_PATH}/<command>-<scenario>"
    )
    parser.add_argument("-v", "--verbosity", choices=[0, 1, 2, 3], type=int, default=2)
    return parser.parse_args(argv)


def build_config(args):
    config = load_scenario(args.config) if args.config else None
    if config is None:
        if not args.scenario:
            raise ScenarioError("Give --scenario or a --config file")
        config = ScenarioConfig(scenario=args.scenario)

    flows = None
    if args.h or args.x0:
        if not (args.h and args.x0):
            raise ScenarioError("A flow needs both --h and --x0")
        flow = {"h": args.h, "x0": [str(value) for value in parse_point(args.x0)]}
        if args.T is not None:
            flow["T"] = args.T
        if args.step is not None:
            flow["step"] = args.step
        flows = [flow]
    elif args.step is not None and config.flows:
        flows = [dict(flow, step=args.step) for flow in config.flows]

    grid = None
    if args.grid:
        try:
            grid = dict(config.grid or {}, counts=[int(count) for count in args.grid.split(",")])
        except ValueError as error:
            raise ScenarioError(f"Cannot read grid counts {args.grid!r}") from error

    return config.with_overrides(
        scenario=args.scenario,
        k=args.k,
        casimirs=list(args.casimirs) if args.casimirs else None,
        radius=args.radius,
        f=args.f,
        flows=flows,
        radii=args.radii,
        grid=grid,
        seed=args.seed,
        threads=args.threads,
        output=str(args.output) if args.output else None,
    )


def run(config, command="all"):
    """Run one pipeline and write its artifacts; returns the exit status."""
    if isinstance(config, (str, Path)):
        config = load_scenario(config)
    results = PIPELINES[command](config)
    summary_path = emit_report(results, config.output_path(command))
    outcome = describe_outcome(results)
    if results.passed:
        LOGGER.info(f"{outcome}; summary in {summary_path}")
        return EXIT_OK
    LOGGER.warning(f"{outcome}; summary in {summary_path}")
    for check in results.failed:
        LOGGER.warning(f"  {check.name}: {check.measured}")
    return EXIT_FAILED_CHECKS


def main(argv=None):
    args = parse_args(argv)
    init_logging(verbosity_to_level(args.verbosity))
    try:
        return run(build_config(args), args.command)
    except ValueError as error:
        if args.verbosity > 2:
            raise
        print(f"ERROR: {error}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
