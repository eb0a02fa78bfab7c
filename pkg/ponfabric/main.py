"""
Command-line entry point.

    ponfabric topo CONFIG
    ponfabric solve CONFIG TABLE_OUT
    ponfabric minslots CONFIG TABLE_OUT
    ponfabric validate CONFIG TABLE
    ponfabric simulate CONFIG TABLE TRAFFIC FRAMES METRICS_OUT

Exit codes: 0 success, 1 usage/parse/config error, 2 validation failure,
3 search budget exhausted.
"""
import argparse
import logging
import sys
from typing import List, Optional

from ponfabric import __version__
from ponfabric.config import FabricConfig, load_config
from ponfabric.models.assignment import Instance, SolveStatus
from ponfabric.rwta_service import build_demands, check_table, slot_lower_bound
from ponfabric.solver_service import solver_service
from ponfabric.table_controller import format_value, table_controller
from ponfabric.tdm_simulator import tdm_simulator
from ponfabric.topology_service import all_to_all_check, build_topology, required_wavelengths
from ponfabric.utils.errors import BudgetExhausted, FabricError, InvalidTable
from ponfabric.utils.logger import logger, setup_logger

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVALID = 2
EXIT_BUDGET = 3


class _ArgumentParser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; this CLI reserves 2 for invalid tables."""

    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load(path: str):
    config = load_config(path)
    topology = build_topology(config.topology_config)
    demands = build_demands(
        topology,
        include_intra_cell=config.demands.include_intra_cell,
        include_olt_pairs=config.demands.include_olt_pairs,
    )
    return config, topology, demands


def _table_flags(config: FabricConfig) -> dict:
    """Validation flags a config implies for its tables."""
    return {
        "strict_transceivers": config.solver.strict_transceivers,
        "dedicated_wavelengths": config.solver.kind == "wdm",
    }


def _read_table(path: str, config: FabricConfig):
    table = table_controller.read_table(path)
    expected = config.topology_config.fingerprint()
    if table.fingerprint and table.fingerprint != expected:
        logger.warning(f"{path} was solved for config {table.fingerprint}, not {expected}")
    return table


def _print_report(report) -> None:
    for violation in report.violations:
        print(f"{violation.code} {violation.message}")
    print(f"verdict={report.verdict} objective={report.objective}")


def cmd_topo(args: argparse.Namespace) -> int:
    config, topology, _ = _load(args.config)
    wavelengths = required_wavelengths(topology.n, config.demands.include_intra_cell)

    print(f"N={topology.n} W={wavelengths} T={topology.time_slots} planes={topology.fabric.planes}")
    for attachment in topology.attachments:
        print(f"attachment {attachment.index} {attachment.label}: {' '.join(attachment.hosted_entities)}")
    for entity in topology.entities:
        print(f"entity {entity.name} {entity.kind.value} attachment={topology.attachment_of(entity.name)}")

    report = all_to_all_check(topology)
    if report.success:
        print("all-to-all: OK")
        return EXIT_OK
    print(f"all-to-all: FAILED ({len(report.failures)} attachment pairs)")
    for failure in report.failures:
        print(f"  {failure}")
    return EXIT_INVALID


def cmd_solve(args: argparse.Namespace) -> int:
    config, topology, demands = _load(args.config)
    instance = Instance(
        topology=topology,
        demands=demands,
        strict_transceivers=config.solver.strict_transceivers,
    )
    outcome = solver_service.solve(
        instance,
        kind=config.solver.kind,
        seed=config.solver.seed,
        node_budget=config.solver.node_budget,
    )
    table_controller.write_table(args.output, outcome.table)

    if outcome.status is SolveStatus.BASELINE:
        served = len({record.pair for record in outcome.table.assignments})
        print(f"objective={outcome.objective} served={served}/{len(demands)} status={outcome.status.value}")
    else:
        print(f"objective={outcome.objective} max={instance.max_objective} status={outcome.status.value}")
    return EXIT_BUDGET if outcome.status is SolveStatus.BOUND_REACHED else EXIT_OK


def cmd_minslots(args: argparse.Namespace) -> int:
    config, topology, demands = _load(args.config)
    outcome = solver_service.min_slots(
        topology,
        demands,
        node_budget=config.solver.node_budget,
        strict_transceivers=config.solver.strict_transceivers,
    )
    table_controller.write_table(args.output, outcome.table)

    print(
        f"lower_bound={slot_lower_bound(topology, demands, config.solver.strict_transceivers)} "
        f"time_slots={outcome.time_slots} objective={outcome.objective}"
    )
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    config, topology, demands = _load(args.config)
    table = _read_table(args.table, config)
    report = check_table(topology, demands, table, **_table_flags(config))
    _print_report(report)
    return EXIT_OK if report.valid else EXIT_INVALID


def cmd_simulate(args: argparse.Namespace) -> int:
    config, topology, demands = _load(args.config)
    traffic = table_controller.parse_traffic(args.traffic, seed=config.simulation.seed)
    table = _read_table(args.table, config)

    metrics = tdm_simulator.simulate(topology, table, traffic, args.frames, demands=demands, **_table_flags(config))
    table_controller.write_metrics(args.output, metrics)

    aggregate = tdm_simulator.utilization_summary(metrics)[-1].value
    print(
        f"frames={metrics.frames} offered={metrics.offered} delivered={metrics.delivered} "
        f"queued={metrics.queued} utilization={format_value(aggregate)}"
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="ponfabric",
        description="Wavelength and time-slot assignment for PON data centers with cascaded AWGRs",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    parser.add_argument("--log-file", help="also write logs to this file")
    commands = parser.add_subparsers(dest="command", required=True)

    topo = commands.add_parser("topo", help="print the topology and check all-to-all reachability")
    topo.add_argument("config")
    topo.set_defaults(handler=cmd_topo)

    solve = commands.add_parser("solve", help="compute an assignment table")
    solve.add_argument("config")
    solve.add_argument("output", help="table file to write")
    solve.set_defaults(handler=cmd_solve)

    minslots = commands.add_parser("minslots", help="find the smallest frame giving full coverage")
    minslots.add_argument("config")
    minslots.add_argument("output", help="witness table file to write")
    minslots.set_defaults(handler=cmd_minslots)

    validate = commands.add_parser("validate", help="check an assignment table")
    validate.add_argument("config")
    validate.add_argument("table")
    validate.set_defaults(handler=cmd_validate)

    simulate = commands.add_parser("simulate", help="replay a table under synthetic traffic")
    simulate.add_argument("config")
    simulate.add_argument("table")
    simulate.add_argument("traffic", help="uniform:<k> | bernoulli:<p> | hotspot:<entity>:<mult>")
    simulate.add_argument("frames", type=int)
    simulate.add_argument("output", help="metrics file to write")
    simulate.set_defaults(handler=cmd_simulate)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logger(level=logging.DEBUG if args.verbose else logging.WARNING, log_file=args.log_file)

    try:
        return args.handler(args)
    except InvalidTable as e:
        _print_report(e.report)
        logger.error(f"{args.command}: {e}")
        return EXIT_INVALID
    except BudgetExhausted as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except FabricError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
