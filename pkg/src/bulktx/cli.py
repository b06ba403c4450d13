"""
Command-line interface for bulktx.

Usage:
    bulktx gen --kind micro --txns 4096 -o workload.csv
    bulktx run workload.csv [--config engine.conf] [--strategy auto] [--format text]
    bulktx calibrate workload.csv -o engine.conf
    bulktx oracle workload.csv [--dump-snapshot oracle.zarr]
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import TYPE_CHECKING, Any

import structlog

from bulktx.exceptions import BulkTxError

if TYPE_CHECKING:
    from collections.abc import Sequence

    from bulktx.bench.workloads import Workbench
    from bulktx.planner.config import EngineConfig
    from bulktx.storage.column_store import ColumnStore
    from bulktx.txmodel.types import TxnSignature

log = structlog.get_logger()

# flag dest -> EngineConfig key
ENGINE_FLAGS = {
    "lanes": "lane_count",
    "warp_size": "warp_size",
    "partition_size": "partition_size",
    "spin_limit": "spin_limit",
    "watchdog": "watchdog_seconds",
    "bits_per_pass": "bits_per_pass",
    "passes": "passes",
    "w0_bar": "w0_bar",
    "c_bar": "c_bar",
    "d_bar": "d_bar",
    "strategy": "strategy",
    "max_size": "max_size",
    "interval": "interval",
    "arrival_rate": "arrival_rate",
}


def _add_verbose(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--verbose",
        "-v",
        action="count",
        default=0,
        help="Log progress to stderr (-vv for debug events)",
    )


def _add_engine_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="Engine configuration file (key = value lines)")
    group = parser.add_argument_group("engine settings", "override the configuration file")
    group.add_argument("--lanes", type=int, help="Number of worker lanes")
    group.add_argument("--warp-size", type=int, help="Lanes per lock-step group")
    group.add_argument("--partition-size", type=int, help="Partition-key values per partition")
    group.add_argument("--spin-limit", type=int, help="Spins before a lane yields")
    group.add_argument("--watchdog", type=float, help="Bound on one bulk, in seconds")
    group.add_argument("--bits-per-pass", type=int, help="Radix digit width of type grouping")
    group.add_argument("--passes", type=int, help="Grouping passes (0 disables grouping)")
    group.add_argument("--w0-bar", type=int, help="0-set size from which K-SET is chosen")
    group.add_argument("--c-bar", type=int, help="Largest cross-partition count for PART")
    group.add_argument("--d-bar", type=int, help="Graph depth from which PART is chosen")
    group.add_argument(
        "--strategy",
        choices=["auto", "tpl", "part", "kset", "tpl-relaxed", "part-relaxed"],
        help="Execution strategy, or auto to choose per bulk",
    )
    group.add_argument("--max-size", type=int, help="Largest bulk")
    group.add_argument("--interval", type=float, help="Batching interval in logical seconds")
    group.add_argument("--arrival-rate", type=float, help="Submissions per logical second")


def create_parser() -> argparse.ArgumentParser:
    """Create the argument parser."""
    parser = argparse.ArgumentParser(
        prog="bulktx",
        description="Bulk transaction execution benchmarks",
    )
    parser.add_argument(
        "--version",
        action="version",
        version=f"%(prog)s {_get_version()}",
    )

    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    # gen command
    gen_parser = subparsers.add_parser("gen", help="Generate a workload file")
    gen_parser.add_argument(
        "--kind",
        choices=["micro", "tpcb_like", "tm1_like", "mixed"],
        default="micro",
        help="Workload family",
    )
    gen_parser.add_argument("--types", type=int, default=8, help="Transaction types T (micro)")
    gen_parser.add_argument("--weight", type=int, default=16, help="Computation weight x")
    gen_parser.add_argument("--alpha", type=float, default=0.0, help="Skew towards tuple 0")
    gen_parser.add_argument("--tuples", type=int, default=1024, help="Tuple count")
    gen_parser.add_argument("--txns", type=int, default=4096, help="Transaction count")
    gen_parser.add_argument("--scale", type=int, default=1, help="Scale factor f")
    gen_parser.add_argument("--seed", type=int, default=0, help="Generator seed")
    gen_parser.add_argument("--abort-rate", type=float, default=0.0, help="Injected abort rate")
    gen_parser.add_argument("--output", "-o", required=True, help="Workload file to write")
    _add_verbose(gen_parser)
    gen_parser.set_defaults(func=gen_command)

    # run command
    run_parser = subparsers.add_parser("run", help="Run a workload and report metrics")
    run_parser.add_argument("workload", help="Generated workload file")
    run_parser.add_argument("--store", help="Initial store file replacing the generated rows")
    _add_engine_flags(run_parser)
    run_parser.add_argument(
        "--format", choices=["csv", "text"], default="text", help="Report format"
    )
    run_parser.add_argument("--output", "-o", help="Report file (default: stdout)")
    run_parser.add_argument("--dump-snapshot", help="Write the final state as a Zarr group")
    run_parser.add_argument(
        "--no-verify",
        action="store_true",
        help="Skip the check against the sequential oracle",
    )
    _add_verbose(run_parser)
    run_parser.set_defaults(func=run_command)

    # calibrate command
    cal_parser = subparsers.add_parser(
        "calibrate", help="Grid-search grouping passes and partition size"
    )
    cal_parser.add_argument("workload", help="Generated workload file")
    _add_engine_flags(cal_parser)
    cal_parser.add_argument(
        "--samples", type=int, default=4, help="Number of contiguous workload samples"
    )
    cal_parser.add_argument(
        "--pass-grid", type=int, nargs="+", default=[0, 1, 2, 3, 4], help="Candidate passes"
    )
    cal_parser.add_argument(
        "--partition-grid",
        type=int,
        nargs="+",
        default=[16, 32, 64, 128, 256, 512],
        help="Candidate partition sizes",
    )
    cal_parser.add_argument("--output", "-o", required=True, help="Configuration file to write")
    _add_verbose(cal_parser)
    cal_parser.set_defaults(func=calibrate_command)

    # oracle command
    oracle_parser = subparsers.add_parser(
        "oracle", help="Execute a workload sequentially and print table checksums"
    )
    oracle_parser.add_argument("workload", help="Generated workload file")
    oracle_parser.add_argument("--store", help="Initial store file replacing the generated rows")
    oracle_parser.add_argument("--dump-snapshot", help="Write the final state as a Zarr group")
    _add_verbose(oracle_parser)
    oracle_parser.set_defaults(func=oracle_command)

    return parser


def _get_version() -> str:
    """Get the package version."""
    try:
        from bulktx._version import version

        return version
    except ImportError:
        return "unknown"


def configure_logging(verbosity: int = 0) -> None:
    """Send structlog events to stderr; warnings only unless ``verbosity`` is raised."""
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity, logging.DEBUG)
    structlog.configure(
        wrapper_class=structlog.make_filtering_bound_logger(level),
        logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
    )


def _engine_config(args: argparse.Namespace) -> EngineConfig:
    from bulktx.planner.config import EngineConfig, load_config

    config = load_config(args.config) if args.config else EngineConfig()
    overrides: dict[str, Any] = {key: getattr(args, dest) for dest, key in ENGINE_FLAGS.items()}
    return config.with_overrides(overrides)


def _load(args: argparse.Namespace) -> tuple[Workbench, list[TxnSignature]]:
    from bulktx.bench.workloads import load_workload

    bench, txns = load_workload(args.workload)
    if getattr(args, "store", None):
        bench.store = _replacement_store(bench.store, args.store)
    return bench, txns


def _replacement_store(generated: ColumnStore, path: str) -> ColumnStore:
    from bulktx.storage.schema_io import load_store

    store = load_store(path)
    if store.schemas != generated.schemas:
        raise BulkTxError(f"store file {path} does not match the workload's schema")
    return store


def _print_checksums(store: ColumnStore) -> None:
    from bulktx.storage.snapshot import snapshot

    snap = snapshot(store)
    for index, table in enumerate(store.tables):
        print(f"{table.name}: {snap.checksum(index)} ({snap.tables[index].row_count} rows)")


def gen_command(args: argparse.Namespace) -> int:
    """Run the gen command."""
    from pydantic import ValidationError

    from bulktx.bench.workloads import WorkloadSpec, write_generated

    try:
        spec = WorkloadSpec(
            kind=args.kind,
            type_count=args.types,
            weight=args.weight,
            alpha=args.alpha,
            tuple_count=args.tuples,
            txn_count=args.txns,
            scale_factor=args.scale,
            seed=args.seed,
            abort_rate=args.abort_rate,
        )
        count = write_generated(spec, args.output)
    except (ValidationError, BulkTxError, OSError) as e:
        log.error("Failed to generate workload", error=str(e))
        print(f"Error: {e}")
        return 1

    print(f"Wrote {count} transactions to {args.output}")
    return 0


def run_command(args: argparse.Namespace) -> int:
    """Run the run command."""
    from bulktx.bench.report import emit_report
    from bulktx.bench.runner import run_workload
    from bulktx.storage.snapshot import save_snapshot, snapshot

    if not Path(args.workload).exists():
        log.error("Workload file does not exist", path=args.workload)
        print(f"Error: Path does not exist: {args.workload}")
        return 1

    try:
        config = _engine_config(args)
        bench, txns = _load(args)
        run = run_workload(bench, txns, config, verify=not args.no_verify)
    except (BulkTxError, OSError) as e:
        log.error("Benchmark run failed", error=str(e))
        print(f"Error: {e}")
        return 1

    text = emit_report(run.report, args.format)
    if args.output:
        Path(args.output).write_text(text)
    else:
        print(text, end="")

    if args.dump_snapshot:
        save_snapshot(snapshot(run.store), args.dump_snapshot)
        _print_checksums(run.store)

    if run.report.error:
        print(f"Error: {run.report.error}")
        return 1
    if run.report.verified is False:
        print("Error: final state differs from the sequential oracle")
        return 1
    return 0


def calibrate_command(args: argparse.Namespace) -> int:
    """Run the calibrate command."""
    from bulktx.bench.runner import make_measure
    from bulktx.planner.calibration import CalibrationSpace, calibrate
    from bulktx.planner.config import dump_config

    if args.samples < 1:
        print("Error: --samples must be at least 1")
        return 1

    try:
        config = _engine_config(args)
        bench, txns = _load(args)
        step = -(-len(txns) // args.samples) if txns else 1
        samples = [txns[i : i + step] for i in range(0, len(txns), step)]
        space = CalibrationSpace(passes=args.pass_grid, partition_sizes=args.partition_grid)
        result = calibrate(
            samples,
            space,
            make_measure(bench, config),
            type_count=len(bench.registry),
            bits_per_pass=config.bits_per_pass,
            default_thresholds=config.thresholds(config.max_size),
        )
        tuned = config.with_overrides(
            {
                "passes": result.passes,
                "partition_size": result.partition_size,
                "w0_bar": result.thresholds.w0_bar,
                "c_bar": result.thresholds.c_bar,
                "d_bar": result.thresholds.d_bar,
            }
        )
        dump_config(tuned, args.output)
    except (BulkTxError, OSError, ValueError) as e:
        log.error("Calibration failed", error=str(e))
        print(f"Error: {e}")
        return 1

    print(f"Passes: {result.passes}")
    print(f"Partition size: {result.partition_size}")
    if result.throughput is not None:
        print(f"Throughput: {result.throughput:.3f} ktps over {result.measured} runs")
    print(f"Wrote configuration to {args.output}")
    return 0


def oracle_command(args: argparse.Namespace) -> int:
    """Run the oracle command."""
    from bulktx.storage.snapshot import save_snapshot, snapshot
    from bulktx.txmodel.sequential import execute_sequential
    from bulktx.txmodel.types import TxnOutcome

    try:
        bench, txns = _load(args)
        outcomes = execute_sequential(bench.store, bench.registry, txns)
    except (BulkTxError, OSError) as e:
        log.error("Oracle run failed", error=str(e))
        print(f"Error: {e}")
        return 1

    committed = sum(1 for o in outcomes.values() if o is TxnOutcome.COMMITTED)
    aborted = len(outcomes) - committed
    print(f"Transactions: {len(outcomes)} committed={committed} aborted={aborted}")
    _print_checksums(bench.store)
    if args.dump_snapshot:
        save_snapshot(snapshot(bench.store), args.dump_snapshot)
        print(f"Wrote snapshot to {args.dump_snapshot}")
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    """Main entry point."""
    parser = create_parser()
    args = parser.parse_args(argv)

    if args.command is None:
        parser.print_help()
        return 0

    configure_logging(args.verbose)
    result: int = args.func(args)
    return result


if __name__ == "__main__":
    sys.exit(main())
