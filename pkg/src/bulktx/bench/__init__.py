"""
Workload generators and the benchmark driver.

- :class:`WorkloadSpec` and :func:`generate_workload`: micro, TPC-B-like,
  TM1-like and mixed workloads
- :func:`run_bench`: run a workload file and check it against the oracle
- :func:`emit_report`: CSV or text rendering of an :class:`ExecReport`
"""

from bulktx.bench.report import (
    CSV_COLUMNS,
    CSV_SCHEMA_VERSION,
    BulkRecord,
    ExecReport,
    emit_report,
    write_report,
)
from bulktx.bench.runner import (
    BenchRun,
    make_measure,
    run_bench,
    run_workload,
    stamp_arrivals,
    verify_against_oracle,
)
from bulktx.bench.workloads import (
    Workbench,
    WorkloadSpec,
    build_workbench,
    format_generated,
    gen_micro,
    gen_mixed,
    gen_tm1_like,
    gen_tpcb_like,
    generate_workload,
    load_workload,
    spec_from_header,
    write_generated,
)

__all__ = [
    "CSV_COLUMNS",
    "CSV_SCHEMA_VERSION",
    "BenchRun",
    "BulkRecord",
    "ExecReport",
    "Workbench",
    "WorkloadSpec",
    "build_workbench",
    "emit_report",
    "format_generated",
    "gen_micro",
    "gen_mixed",
    "gen_tm1_like",
    "gen_tpcb_like",
    "generate_workload",
    "load_workload",
    "make_measure",
    "run_bench",
    "run_workload",
    "spec_from_header",
    "stamp_arrivals",
    "verify_against_oracle",
    "write_generated",
    "write_report",
]
