"""Randomized runs of every strategy against the sequential oracle."""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np
import pytest

from bulktx.executors import (
    AccessTrace,
    ExecutorConfig,
    LanePool,
    Strategy,
    build_partition_schedule,
    exec_part_relaxed_gen,
    execute_bulk,
    is_conflict_serializable,
)

if TYPE_CHECKING:
    from conftest import Bank

    from bulktx.txmodel import TxnSignature

LANES = (1, 4, 16)


def sweep_config(seed: int) -> ExecutorConfig:
    lanes = LANES[seed % len(LANES)]
    return ExecutorConfig(
        lane_count=lanes, warp_size=lanes, partition_size=2, watchdog_seconds=60.0
    )


def sweep_txns(bank: Bank, seed: int) -> list[TxnSignature]:
    """Mixed bulk of 1 to 64 transactions; overdrawn transfers abort."""
    size = int(np.random.default_rng(seed).integers(1, 65))
    return bank.random_txns(size, seed=seed, sweeps=seed % 4 == 0)


def paired_txns(bank: Bank, seed: int) -> list[TxnSignature]:
    """Single-partition bulk: deposits and transfers inside pairs of accounts."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(int(rng.integers(1, 65))):
        pair = 2 * int(rng.integers(4))
        if rng.random() < 0.5:
            out.append(bank.sig(i, bank.DEPOSIT, pair + int(rng.integers(2)), 5))
        else:
            out.append(bank.sig(i, bank.TRANSFER, pair, pair + 1, int(rng.integers(1, 150))))
    return out


@pytest.mark.slow
class TestRandomizedSweep:
    """Many seeded workloads per strategy; ``--sweep-runs`` sets the count."""

    @pytest.mark.parametrize("strategy", [Strategy.TPL, Strategy.PART, Strategy.KSET])
    def test_ordered_strategies(self, bank: Bank, sweep_runs: int, strategy: Strategy) -> None:
        """Outcomes and final state equal the sequential run."""
        for seed in range(sweep_runs):
            txns = sweep_txns(bank, seed)
            initial = bank.store.copy()
            result = execute_bulk(strategy, initial.copy(), bank.registry, txns, sweep_config(seed))
            ok, errors = bank.verify(initial, result, txns)
            assert ok, (seed, errors)

    def test_relaxed_tpl(self, bank: Bank, sweep_runs: int) -> None:
        """Every relaxed locking trace is conflict-serializable."""
        for seed in range(sweep_runs):
            txns = sweep_txns(bank, seed)
            trace = AccessTrace()
            result = execute_bulk(
                Strategy.TPL_RELAXED,
                bank.store.copy(),
                bank.registry,
                txns,
                sweep_config(seed),
                trace=trace,
            )
            assert result.committed + result.aborted == len(txns), seed
            assert is_conflict_serializable(trace), seed

    def test_relaxed_part(self, bank: Bank, sweep_runs: int) -> None:
        """Sort-free groups hold the sorted groups' members and runs serialize."""
        for seed in range(sweep_runs):
            txns = paired_txns(bank, seed)
            config = sweep_config(seed)
            with LanePool(config.lane_count) as lanes:
                relaxed = exec_part_relaxed_gen(bank.registry, txns, 2, lanes=lanes).groups()
            by_sort = build_partition_schedule(bank.registry, txns, 2).groups()
            assert {p: set(ids) for p, ids in relaxed.items()} == {
                p: set(ids) for p, ids in by_sort.items()
            }, seed

            trace = AccessTrace()
            result = execute_bulk(
                Strategy.PART_RELAXED, bank.store.copy(), bank.registry, txns, config, trace=trace
            )
            assert result.committed + result.aborted == len(txns), seed
            assert is_conflict_serializable(trace), seed
