"""Tests for round-by-round 0-set execution."""

from __future__ import annotations

from typing import TYPE_CHECKING

import pytest

from bulktx.depgraph import RankState, compute_ranks
from bulktx.executors import AccessTrace, Strategy, check_conflict_order, exec_kset
from bulktx.txmodel import TxnOutcome, pool_footprint

if TYPE_CHECKING:
    from conftest import Bank

    from bulktx.executors import ExecutorConfig


class TestExecKset:
    """Tests for the 0-set strategy."""

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_matches_oracle(self, bank: Bank, lanes_config: ExecutorConfig, seed: int) -> None:
        """Pools reach the sequential state without cascading rollback."""
        initial = bank.store.copy()
        txns = bank.random_txns(40, seed=seed, sweeps=seed == 1)
        trace = AccessTrace()
        result = exec_kset(bank.store, bank.registry, txns, lanes_config, trace=trace)
        ok, errors = bank.verify(initial, result, txns)
        assert ok, errors
        assert result.strategy is Strategy.KSET
        assert result.rolled_back == 0
        assert check_conflict_order(trace)[0]

    def test_rounds_are_depth_plus_one(self, bank: Bank, small_config: ExecutorConfig) -> None:
        """One round per k-set."""
        txns = bank.random_txns(30, seed=9, inserts=False)
        fp = pool_footprint(bank.registry, bank.store, txns)
        depth = compute_ranks(fp.ops, [s.id for s in txns]).depth
        result = exec_kset(bank.store, bank.registry, txns, small_config, footprint=fp)
        assert result.rounds == depth + 1

    def test_chain_runs_one_per_round(self, bank: Bank, small_config: ExecutorConfig) -> None:
        """Deposits to one account form a chain of single-transaction rounds."""
        txns = [bank.sig(i, bank.DEPOSIT, 3, 1) for i in range(5)]
        result = exec_kset(bank.store, bank.registry, txns, small_config)
        assert result.rounds == 5
        assert result.lane_txn_counts.sum() == 5
        assert bank.balance(3) == 105

    def test_precomputed_state_is_consumed(
        self, bank: Bank, small_config: ExecutorConfig
    ) -> None:
        """A supplied rank state is drained by the rounds."""
        txns = bank.random_txns(20, seed=2)
        fp = pool_footprint(bank.registry, bank.store, txns)
        state = RankState.from_ops(fp.ops, [s.id for s in txns])
        result = exec_kset(bank.store, bank.registry, txns, small_config, state=state)
        assert len(state) == 0
        assert len(result) == 20

    def test_abort_is_undone(self, bank: Bank, small_config: ExecutorConfig) -> None:
        """An abort in a round is rolled back before the next round."""
        txns = [bank.sig(0, bank.TRANSFER, 0, 1, 150), bank.sig(1, bank.AUDIT, 0, 1)]
        result = exec_kset(bank.store, bank.registry, txns, small_config)
        assert result.outcomes == {0: TxnOutcome.ABORTED, 1: TxnOutcome.COMMITTED}
        assert (bank.balance(0), bank.balance(1)) == (100, 100)
