"""Tests for the sequential reference execution."""

from __future__ import annotations

from typing import TYPE_CHECKING

import pytest

from bulktx.exceptions import SchedulingError
from bulktx.storage import compare_snapshots, snapshot
from bulktx.txmodel import (
    TxnOutcome,
    TxnSignature,
    TxnType,
    TypeRegistry,
    execute_sequential,
    read_workload,
    validate_footprints,
)

if TYPE_CHECKING:
    import pathlib

    from conftest import Bank

C, A = TxnOutcome.COMMITTED, TxnOutcome.ABORTED


class TestExecuteSequential:
    """Tests for serial execution in id order."""

    def test_bank_workload(self, bank: Bank, bank_workload_path: pathlib.Path) -> None:
        """The fixture workload commits, aborts and inserts as expected."""
        txns = read_workload(bank_workload_path).signatures()
        outcomes = execute_sequential(bank.store, bank.registry, txns)
        assert outcomes == {0: C, 1: A, 2: C, 3: C, 4: A, 5: C}
        assert bank.balance(0) == 125
        assert bank.balance(1) == 100
        assert bank.store.row_of("account", 7) is None
        assert bank.balance(8) == 40

    def test_without_merge(self, bank: Bank) -> None:
        """Inserts stay pending when the merge is skipped."""
        execute_sequential(bank.store, bank.registry, [bank.sig(0, bank.OPEN, 9, 1)], merge=False)
        assert bank.store.row_of("account", 9) is None
        assert len(bank.store.insert_buffer) == 1

    def test_forced_aborts(self, bank: Bank) -> None:
        """Forced aborts leave no effect."""
        txns = [bank.sig(0, bank.DEPOSIT, 0, 10), bank.sig(1, bank.DEPOSIT, 0, 20)]
        outcomes = execute_sequential(bank.store, bank.registry, txns, forced_aborts={0})
        assert outcomes == {0: A, 1: C}
        assert bank.balance(0) == 120

    def test_aborted_transfer_leaves_no_writes(self, bank: Bank) -> None:
        """A late abort is rolled back."""
        before = snapshot(bank.store)
        outcomes = execute_sequential(
            bank.store, bank.registry, [bank.sig(0, bank.TRANSFER, 2, 3, 101)]
        )
        assert outcomes == {0: A}
        assert compare_snapshots(before, snapshot(bank.store)) is None

    def test_out_of_order(self, bank: Bank) -> None:
        """Ids must be strictly increasing."""
        txns = [bank.sig(3, bank.AUDIT, 0, 1), bank.sig(3, bank.AUDIT, 0, 1)]
        with pytest.raises(SchedulingError, match="out of id order"):
            execute_sequential(bank.store, bank.registry, txns)

    def test_deterministic(self, bank: Bank) -> None:
        """Two runs of the same workload reach the same state."""
        txns = bank.random_txns(60, seed=3, sweeps=True)
        other = bank.store.copy()
        first = execute_sequential(bank.store, bank.registry, txns)
        second = execute_sequential(other, bank.registry, txns)
        assert first == second
        assert compare_snapshots(snapshot(bank.store), snapshot(other)) is None


class TestValidateFootprints:
    """Tests for strict footprint validation."""

    def test_bank_declarations_are_valid(self, bank: Bank) -> None:
        """The bank procedures stay inside their declarations."""
        txns = bank.random_txns(80, seed=1, sweeps=True)
        before = snapshot(bank.store)
        is_valid, errors = validate_footprints(bank.store, bank.registry, txns)
        assert is_valid, errors
        assert compare_snapshots(before, snapshot(bank.store)) is None

    def test_under_declaration(self, bank: Bank) -> None:
        """A procedure writing more than it declares is reported."""
        deposit = bank.registry.get(bank.DEPOSIT)
        registry = TypeRegistry()
        registry.register_type(TxnType(0, "sloppy", deposit.procedure, lambda fp, p: None))
        is_valid, errors = validate_footprints(bank.store, registry, [TxnSignature(0, 0, (1, 1))])
        assert not is_valid
        assert errors[0].startswith("txn 0 (sloppy): ")

    def test_two_phase_violation(self, bank: Bank) -> None:
        """A two-phase type that aborts after writing is reported."""
        transfer = bank.registry.get(bank.TRANSFER)
        registry = TypeRegistry()
        registry.register_type(
            TxnType(0, "transfer", transfer.procedure, transfer.declared_ops, is_two_phase=True)
        )
        txns = [TxnSignature(0, 0, (1, 2, 500))]
        is_valid, errors = validate_footprints(bank.store, registry, txns)
        assert not is_valid
        assert "after its first write" in errors[0]
