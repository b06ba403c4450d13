"""Tests for the transaction-type registry and pool."""

from __future__ import annotations

import pytest

from bulktx.exceptions import RegistrationError, UnknownTypeError, WorkloadError
from bulktx.txmodel import TxnPool, TxnSignature, TxnType, TypeRegistry


def _noop(acc: object, params: object) -> None:
    pass


def make_type(type_id: int, **kwargs: object) -> TxnType:
    return TxnType(type_id, f"type{type_id}", _noop, _noop, **kwargs)  # type: ignore[arg-type]


class TestTypeRegistry:
    """Tests for registration and lookup."""

    def test_register_and_get(self) -> None:
        """Registered types are returned by id."""
        registry = TypeRegistry()
        assert registry.register_type(make_type(3, is_two_phase=True)) == 3
        registry.register_type(make_type(1))
        assert registry.get(3).name == "type3"
        assert registry.type_ids == [1, 3]
        assert [t.type_id for t in registry] == [1, 3]
        assert registry.is_two_phase(3)
        assert not registry.is_two_phase(1)

    def test_duplicate_id(self) -> None:
        """A type id can be registered once."""
        registry = TypeRegistry()
        registry.register_type(make_type(0))
        with pytest.raises(RegistrationError, match="duplicate"):
            registry.register_type(make_type(0))

    @pytest.mark.parametrize("type_id", [-1, 1 << 16])
    def test_out_of_range(self, type_id: int) -> None:
        """Type ids are 16-bit."""
        with pytest.raises(RegistrationError, match="out of range"):
            TypeRegistry().register_type(make_type(type_id))

    def test_frozen(self) -> None:
        """A frozen registry accepts no new types."""
        registry = TypeRegistry()
        registry.freeze()
        assert registry.frozen
        with pytest.raises(RegistrationError, match="frozen"):
            registry.register_type(make_type(0))

    def test_unknown_type(self) -> None:
        """Unknown ids raise UnknownTypeError."""
        with pytest.raises(UnknownTypeError):
            TypeRegistry().get(9)


class TestPartitionOf:
    """Tests for single-partition classification."""

    def test_single_partition(self) -> None:
        """Keys in one partition give its id."""
        txn_type = make_type(0, partition_keys=lambda p: (p[0], p[1]))
        assert txn_type.partition_of((4, 5), 2) == 2
        assert txn_type.partition_of((4, 6), 2) is None

    def test_without_partition_keys(self) -> None:
        """Types without partition keys are never single-partition."""
        assert make_type(0).partition_of((1,), 4) is None
        assert not make_type(0).is_single_partition


class TestTxnPool:
    """Tests for the submission pool."""

    @pytest.fixture
    def pool(self) -> TxnPool:
        registry = TypeRegistry()
        registry.register_type(make_type(0))
        registry.register_type(make_type(1))
        return TxnPool(registry)

    def test_submit_assigns_ids(self, pool: TxnPool) -> None:
        """Submitted signatures get consecutive ids."""
        first = pool.submit(0, (1,), submitted_at=0.5)
        second = pool.submit(1)
        assert (first.id, second.id) == (0, 1)
        assert first.submitted_at == 0.5
        assert pool.next_id == 2
        assert len(pool) == 2

    def test_take_and_peek(self, pool: TxnPool) -> None:
        """take removes from the front; peek does not."""
        for _ in range(4):
            pool.submit(0)
        assert [s.id for s in pool.peek(2)] == [0, 1]
        assert [s.id for s in pool.take(3)] == [0, 1, 2]
        assert [s.id for s in pool.take()] == [3]
        assert pool.take() == []

    def test_take_ids(self, pool: TxnPool) -> None:
        """Selected ids leave the pool in id order."""
        for _ in range(5):
            pool.submit(0)
        assert [s.id for s in pool.take_ids({3, 1})] == [1, 3]
        assert [s.id for s in pool] == [0, 2, 4]

    def test_add_requires_increasing_ids(self, pool: TxnPool) -> None:
        """Replayed ids must grow."""
        pool.add(TxnSignature(5, 0))
        assert pool.next_id == 6
        with pytest.raises(WorkloadError, match="not greater"):
            pool.add(TxnSignature(5, 1))

    def test_unknown_type(self, pool: TxnPool) -> None:
        """Submissions of unregistered types are refused."""
        with pytest.raises(UnknownTypeError):
            pool.submit(7)
        with pytest.raises(UnknownTypeError):
            pool.add(TxnSignature(0, 7))
