"""Tests for workload specs and generators."""

from __future__ import annotations

from typing import TYPE_CHECKING

import pytest
from pydantic import ValidationError

from bulktx.bench import (
    WorkloadSpec,
    build_workbench,
    format_generated,
    gen_micro,
    gen_tm1_like,
    gen_tpcb_like,
    generate_workload,
    load_workload,
    spec_from_header,
    write_generated,
)
from bulktx.bench import mixed, tm1, tpcb
from bulktx.exceptions import WorkloadError

if TYPE_CHECKING:
    from pathlib import Path


class TestWorkloadSpec:
    """Tests for the spec model."""

    def test_defaults(self) -> None:
        """The default spec is a micro workload."""
        spec = WorkloadSpec()
        assert spec.kind == "micro"
        assert spec.type_count == 8

    def test_extra_fields_rejected(self) -> None:
        """Unknown fields are errors."""
        with pytest.raises(ValidationError):
            WorkloadSpec.model_validate({"kind": "micro", "zipf": 1.2})

    def test_alpha_range(self) -> None:
        """Skew is a probability."""
        with pytest.raises(ValidationError):
            WorkloadSpec(alpha=1.5)

    def test_header_round_trip(self) -> None:
        """A dumped spec rebuilds from its header."""
        spec = WorkloadSpec(kind="tm1_like", seed=7, abort_rate=0.1)
        assert spec_from_header(spec.model_dump(mode="json")) == spec

    def test_missing_header(self) -> None:
        """Files without a header cannot be rebuilt."""
        with pytest.raises(WorkloadError, match="no '#spec' header"):
            spec_from_header(None)

    def test_invalid_header(self) -> None:
        """A header that is not a spec is reported."""
        with pytest.raises(WorkloadError, match="invalid workload spec"):
            spec_from_header({"kind": "nope"})


class TestGenerators:
    """Tests for the four workload families."""

    def test_generation_is_deterministic(self) -> None:
        """Equal specs give byte-identical files."""
        spec = WorkloadSpec(kind="mixed", txn_count=50, tuple_count=16, seed=3, abort_rate=0.2)
        assert format_generated(spec) == format_generated(spec.model_copy())

    def test_seed_changes_workload(self) -> None:
        """Different seeds give different workloads."""
        a = generate_workload(WorkloadSpec(txn_count=50, seed=1))
        b = generate_workload(WorkloadSpec(txn_count=50, seed=2))
        assert a != b

    def test_micro(self) -> None:
        """Micro transactions use registered types and existing tuples."""
        spec = WorkloadSpec(type_count=4, tuple_count=10, txn_count=200, seed=5)
        txns = gen_micro(spec)
        assert [s.id for s in txns] == list(range(200))
        assert {s.type_id for s in txns} <= set(range(4))
        assert all(0 <= s.params[0] < 10 for s in txns)

    def test_micro_full_skew(self) -> None:
        """With alpha 1 every transaction hits tuple 0."""
        txns = gen_micro(WorkloadSpec(alpha=1.0, txn_count=30))
        assert {s.params[0] for s in txns} == {0}

    def test_tpcb_like(self) -> None:
        """Tellers and accounts belong to the chosen branch."""
        spec = WorkloadSpec(kind="tpcb_like", scale_factor=3, tuple_count=5, txn_count=100)
        for sig in gen_tpcb_like(spec):
            branch, teller, account, delta, history = sig.params
            assert teller // tpcb.TELLERS_PER_BRANCH == branch
            assert account // spec.tuple_count == branch
            assert abs(delta) <= tpcb.MAX_DELTA
            assert history == sig.id

    def test_tpcb_like_workbench(self) -> None:
        """Each branch has ten tellers and ``tuple_count`` accounts."""
        bench = build_workbench(WorkloadSpec(kind="tpcb_like", scale_factor=2, tuple_count=7))
        assert bench.store.table("teller").row_count == 20
        assert bench.store.table("account").row_count == 14
        assert bench.store.table("history").row_count == 0
        assert bench.registry.frozen

    def test_tm1_like_split_lookups(self) -> None:
        """Updates located by number follow a subscriber read of the same subscriber."""
        spec = WorkloadSpec(kind="tm1_like", tuple_count=20, txn_count=300, seed=11)
        txns = gen_tm1_like(spec)
        assert len(txns) == 300
        for prev, sig in zip(txns, txns[1:], strict=False):
            if sig.type_id in tm1.SPLIT_LOOKUP:
                assert prev.type_id == tm1.GET_SUBSCRIBER_DATA
                assert prev.params == (sig.params[0], 0)

    def test_tm1_like_abort_flags(self) -> None:
        """Every instance carries a trailing abort flag."""
        spec = WorkloadSpec(kind="tm1_like", tuple_count=20, txn_count=200, abort_rate=1.0)
        txns = gen_tm1_like(spec)
        assert all(s.params[-1] in (0, 1) for s in txns)
        assert any(s.params[-1] == 1 for s in txns)

    def test_mixed_workbench(self) -> None:
        """The toggle region starts half loaded."""
        spec = WorkloadSpec(kind="mixed", tuple_count=8)
        bench = build_workbench(spec)
        assert bench.store.table(mixed.TABLE).row_count == 12
        toggles = [s for s in generate_workload(spec) if s.type_id == mixed.TOGGLE]
        assert all(8 <= s.params[0] < 16 for s in toggles)

    def test_no_tuples(self) -> None:
        """Workloads need at least one tuple."""
        with pytest.raises(WorkloadError, match="at least one tuple"):
            generate_workload(WorkloadSpec(tuple_count=0))

    def test_kind_mismatch(self) -> None:
        """A generator refuses specs of another kind."""
        with pytest.raises(WorkloadError, match="given to the micro generator"):
            gen_micro(WorkloadSpec(kind="tm1_like"))


class TestWorkloadFiles:
    """Tests for writing and loading workload files."""

    def test_write_then_load(self, tmp_path: Path) -> None:
        """Loading a written file rebuilds the spec and the signatures."""
        spec = WorkloadSpec(kind="tpcb_like", txn_count=25, tuple_count=4, seed=9)
        path = tmp_path / "w.csv"
        assert write_generated(spec, path) == 25
        bench, txns = load_workload(path)
        assert bench.spec == spec
        assert txns == generate_workload(spec)

    def test_load_without_header(self, tmp_path: Path) -> None:
        """Plain workload files have no testbed to rebuild."""
        path = tmp_path / "plain.csv"
        path.write_text("0,0,1\n")
        with pytest.raises(WorkloadError, match="no '#spec' header"):
            load_workload(path)
