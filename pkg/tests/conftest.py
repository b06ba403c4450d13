"""Pytest configuration and fixtures."""

from __future__ import annotations

import pathlib
from dataclasses import dataclass
from typing import TYPE_CHECKING, ClassVar

import numpy as np
import pytest

from bulktx.bench.runner import verify_against_oracle
from bulktx.bench.workloads import Workbench, WorkloadSpec
from bulktx.exceptions import FootprintUnknown
from bulktx.executors import ExecutorConfig
from bulktx.storage import DataItemId, load_store
from bulktx.txmodel import BasicOp, OpMode, TxnSignature, TxnType, TypeRegistry

if TYPE_CHECKING:
    from collections.abc import Callable

    from bulktx.executors import ExecOutcome
    from bulktx.storage import ColumnStore
    from bulktx.txmodel import Footprint, Params, StoreAccessor

# Paths to test data
TEST_DATA_DIR = pathlib.Path(__file__).parent / "_test_data"
BANK_STORE_PATH = TEST_DATA_DIR / "bank.store"
BANK_WORKLOAD_PATH = TEST_DATA_DIR / "bank_workload.csv"
ENGINE_CONFIG_PATH = TEST_DATA_DIR / "engine.conf"
DEPENDENCY_EXAMPLE_PATH = TEST_DATA_DIR / "dependency_example.graph"

ACCOUNT = "account"
ACCOUNT_COUNT = 8


def _deposit(acc: StoreAccessor, params: Params) -> None:
    key, amount = (int(p) for p in params)
    acc.add(ACCOUNT, "balance", key, amount)


def _declare_deposit(fp: Footprint, params: Params) -> None:
    fp.write(ACCOUNT, "balance", params[0])


def _transfer(acc: StoreAccessor, params: Params) -> None:
    src, dst, amount = (int(p) for p in params)
    if acc.add(ACCOUNT, "balance", src, -amount) < 0:
        acc.abort("insufficient funds")
    acc.add(ACCOUNT, "balance", dst, amount)


def _declare_transfer(fp: Footprint, params: Params) -> None:
    fp.write(ACCOUNT, "balance", params[0]).write(ACCOUNT, "balance", params[1])


def _audit(acc: StoreAccessor, params: Params) -> None:
    for key in params:
        acc.read(ACCOUNT, "balance", int(key))


def _declare_audit(fp: Footprint, params: Params) -> None:
    for key in params:
        fp.read(ACCOUNT, "balance", key)


def _open(acc: StoreAccessor, params: Params) -> None:
    key, amount = (int(p) for p in params)
    acc.insert(ACCOUNT, (key, amount, b"new"))


def _declare_open(fp: Footprint, params: Params) -> None:
    fp.insert(ACCOUNT, params[0])


def _close(acc: StoreAccessor, params: Params) -> None:
    acc.delete(ACCOUNT, int(params[0]))


def _declare_close(fp: Footprint, params: Params) -> None:
    fp.delete(ACCOUNT, params[0])


def _sweep(acc: StoreAccessor, params: Params) -> None:
    target = int(params[0])
    live = [k for k in range(ACCOUNT_COUNT) if acc.lookup(ACCOUNT, k)]
    total = sum(int(acc.read(ACCOUNT, "balance", k)) for k in live)
    acc.write(ACCOUNT, "balance", target, total)


def _declare_sweep(fp: Footprint, params: Params) -> None:
    raise FootprintUnknown("sweep reads every account", (fp.store.table(ACCOUNT).index,))


def _root_one(fp: Footprint, params: Params) -> None:
    fp.lookup(ACCOUNT, params[0])


def _root_two(fp: Footprint, params: Params) -> None:
    fp.lookup(ACCOUNT, params[0]).lookup(ACCOUNT, params[1])


@dataclass
class Bank:
    """Eight-account store with its registered procedures."""

    DEPOSIT: ClassVar[int] = 0
    TRANSFER: ClassVar[int] = 1
    AUDIT: ClassVar[int] = 2
    OPEN: ClassVar[int] = 3
    CLOSE: ClassVar[int] = 4
    SWEEP: ClassVar[int] = 5

    store: ColumnStore
    registry: TypeRegistry

    def sig(self, txn_id: int, type_id: int, *params: int, at: float = 0.0) -> TxnSignature:
        return TxnSignature(txn_id, type_id, tuple(params), at)

    def balance(self, key: int, store: ColumnStore | None = None) -> int:
        store = store or self.store
        return int(store.read(store.item(ACCOUNT, "balance", store.lookup(ACCOUNT, key))))

    def random_txns(
        self, n: int, seed: int = 0, *, sweeps: bool = False, inserts: bool = True
    ) -> list[TxnSignature]:
        """Random mix over the eight accounts and four insertable keys."""
        rng = np.random.default_rng(seed)
        kinds = [self.DEPOSIT, self.TRANSFER, self.AUDIT]
        if inserts:
            kinds += [self.OPEN, self.CLOSE]
        if sweeps:
            kinds.append(self.SWEEP)
        out = []
        for i in range(n):
            kind = int(rng.choice(kinds))
            a, b = (int(k) for k in rng.choice(ACCOUNT_COUNT, size=2, replace=False))
            if kind == self.DEPOSIT:
                params: tuple[int, ...] = (a, int(rng.integers(1, 50)))
            elif kind == self.TRANSFER:
                params = (a, b, int(rng.integers(1, 150)))
            elif kind == self.AUDIT:
                params = (a, b)
            elif kind == self.OPEN:
                params = (ACCOUNT_COUNT + int(rng.integers(4)), int(rng.integers(1, 50)))
            elif kind == self.CLOSE:
                params = (int(rng.integers(ACCOUNT_COUNT + 4)),)
            else:
                params = (a,)
            out.append(TxnSignature(i, kind, params))
        return out

    def verify(
        self, initial: ColumnStore, result: ExecOutcome, txns: list[TxnSignature]
    ) -> tuple[bool, list[str]]:
        """Compare an executed bulk with the sequential oracle."""
        bench = Workbench(WorkloadSpec(), result.store, self.registry)
        return verify_against_oracle(initial, result.store, bench, txns, result.outcomes)


def make_bank_registry() -> TypeRegistry:
    registry = TypeRegistry()
    two_keys = lambda p: (int(p[0]), int(p[1]))  # noqa: E731
    one_key = lambda p: (int(p[0]),)  # noqa: E731
    for spec in (
        TxnType(Bank.DEPOSIT, "deposit", _deposit, _declare_deposit, True, one_key, _root_one),
        TxnType(
            Bank.TRANSFER, "transfer", _transfer, _declare_transfer, False, two_keys, _root_two
        ),
        TxnType(Bank.AUDIT, "audit", _audit, _declare_audit, True, two_keys, _root_two),
        TxnType(Bank.OPEN, "open", _open, _declare_open, True, one_key),
        TxnType(Bank.CLOSE, "close", _close, _declare_close, True, one_key),
        TxnType(Bank.SWEEP, "sweep", _sweep, _declare_sweep, True),
    ):
        registry.register_type(spec)
    registry.freeze()
    return registry


@pytest.fixture
def bank_store() -> ColumnStore:
    """Fixture providing a freshly loaded bank store."""
    return load_store(BANK_STORE_PATH)


@pytest.fixture
def bank_registry() -> TypeRegistry:
    """Fixture providing the frozen bank registry."""
    return make_bank_registry()


@pytest.fixture
def bank(bank_store: ColumnStore, bank_registry: TypeRegistry) -> Bank:
    """Fixture bundling the bank store and registry."""
    return Bank(bank_store, bank_registry)


@pytest.fixture
def small_config() -> ExecutorConfig:
    """Four lanes, one warp, partitions of two keys."""
    return ExecutorConfig(lane_count=4, warp_size=4, partition_size=2, watchdog_seconds=20.0)


LANE_COUNTS = (1, 4, 64, 1024)


def lane_config(lane_count: int) -> ExecutorConfig:
    """Executor settings for ``lane_count`` lanes, warps of up to 32."""
    return ExecutorConfig(
        lane_count=lane_count,
        warp_size=min(lane_count, 32),
        partition_size=2,
        watchdog_seconds=20.0,
    )


@pytest.fixture(params=LANE_COUNTS, ids=lambda m: f"lanes{m}")
def lanes_config(request: pytest.FixtureRequest) -> ExecutorConfig:
    """Fixture providing executor settings for each tested lane count."""
    return lane_config(request.param)


@pytest.fixture
def all_lane_configs() -> list[ExecutorConfig]:
    """Fixture providing executor settings for every tested lane count."""
    return [lane_config(m) for m in LANE_COUNTS]


@pytest.fixture
def dependency_example_ops() -> list[BasicOp]:
    """T1 W a; T2 R a, W b; T3 R a, W c; T4 W a, R b, R c."""
    a, b, c = (DataItemId(0, 0, r) for r in range(3))
    r, w = OpMode.READ, OpMode.WRITE
    return [
        BasicOp(a, 1, w),
        BasicOp(a, 2, r),
        BasicOp(b, 2, w),
        BasicOp(a, 3, r),
        BasicOp(c, 3, w),
        BasicOp(a, 4, w),
        BasicOp(b, 4, r),
        BasicOp(c, 4, r),
    ]


def random_ops(
    n_txns: int, n_items: int, ops_per_txn: int, seed: int, write_ratio: float = 0.4
) -> list[BasicOp]:
    """Random declared operations over ``n_items`` cells of table 0."""
    rng = np.random.default_rng(seed)
    ops = []
    for t in range(n_txns):
        for row in rng.choice(n_items, size=min(ops_per_txn, n_items), replace=False).tolist():
            mode = OpMode.WRITE if rng.random() < write_ratio else OpMode.READ
            ops.append(BasicOp(DataItemId(0, 0, int(row)), t, mode))
    return ops


@pytest.fixture(params=[0, 1, 2, 3], ids=lambda s: f"seed{s}")
def random_pool(request: pytest.FixtureRequest) -> list[BasicOp]:
    """Fixture providing random pools of 40 transactions over 12 items."""
    return random_ops(40, 12, 3, seed=request.param)


@pytest.fixture
def make_random_ops() -> Callable[..., list[BasicOp]]:
    """Fixture providing the random pool builder."""
    return random_ops


@pytest.fixture
def bank_store_path() -> pathlib.Path:
    return BANK_STORE_PATH


@pytest.fixture
def bank_workload_path() -> pathlib.Path:
    return BANK_WORKLOAD_PATH


@pytest.fixture
def engine_config_path() -> pathlib.Path:
    return ENGINE_CONFIG_PATH


@pytest.fixture
def dependency_example_path() -> pathlib.Path:
    return DEPENDENCY_EXAMPLE_PATH


def pytest_addoption(parser: pytest.Parser) -> None:
    parser.addoption(
        "--sweep-runs",
        type=int,
        default=1000,
        help="randomized workloads per strategy in the sweep tests",
    )


@pytest.fixture
def sweep_runs(request: pytest.FixtureRequest) -> int:
    """Fixture providing the configured number of randomized sweep runs."""
    return int(request.config.getoption("--sweep-runs"))
