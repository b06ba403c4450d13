"""
Worker lanes.

A fixed thread pool stands in for the processor's cores. Work is handed out
per bulk; :meth:`LanePool.run` returns only after every task has finished,
which is the barrier between bulks (and between K-SET rounds).
"""

from __future__ import annotations

import contextlib
import itertools
import threading
from concurrent.futures import FIRST_EXCEPTION, ThreadPoolExecutor, wait
from typing import TYPE_CHECKING, Any

import numpy as np
import structlog

from bulktx.exceptions import WatchdogTimeout

if TYPE_CHECKING:
    from collections.abc import Callable, Iterator, Sequence
    from types import TracebackType

    from bulktx.executors.config import ExecutorConfig

log = structlog.get_logger()


class LanePool:
    """
    ``lane_count`` worker lanes with barrier semantics.

    Parameters
    ----------
    lane_count : int
        Number of lanes (threads).
    watchdog_seconds : float, default 60.0
        Bound on one :meth:`run` call.
    """

    def __init__(self, lane_count: int, watchdog_seconds: float = 60.0) -> None:
        if lane_count < 1:
            raise ValueError("lane_count must be at least 1")
        self.lane_count = lane_count
        self.watchdog_seconds = watchdog_seconds
        self.txn_counts = np.zeros(lane_count, dtype=np.int64)
        self._executor: ThreadPoolExecutor | None = None
        self._local = threading.local()
        self._ids = itertools.count(1)

    def __enter__(self) -> LanePool:
        return self

    def __exit__(
        self,
        exc_type: type[BaseException] | None,
        exc: BaseException | None,
        tb: TracebackType | None,
    ) -> None:
        self.close()

    def _pool(self) -> ThreadPoolExecutor:
        if self._executor is None:
            self._executor = ThreadPoolExecutor(
                max_workers=self.lane_count, thread_name_prefix="lane"
            )
        return self._executor

    def _lane(self) -> int:
        lane = getattr(self._local, "lane", None)
        if lane is None:
            # worker threads take ids 1..M-1 in start order; the coordinator is lane 0
            lane = next(self._ids) % self.lane_count
            self._local.lane = lane
        return int(lane)

    def _call(self, task: Callable[[int], Any]) -> Any:
        lane = self._lane()
        self.txn_counts[lane] += 1
        return task(lane)

    def run(self, tasks: Sequence[Callable[[int], Any]]) -> list[Any]:
        """
        Run every task on some lane and wait for all of them.

        Each task receives its lane id. A single task runs inline on the
        coordinating lane 0.

        Raises
        ------
        WatchdogTimeout
            If the tasks do not finish within the watchdog bound.
        """
        if not tasks:
            return []
        if len(tasks) == 1:
            self.txn_counts[0] += 1
            return [tasks[0](0)]
        futures = [self._pool().submit(self._call, t) for t in tasks]
        done, pending = wait(futures, timeout=self.watchdog_seconds, return_when=FIRST_EXCEPTION)
        for f in done:
            exc = f.exception()
            if exc is not None:
                for p in pending:
                    p.cancel()
                raise exc
        if pending:
            for p in pending:
                p.cancel()
            log.error("lane watchdog fired", pending=len(pending), tasks=len(tasks))
            raise WatchdogTimeout(
                f"{len(pending)} of {len(tasks)} tasks unfinished after "
                f"{self.watchdog_seconds}s"
            )
        return [f.result() for f in futures]

    def reset_counts(self) -> None:
        self.txn_counts[:] = 0

    def close(self) -> None:
        if self._executor is not None:
            self._executor.shutdown(wait=False, cancel_futures=True)
            self._executor = None


@contextlib.contextmanager
def borrow_lanes(config: ExecutorConfig, lanes: LanePool | None = None) -> Iterator[LanePool]:
    """Yield ``lanes``, or a pool built from ``config`` that is closed afterwards."""
    if lanes is not None:
        yield lanes
        return
    pool = LanePool(config.lane_count, config.watchdog_seconds)
    try:
        yield pool
    finally:
        pool.close()
