"""Synchronous and background optimization of objective functions."""

from __future__ import annotations

import threading
from concurrent.futures import Future, ThreadPoolExecutor

from ..errors import DoubleSync, ObjectiveEvaluationFailure, QkcError
from .objective import ObjectiveFunction
from .optimizers import Optimizer, ResultsBuffer


def optimize(optimizer: Optimizer, objective: ObjectiveFunction) -> ResultsBuffer:
    """Minimize ``objective`` starting from a fresh backend stream."""
    objective.reset()
    return optimizer.optimize(objective, objective.n_params)


class Handle:
    """Join token for a background optimization; ``sync`` may be called once."""

    def __init__(self, future: Future, objective: ObjectiveFunction):
        self._future = future
        self.objective = objective
        self._synced = False
        self._lock = threading.Lock()

    def done(self) -> bool:
        return self._future.done()

    def sync(self) -> ResultsBuffer:
        with self._lock:
            if self._synced:
                raise DoubleSync("this handle has already been synchronized")
            self._synced = True
        try:
            return self._future.result()
        except QkcError:
            raise
        except Exception as exc:
            raise ObjectiveEvaluationFailure(f"background optimization failed: {exc}") from exc


def task_initiate(objective: ObjectiveFunction, optimizer: Optimizer) -> Handle:
    """Start ``optimize`` on a worker thread with its own copy of the objective."""
    worker = objective.clone()
    executor = ThreadPoolExecutor(max_workers=1, thread_name_prefix="qkc-task")
    future = executor.submit(optimize, optimizer, worker)
    executor.shutdown(wait=False)
    return Handle(future, worker)


def sync(handle: Handle) -> ResultsBuffer:
    return handle.sync()


taskInitiate = task_initiate
