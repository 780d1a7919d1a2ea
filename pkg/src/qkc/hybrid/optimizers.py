"""Classical optimizers for variational objectives."""

from __future__ import annotations

import threading
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize

from ..errors import UnknownOptimizer

Objective = Callable[[np.ndarray], float]


@dataclass
class ResultsBuffer:
    opt_val: float
    opt_params: list[float]
    n_evals: int = 0


def central_difference(f: Objective, x: Sequence[float], h: float = 1e-4) -> np.ndarray:
    """Gradient by symmetric differences, one coordinate at a time."""
    x = np.asarray(x, dtype=float)
    grad = np.zeros_like(x)
    for i in range(x.size):
        step = np.zeros_like(x)
        step[i] = h
        grad[i] = (f(x + step) - f(x - step)) / (2 * h)
    return grad


class _BestTracker:
    """Wraps an objective and remembers the lowest value it ever returned."""

    def __init__(self, f: Objective):
        self.f = f
        self.best_val = np.inf
        self.best_x: np.ndarray | None = None
        self.n_evals = 0

    def __call__(self, x) -> float:
        x = np.array(x, dtype=float)
        val = float(self.f(x))
        self.n_evals += 1
        if val < self.best_val:
            self.best_val, self.best_x = val, x
        return val

    def result(self) -> ResultsBuffer:
        return ResultsBuffer(self.best_val, [float(v) for v in self.best_x], self.n_evals)


class Optimizer(ABC):
    name = "optimizer"

    def __init__(self, initial_params: Sequence[float] | None = None):
        self.initial_params = None if initial_params is None else [float(v) for v in initial_params]

    def start(self, n_params: int) -> np.ndarray:
        if self.initial_params is None:
            return np.zeros(n_params)
        if len(self.initial_params) != n_params:
            raise ValueError(f"initial_params has {len(self.initial_params)} entries, expected {n_params}")
        return np.array(self.initial_params)

    def optimize(self, f: Objective, n_params: int) -> ResultsBuffer:
        """Minimize ``f``; the result is the best point evaluated, never worse."""
        tracker = _BestTracker(f)
        x0 = self.start(n_params)
        tracker(x0)
        if n_params > 0:
            self._minimize(tracker, x0)
        return tracker.result()

    @abstractmethod
    def _minimize(self, f: Objective, x0: np.ndarray) -> None: ...


class NelderMead(Optimizer):
    name = "nelder-mead"

    def __init__(self, step: float = 0.1, f_tol: float = 1e-6, max_iters: int = 500,
                 x_tol: float = 1e-6, initial_params: Sequence[float] | None = None):
        super().__init__(initial_params)
        self.step, self.f_tol, self.max_iters, self.x_tol = step, f_tol, max_iters, x_tol

    def _minimize(self, f: Objective, x0: np.ndarray) -> None:
        simplex = np.vstack([x0] + [x0 + self.step * e for e in np.eye(x0.size)])
        minimize(f, x0, method="Nelder-Mead",
                 options={"initial_simplex": simplex, "fatol": self.f_tol, "xatol": self.x_tol,
                          "maxiter": self.max_iters})


class Adam(Optimizer):
    name = "adam"

    def __init__(self, lr: float = 0.05, max_iters: int = 200, h: float = 1e-4,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8,
                 initial_params: Sequence[float] | None = None):
        super().__init__(initial_params)
        self.lr, self.max_iters, self.h = lr, max_iters, h
        self.beta1, self.beta2, self.eps = beta1, beta2, eps

    def gradient(self, f: Objective, x: np.ndarray) -> np.ndarray:
        return central_difference(f, x, self.h)

    def _minimize(self, f: Objective, x0: np.ndarray) -> None:
        x = x0.copy()
        m = np.zeros_like(x)
        v = np.zeros_like(x)
        for t in range(1, self.max_iters + 1):
            g = self.gradient(f, x)
            m = self.beta1 * m + (1 - self.beta1) * g
            v = self.beta2 * v + (1 - self.beta2) * g * g
            m_hat = m / (1 - self.beta1 ** t)
            v_hat = v / (1 - self.beta2 ** t)
            x = x - self.lr * m_hat / (np.sqrt(v_hat) + self.eps)
            f(x)


_registry: dict[str, Callable[..., Optimizer]] = {"nelder-mead": NelderMead, "adam": Adam}
_lock = threading.Lock()


def register_optimizer(name: str, factory: Callable[..., Optimizer]) -> None:
    with _lock:
        _registry[name] = factory


def optimizer_names() -> list[str]:
    with _lock:
        return sorted(_registry)


def create_optimizer(name: str = "nelder-mead", **options) -> Optimizer:
    with _lock:
        factory = _registry.get(name)
    if factory is None:
        raise UnknownOptimizer(f"unknown optimizer {name!r}; available: {', '.join(optimizer_names())}")
    return factory(**options)
