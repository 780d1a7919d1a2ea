"""Backend decorators and the mitigation chain builder."""

from __future__ import annotations

import threading
from typing import Callable, Iterable

from ..backend.simulator import Backend
from ..errors import UnknownMitigation


class MitigatedBackend(Backend):
    """A backend that pre- and post-processes executions of an inner backend."""

    supports_streaming = False

    def __init__(self, inner: Backend):
        self.inner = inner

    @property
    def name(self) -> str:  # type: ignore[override]
        return f"{type(self).__name__}({self.inner.name})"


_registry: dict[str, Callable[[Backend], MitigatedBackend]] = {}
_lock = threading.Lock()


def register_mitigation(name: str, factory: Callable[[Backend], MitigatedBackend]) -> None:
    with _lock:
        _registry[name] = factory


def mitigation_names() -> list[str]:
    with _lock:
        return sorted(_registry)


def build_chain(backend: Backend, names: Iterable[str]) -> Backend:
    """Wrap ``backend`` so the first listed decorator sits closest to it.

    Each later decorator therefore sees the earlier ones as part of its
    backend, which is the order the decorators run in.
    """
    names = list(names)
    with _lock:
        missing = [n for n in names if n not in _registry]
        factories = [_registry.get(n) for n in names]
    if missing:
        raise UnknownMitigation(
            f"unknown mitigation {missing[0]!r}; available: {', '.join(mitigation_names())}")
    for factory in factories:
        backend = factory(backend)
    return backend
