"""Backend selector strings such as ``sim``, ``sim:seed=3`` or ``sim[noise-model:n.json]``."""

from __future__ import annotations

import re
import threading
from typing import Callable

from ..errors import BackendError, UnknownBackend
from .noise import NoiseModel, load_noise_model
from .simulator import Backend, StatevectorBackend

BackendFactory = Callable[[dict[str, str], "int | None"], Backend]

_SELECTOR = re.compile(r"^\s*([A-Za-z_][\w\-]*)\s*(?:\[(.*)\]|:(.*))?\s*$")


def parse_selector(text: str) -> tuple[str, dict[str, str]]:
    """Split a selector into its backend name and options.

    Options are comma separated; each uses ``=`` or ``:`` between key and value.
    """
    m = _SELECTOR.match(text or "")
    if not m:
        raise UnknownBackend(f"malformed backend selector {text!r}")
    name, body = m.group(1), m.group(2) if m.group(2) is not None else m.group(3)
    options: dict[str, str] = {}
    for item in filter(None, (s.strip() for s in (body or "").split(","))):
        key, sep, value = item.partition("=") if "=" in item else item.partition(":")
        if not sep or not key.strip():
            raise BackendError(f"backend option {item!r} needs the form key=value")
        options[key.strip()] = value.strip()
    return name, options


def _make_sim(options: dict[str, str], seed: int | None) -> Backend:
    unknown = set(options) - {"noise-model", "seed"}
    if unknown:
        raise BackendError(f"unknown sim option(s): {', '.join(sorted(unknown))}")
    noise = load_noise_model(options["noise-model"]) if "noise-model" in options else NoiseModel()
    if "seed" in options:
        try:
            seed = int(options["seed"])
        except ValueError:
            raise BackendError(f"seed must be an integer, got {options['seed']!r}") from None
    return StatevectorBackend(noise=noise, seed=seed)


_factories: dict[str, BackendFactory] = {"sim": _make_sim}
_lock = threading.Lock()


def register_backend(name: str, factory: BackendFactory) -> None:
    """Make ``factory(options, seed)`` available under ``name``."""
    with _lock:
        _factories[name] = factory


def backend_names() -> list[str]:
    with _lock:
        return sorted(_factories)


def make_backend(selector: str | Backend, seed: int | None = None) -> Backend:
    """Instantiate a backend from a selector; an existing Backend passes through."""
    if isinstance(selector, Backend):
        return selector
    name, options = parse_selector(selector)
    with _lock:
        factory = _factories.get(name)
    if factory is None:
        raise UnknownBackend(f"unknown backend {name!r}; available: {', '.join(backend_names())}")
    return factory(options, seed)
