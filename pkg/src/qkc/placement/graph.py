"""Hardware coupling graphs."""

from __future__ import annotations

import json
import os
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from ..errors import PlacementError

_FIVE_T = ((0, 1), (1, 2), (1, 3), (3, 4))
_BOWTIE = ((0, 1), (0, 2), (1, 2), (2, 3), (2, 4), (3, 4))
_HEAVY_HEX_27 = (
    (0, 1), (1, 2), (1, 4), (2, 3), (3, 5), (4, 7), (5, 8), (6, 7), (7, 10), (8, 9), (8, 11),
    (10, 12), (11, 14), (12, 13), (12, 15), (13, 14), (14, 16), (15, 18), (16, 19), (17, 18),
    (18, 21), (19, 20), (19, 22), (21, 23), (22, 25), (23, 24), (24, 25), (25, 26),
)
BUILTIN_GRAPHS: dict[str, tuple[int, tuple[tuple[int, int], ...]]] = {
    "vigo": (5, _FIVE_T),
    "ourense": (5, _FIVE_T),
    "yorktown": (5, _BOWTIE),
    "heavy_hex_27": (27, _HEAVY_HEX_27),
}


@dataclass(frozen=True)
class CouplingGraph:
    n_physical: int
    edges: frozenset[tuple[int, int]] = field(default_factory=frozenset)
    name: str = "custom"

    def __post_init__(self):
        norm = set()
        for a, b in self.edges:
            a, b = int(a), int(b)
            if a == b:
                raise PlacementError(f"self-loop on qubit {a}")
            if not (0 <= a < self.n_physical and 0 <= b < self.n_physical):
                raise PlacementError(f"edge ({a}, {b}) outside {self.n_physical} physical qubits")
            norm.add((min(a, b), max(a, b)))
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def from_edges(cls, n: int, edges, name: str = "custom") -> "CouplingGraph":
        return cls(int(n), frozenset(tuple(e) for e in edges), name)

    @classmethod
    def line(cls, n: int) -> "CouplingGraph":
        return cls.from_edges(n, [(i, i + 1) for i in range(n - 1)], f"line{n}")

    def has_edge(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in self.edges

    @cached_property
    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self.n_physical)]
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return tuple(tuple(sorted(n)) for n in adj)

    @cached_property
    def distance(self) -> np.ndarray:
        """All-pairs hop distance; unreachable pairs are -1."""
        d = np.full((self.n_physical, self.n_physical), -1, dtype=int)
        for s in range(self.n_physical):
            d[s, s] = 0
            queue = deque([s])
            while queue:
                u = queue.popleft()
                for v in self.neighbors[u]:
                    if d[s, v] < 0:
                        d[s, v] = d[s, u] + 1
                        queue.append(v)
        return d

    def shortest_path(self, a: int, b: int) -> list[int]:
        """BFS path from ``a`` to ``b``; ties broken toward lower indices."""
        prev = {a: a}
        queue = deque([a])
        while queue:
            u = queue.popleft()
            if u == b:
                break
            for v in self.neighbors[u]:
                if v not in prev:
                    prev[v] = u
                    queue.append(v)
        if b not in prev:
            return []
        path = [b]
        while path[-1] != a:
            path.append(prev[path[-1]])
        return path[::-1]

    def connected(self, nodes) -> bool:
        nodes = list(nodes)
        return all(self.distance[nodes[0], v] >= 0 for v in nodes) if nodes else True

    def to_json(self) -> dict:
        return {"n": self.n_physical, "edges": sorted(list(e) for e in self.edges)}


def load_graph(source: str | os.PathLike) -> CouplingGraph:
    """A built-in graph by name, or a JSON file ``{"n": 5, "edges": [[0, 1], ...]}``."""
    key = str(source)
    if key in BUILTIN_GRAPHS:
        n, edges = BUILTIN_GRAPHS[key]
        return CouplingGraph.from_edges(n, edges, key)
    path = Path(key)
    if not path.exists():
        raise PlacementError(
            f"unknown coupling graph {key!r}; built-in graphs: {', '.join(sorted(BUILTIN_GRAPHS))}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
        return CouplingGraph.from_edges(int(data["n"]), [tuple(e) for e in data["edges"]], path.stem)
    except (ValueError, KeyError, TypeError) as exc:
        raise PlacementError(f"{path}: invalid coupling graph JSON ({exc})") from None
