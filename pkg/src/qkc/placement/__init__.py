"""Qubit placement onto hardware coupling graphs."""

from .graph import BUILTIN_GRAPHS, CouplingGraph, load_graph
from .router import (
    STRATEGIES, PlacementResult, apply_qubit_map, place, route_sabre, route_ssp, verify_placement,
)

__all__ = [
    "BUILTIN_GRAPHS", "CouplingGraph", "load_graph", "STRATEGIES", "PlacementResult",
    "apply_qubit_map", "place", "route_sabre", "route_ssp", "verify_placement",
]
