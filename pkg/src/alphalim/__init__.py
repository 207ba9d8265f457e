"""Alpha-limit sets of continuous maps on finite-resolution model spaces."""

from .spaces import ClosedSet, Pt, Region, Space, arc_join, build_named_space, is_clopen
from .maps import IntervalPL, MapSpec, build_named_map, evaluate, horseshoe3
from .graph import CellGraph, transition_graph

__all__ = [
    "CellGraph", "ClosedSet", "IntervalPL", "MapSpec", "Pt", "Region", "Space",
    "arc_join", "build_named_map", "build_named_space", "evaluate", "horseshoe3",
    "is_clopen", "transition_graph",
]
