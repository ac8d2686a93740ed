"""Graphical identification criteria: single-door, instrumental variable, back-door.

All searches are exhaustive over conditioning sets (smallest first, then
lexicographic), which is exponential in the number of vertices but trivial for
the 3- and 4-vertex censuses.
"""

from __future__ import annotations

from dataclasses import dataclass

from .semgraph import GraphError, MixedGraph, all_subsets, d_separated, descendants

__all__ = [
    "CriterionResult",
    "single_door",
    "instrumental_variable",
    "back_door",
    "is_bow_free",
    "criteria_table",
]


@dataclass(frozen=True)
class CriterionResult:
    criterion: str
    satisfied: bool
    witness: frozenset[int] | int | None = None

    def __post_init__(self):
        if self.satisfied != (self.witness is not None):
            raise ValueError("a witness is present exactly when the criterion holds")

    def describe(self) -> str:
        if not self.satisfied:
            return "NO"
        if isinstance(self.witness, frozenset):
            return "YES (Z={" + ", ".join(map(str, sorted(self.witness))) + "})"
        return f"YES (z={self.witness})"


def _require_edge(g: MixedGraph, i: int, j: int) -> None:
    if (i, j) not in g.directed:
        raise GraphError(f"no edge {i}->{j}")


def single_door(g: MixedGraph, i: int, j: int) -> CriterionResult:
    """Z avoids descendants of j and d-separates i, j once the edge i->j is removed."""
    _require_edge(g, i, j)
    h = g.without_edge(i, j)
    forbidden = descendants(g, j)
    candidates = [v for v in g.vertices if v not in (i, j) and v not in forbidden]
    for z in all_subsets(candidates):
        if d_separated(h, i, j, z):
            return CriterionResult("single-door", True, z)
    return CriterionResult("single-door", False)


def instrumental_variable(g: MixedGraph, i: int, j: int) -> CriterionResult:
    """Unconditional instrument z: with i->j removed, z is d-separated from j
    and d-connected to i."""
    _require_edge(g, i, j)
    h = g.without_edge(i, j)
    for z in g.vertices:
        if z in (i, j):
            continue
        if d_separated(h, z, j) and not d_separated(h, z, i):
            return CriterionResult("instrumental variable", True, z)
    return CriterionResult("instrumental variable", False)


def back_door(g: MixedGraph, i: int, j: int) -> CriterionResult:
    """Z avoids descendants of i and blocks every path from i to j that starts
    with an arrowhead at i (bidirected edges at i included)."""
    if not i < j:
        raise GraphError("back-door needs i < j")
    h = g.without_outgoing(i)
    forbidden = descendants(g, i)
    candidates = [v for v in g.vertices if v not in (i, j) and v not in forbidden]
    for z in all_subsets(candidates):
        if d_separated(h, i, j, z):
            return CriterionResult("back-door", True, z)
    return CriterionResult("back-door", False)


def is_bow_free(g: MixedGraph) -> bool:
    return not (g.directed & g.bidirected)


def criteria_table(g: MixedGraph) -> dict:
    """Per-edge single-door/IV results, per-pair back-door results, bow-freeness."""
    edges = {}
    for i, j in g.sorted_directed:
        edges[(i, j)] = {
            "single_door": single_door(g, i, j),
            "instrumental_variable": instrumental_variable(g, i, j),
        }
    pairs = {}
    for i in g.vertices:
        for j in g.vertices:
            if i < j:
                pairs[(i, j)] = back_door(g, i, j)
    return {"edges": edges, "back_door": pairs, "bow_free": is_bow_free(g)}
