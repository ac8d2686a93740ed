"""Mixed graphs: directed edges i->j with i < j plus bidirected edges i<->j.

Vertices are the integers 1..m.  The text form is ``"<m>; <directed>; <bidirected>"``,
for example ``"3; 1->2 2->3; 2<->3"`` for the instrumental-variable graph.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable

__all__ = [
    "GraphError",
    "MixedGraph",
    "parse_graph",
    "descendants",
    "directed_paths",
    "d_separated",
]

Edge = tuple[int, int]
DirectedPath = tuple[Edge, ...]


class GraphError(ValueError):
    """Invalid graph text or structure."""


@dataclass(frozen=True)
class MixedGraph:
    m: int
    directed: frozenset[Edge]
    bidirected: frozenset[Edge]

    def __init__(self, m: int, directed: Iterable[Edge] = (), bidirected: Iterable[Edge] = ()):
        if not isinstance(m, int) or m < 1:
            raise GraphError(f"vertex count must be a positive int, got {m!r}")
        d = set()
        for i, j in directed:
            _check_vertex(i, m)
            _check_vertex(j, m)
            if i == j:
                raise GraphError(f"self-loop {i}->{j}")
            if i > j:
                raise GraphError(f"directed edge {i}->{j} violates the topological order i < j")
            if (i, j) in d:
                raise GraphError(f"duplicate edge {i}->{j}")
            d.add((i, j))
        b = set()
        for i, j in bidirected:
            _check_vertex(i, m)
            _check_vertex(j, m)
            if i == j:
                raise GraphError(f"self-loop {i}<->{j}")
            e = (min(i, j), max(i, j))
            if e in b:
                raise GraphError(f"duplicate edge {e[0]}<->{e[1]}")
            b.add(e)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "directed", frozenset(d))
        object.__setattr__(self, "bidirected", frozenset(b))

    @property
    def vertices(self) -> range:
        return range(1, self.m + 1)

    @cached_property
    def sorted_directed(self) -> tuple[Edge, ...]:
        return tuple(sorted(self.directed))

    @cached_property
    def sorted_bidirected(self) -> tuple[Edge, ...]:
        return tuple(sorted(self.bidirected))

    @cached_property
    def children(self) -> dict[int, tuple[int, ...]]:
        out = {v: [] for v in self.vertices}
        for i, j in self.sorted_directed:
            out[i].append(j)
        return {v: tuple(c) for v, c in out.items()}

    @cached_property
    def parents(self) -> dict[int, tuple[int, ...]]:
        out = {v: [] for v in self.vertices}
        for i, j in self.sorted_directed:
            out[j].append(i)
        return {v: tuple(c) for v, c in out.items()}

    @cached_property
    def siblings(self) -> dict[int, tuple[int, ...]]:
        out = {v: [] for v in self.vertices}
        for i, j in self.sorted_bidirected:
            out[i].append(j)
            out[j].append(i)
        return {v: tuple(sorted(c)) for v, c in out.items()}

    def has_edge(self, i: int, j: int) -> bool:
        return (i, j) in self.directed

    def has_bidirected(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.bidirected

    def without_edge(self, i: int, j: int) -> "MixedGraph":
        if (i, j) not in self.directed:
            raise GraphError(f"no edge {i}->{j}")
        return MixedGraph(self.m, self.directed - {(i, j)}, self.bidirected)

    def without_outgoing(self, v: int) -> "MixedGraph":
        return MixedGraph(self.m, {e for e in self.directed if e[0] != v}, self.bidirected)

    def to_text(self) -> str:
        d = " ".join(f"{i}->{j}" for i, j in self.sorted_directed)
        b = " ".join(f"{i}<->{j}" for i, j in self.sorted_bidirected)
        return f"{self.m}; {d}; {b}".rstrip()

    def __str__(self) -> str:
        return self.to_text()


def _check_vertex(v: int, m: int) -> None:
    if not isinstance(v, int) or not 1 <= v <= m:
        raise GraphError(f"vertex {v!r} outside 1..{m}")


_DIR_RE = re.compile(r"^(\d+)\s*->\s*(\d+)$")
_BI_RE = re.compile(r"^(\d+)\s*<->\s*(\d+)$")


def _split_edges(section: str) -> list[str]:
    # whitespace around arrows is allowed, so normalise it away first
    section = re.sub(r"\s*(<->|->)\s*", r"\1", section.strip())
    return [tok for tok in re.split(r"[\s,]+", section) if tok]


def parse_graph(text: str) -> MixedGraph:
    """Parse ``"<m>; a->b ...; c<->d ..."``; missing trailing sections are empty."""
    parts = text.split(";")
    if len(parts) > 3 or not parts[0].strip():
        raise GraphError(f"expected '<m>; <directed>; <bidirected>', got {text!r}")
    try:
        m = int(parts[0].strip())
    except ValueError:
        raise GraphError(f"bad vertex count {parts[0].strip()!r}") from None
    directed, bidirected = [], []
    if len(parts) > 1:
        for tok in _split_edges(parts[1]):
            mt = _DIR_RE.match(tok)
            if not mt:
                raise GraphError(f"bad directed edge {tok!r}")
            directed.append((int(mt.group(1)), int(mt.group(2))))
    if len(parts) > 2:
        for tok in _split_edges(parts[2]):
            mt = _BI_RE.match(tok)
            if not mt:
                raise GraphError(f"bad bidirected edge {tok!r}")
            bidirected.append((int(mt.group(1)), int(mt.group(2))))
    if len(set(directed)) != len(directed):
        raise GraphError("duplicate directed edge")
    norm_b = [(min(e), max(e)) for e in bidirected]
    if len(set(norm_b)) != len(norm_b):
        raise GraphError("duplicate bidirected edge")
    return MixedGraph(m, directed, bidirected)


def descendants(g: MixedGraph, v: int) -> set[int]:
    """Vertices reachable from v along directed edges, v included."""
    _check_vertex(v, g.m)
    seen = {v}
    stack = [v]
    while stack:
        u = stack.pop()
        for w in g.children[u]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def ancestors(g: MixedGraph, vs: Iterable[int]) -> set[int]:
    seen = set(vs)
    stack = list(seen)
    while stack:
        u = stack.pop()
        for w in g.parents[u]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def directed_paths(g: MixedGraph, i: int, j: int) -> list[DirectedPath]:
    """All directed paths from i to j as edge tuples; ``[()]`` when i == j."""
    _check_vertex(i, g.m)
    _check_vertex(j, g.m)
    if i == j:
        return [()]
    out: list[DirectedPath] = []

    def walk(u: int, acc: list[Edge]) -> None:
        for w in g.children[u]:
            if w > j:
                continue
            acc.append((u, w))
            if w == j:
                out.append(tuple(acc))
            else:
                walk(w, acc)
            acc.pop()

    walk(i, [])
    return out


def path_vertices(path: DirectedPath) -> tuple[int, ...]:
    if not path:
        return ()
    return (path[0][0],) + tuple(e[1] for e in path)


# Edge marks at an endpoint: "head" if the edge has an arrowhead there.
_TAIL, _HEAD = 0, 1


def _incident(g: MixedGraph, v: int):
    """(neighbour, mark at v, mark at neighbour) for every edge touching v."""
    for w in g.parents[v]:
        yield w, _HEAD, _TAIL
    for w in g.children[v]:
        yield w, _TAIL, _HEAD
    for w in g.siblings[v]:
        yield w, _HEAD, _HEAD


def d_separated(g: MixedGraph, x: int, y: int, z: Iterable[int] = ()) -> bool:
    """True iff every path between x and y is blocked by z.

    A bidirected edge carries arrowheads at both ends.  A vertex on a path is a
    collider when both path edges point into it; a collider passes only if it
    or one of its descendants is in z, a non-collider only if it is not in z.
    """
    z = set(z)
    _check_vertex(x, g.m)
    _check_vertex(y, g.m)
    for v in z:
        _check_vertex(v, g.m)
    if x == y:
        raise GraphError("d-separation needs two distinct vertices")
    if x in z or y in z:
        raise GraphError("endpoints must not be in the conditioning set")
    an_z = ancestors(g, z)
    # states: (vertex, mark at vertex of the edge we arrived by)
    start = [(w, mw) for w, _, mw in _incident(g, x)]
    seen = set(start)
    stack = list(start)
    while stack:
        v, arrived = stack.pop()
        if v == y:
            return False
        for w, mv, mw in _incident(g, v):
            collider = arrived == _HEAD and mv == _HEAD
            if collider:
                if v not in an_z:
                    continue
            elif v in z:
                continue
            if w == x:
                continue
            st = (w, mw)
            if st not in seen:
                seen.add(st)
                stack.append(st)
    return True


def all_subsets(items: Iterable[int]):
    """Subsets by increasing size, lexicographic within a size."""
    items = sorted(items)
    for k in range(len(items) + 1):
        yield from (frozenset(c) for c in combinations(items, k))
