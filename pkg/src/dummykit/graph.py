"""Directed graphs with label sets on vertices and edges.

A graph stores one record per ordered vertex pair; multiedges are expected to
be merged into the edge's label set before construction. Graphs are treated
as immutable once built.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple, Optional

from .labels import DUMMY_VERTEX, LabelSet, labelset

Edge = tuple  # (src, dst)

ISO_VERTEX_LIMIT = 16


class GraphError(ValueError):
    pass


class DegreeProfile(NamedTuple):
    indegree: int
    outdegree: int


@dataclass(frozen=True)
class LabeledDigraph:
    vertices: Mapping[int, LabelSet]
    # (src, dst) -> (edge_id, labels)
    edges: Mapping[Edge, tuple[int, LabelSet]]

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def dummy(self) -> Optional[int]:
        """Id of the vertex carrying the dummy label, if any."""
        for v, ls in self.vertices.items():
            if DUMMY_VERTEX in ls:
                return v
        return None

    @cached_property
    def out_adj(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {v: [] for v in self.vertices}
        for u, v in sorted(self.edges):
            if u in adj:
                adj[u].append(v)
        return adj

    @cached_property
    def in_adj(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {v: [] for v in self.vertices}
        for u, v in sorted(self.edges):
            if v in adj:
                adj[v].append(u)
        return adj

    def vertex_ids(self) -> list[int]:
        return sorted(self.vertices)

    def edge_records(self) -> list[tuple[int, int, int, LabelSet]]:
        """(edge_id, src, dst, labels) in ascending (src, dst) order."""
        return [(eid, u, v, ls) for (u, v), (eid, ls) in sorted(self.edges.items())]

    def __repr__(self):
        return f"LabeledDigraph(n={self.n}, m={self.m})"


def make_graph(
    vertices: Mapping[int, Iterable[int]] | Iterable[tuple[int, Iterable[int]]],
    edges: Iterable[tuple[int, int, int, Iterable[int]]] = (),
) -> LabeledDigraph:
    """Build and validate a graph.

    `edges` holds (edge_id, src, dst, labels) records; a repeated (src, dst)
    pair is an error here, callers merge multiedges first.
    """
    items = vertices.items() if isinstance(vertices, Mapping) else vertices
    vs: dict[int, LabelSet] = {}
    for v, ls in items:
        if v in vs:
            raise GraphError(f"duplicate vertex id {v}")
        vs[int(v)] = labelset(ls)
    es: dict[Edge, tuple[int, LabelSet]] = {}
    for eid, u, v, ls in edges:
        if (u, v) in es:
            raise GraphError(f"parallel edge ({u},{v})")
        es[(int(u), int(v))] = (int(eid), labelset(ls))
    g = LabeledDigraph(vs, es)
    problems = validate(g)
    if problems:
        raise GraphError("; ".join(problems))
    return g


def validate(g: LabeledDigraph) -> list[str]:
    out = []
    for v, ls in g.vertices.items():
        if tuple(ls) != labelset(ls):
            out.append(f"label set of vertex {v} not canonical")
    dummies = [v for v, ls in g.vertices.items() if DUMMY_VERTEX in ls]
    if len(dummies) > 1:
        out.append(f"multiple dummy vertices {sorted(dummies)}")
    for (u, v), (eid, ls) in g.edges.items():
        if u == v:
            out.append(f"self-loop at vertex {u}")
        for x in (u, v):
            if x not in g.vertices:
                out.append(f"dangling endpoint {x} on edge {eid}")
        if tuple(ls) != labelset(ls):
            out.append(f"label set of edge {eid} not canonical")
    return out


def degrees(g: LabeledDigraph, v: int) -> DegreeProfile:
    if v not in g.vertices:
        raise GraphError(f"unknown vertex {v}")
    return DegreeProfile(len(g.in_adj[v]), len(g.out_adj[v]))


def degree_partition(g: LabeledDigraph) -> tuple[set, set, set]:
    """Sources S (indegree 0), sinks T (outdegree 0) and the rest U.

    Isolated vertices belong to both S and T.
    """
    s = {v for v in g.vertices if not g.in_adj[v]}
    t = {v for v in g.vertices if not g.out_adj[v]}
    u = set(g.vertices) - s - t
    return s, t, u


def permute(g: LabeledDigraph, pi: Mapping[int, int]) -> LabeledDigraph:
    if set(pi) != set(g.vertices) or len(set(pi.values())) != len(pi):
        raise GraphError("permutation must be a bijection on the vertex set")
    vs = {pi[v]: ls for v, ls in g.vertices.items()}
    es = {(pi[u], pi[v]): rec for (u, v), rec in g.edges.items()}
    return LabeledDigraph(vs, es)


def weakly_connected(g: LabeledDigraph) -> bool:
    if not g.vertices:
        return True
    start = next(iter(g.vertices))
    seen = {start}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for y in g.out_adj[x] + g.in_adj[x]:
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return len(seen) == g.n


def _refine_jointly(g1: LabeledDigraph, g2: LabeledDigraph):
    """Stable color refinement over the disjoint union of two graphs."""
    palette: dict = {}

    def intern(key):
        return palette.setdefault(key, len(palette))

    graphs = (g1, g2)
    colors = [
        {v: intern((ls, len(g.in_adj[v]), len(g.out_adj[v]))) for v, ls in g.vertices.items()}
        for g in graphs
    ]
    n_classes = len(set(colors[0].values()) | set(colors[1].values()))
    while True:
        palette = {}
        new = []
        for g, col in zip(graphs, colors):
            nc = {}
            for v in g.vertices:
                ins = sorted((g.edges[(u, v)][1], col[u]) for u in g.in_adj[v])
                outs = sorted((g.edges[(v, u)][1], col[u]) for u in g.out_adj[v])
                nc[v] = intern((col[v], tuple(ins), tuple(outs)))
            new.append(nc)
        k = len(set(new[0].values()) | set(new[1].values()))
        colors = new
        if k == n_classes:
            return colors
        n_classes = k


def is_isomorphic(g1: LabeledDigraph, g2: LabeledDigraph) -> Optional[dict[int, int]]:
    """Exact labeled isomorphism test by backtracking.

    Returns a vertex bijection g1 -> g2 preserving vertex label sets, edges
    and edge label sets, or None. Vertex and edge ids are ignored.
    """
    if g1.n > ISO_VERTEX_LIMIT or g2.n > ISO_VERTEX_LIMIT:
        raise GraphError(f"isomorphism check limited to {ISO_VERTEX_LIMIT} vertices")
    if g1.n != g2.n or g1.m != g2.m:
        return None
    if g1.n == 0:
        return {}
    c1, c2 = _refine_jointly(g1, g2)
    if sorted(c1.values()) != sorted(c2.values()):
        return None
    by_color: dict[int, list[int]] = {}
    for v in sorted(g2.vertices):
        by_color.setdefault(c2[v], []).append(v)

    # most constrained first, then stay adjacent to what is already placed
    order: list[int] = []
    placed: set = set()
    remaining = set(g1.vertices)
    while remaining:
        frontier = [v for v in remaining if any(
            u in placed for u in g1.out_adj[v] + g1.in_adj[v])]
        pool = frontier or list(remaining)
        v = min(pool, key=lambda x: (len(by_color[c1[x]]), x))
        order.append(v)
        placed.add(v)
        remaining.discard(v)

    e1, e2 = g1.edges, g2.edges
    f: dict[int, int] = {}
    used: set = set()

    def consistent(u, x):
        for w, y in f.items():
            a, b = e1.get((u, w)), e2.get((x, y))
            if (a is None) != (b is None) or (a is not None and a[1] != b[1]):
                return False
            a, b = e1.get((w, u)), e2.get((y, x))
            if (a is None) != (b is None) or (a is not None and a[1] != b[1]):
                return False
        return True

    def search(i):
        if i == len(order):
            return True
        u = order[i]
        for x in by_color[c1[u]]:
            if x in used or not consistent(u, x):
                continue
            f[u] = x
            used.add(x)
            if search(i + 1):
                return True
            del f[u]
            used.discard(x)
        return False

    return dict(f) if search(0) else None
