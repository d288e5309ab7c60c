"""Dummy-node augmentation and edge-to-vertex transforms.

`edge_to_vertex` builds the pruned transformed graph H_Phi in which every
original edge becomes a vertex, every original vertex id survives as the id
of the edges it induces, and a single dummy vertex Phi replaces the 2n
dummy-edge vertices of L(G_phi). `inverse_edge_to_vertex` recovers G exactly.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, asdict

from .graph import GraphError, LabeledDigraph, degrees
from .labels import DUMMY_EDGE, DUMMY_VERTEX

log = logging.getLogger(__name__)

PHI_LABELS = (DUMMY_VERTEX,)
DUMMY_EDGE_LABELS = (DUMMY_EDGE,)


class TransformError(GraphError):
    pass


def _next_edge_id(g: LabeledDigraph) -> int:
    return max((eid for eid, _ in g.edges.values()), default=-1) + 1


def augment_dummy(g: LabeledDigraph) -> LabeledDigraph:
    """G -> G_phi: one dummy vertex linked both ways to every vertex.

    The dummy gets id max(vertex id) + 1. For the i-th vertex v in ascending
    id order, (v, phi) gets edge id base + 2i and (phi, v) gets base + 2i + 1,
    where base is one past the largest existing edge id.
    """
    if g.dummy is not None:
        raise TransformError("graph already has a dummy vertex")
    phi = max(g.vertices, default=-1) + 1
    base = _next_edge_id(g)
    vs = dict(g.vertices)
    vs[phi] = PHI_LABELS
    es = dict(g.edges)
    for i, v in enumerate(sorted(g.vertices)):
        es[(v, phi)] = (base + 2 * i, DUMMY_EDGE_LABELS)
        es[(phi, v)] = (base + 2 * i + 1, DUMMY_EDGE_LABELS)
    return LabeledDigraph(vs, es)


def line_graph_records(g: LabeledDigraph):
    """Line graph of g keyed by the (src, dst) pair of each original edge.

    Returns (vertices, edges): vertices maps pair -> (edge_id, labels),
    edges is a list of (pair_d, pair_e, shared_vertex_id, shared_vertex_labels)
    in ascending (shared vertex, pair_d, pair_e) order. Keying by pair keeps
    this usable when edge ids repeat, as they do in transformed graphs.
    """
    verts = {pair: rec for pair, rec in sorted(g.edges.items())}
    edges = []
    for v in sorted(g.vertices):
        xs = g.vertices[v]
        for u in g.in_adj[v]:
            for w in g.out_adj[v]:
                edges.append(((u, v), (v, w), v, xs))
    return verts, edges


def line_graph(g: LabeledDigraph) -> LabeledDigraph:
    """Classical directed line graph L(G).

    Vertex ids are the original edge ids; an edge d -> e exists when d ends
    where e starts and carries that vertex's id and label set.
    """
    verts, edges = line_graph_records(g)
    vs = {}
    for eid, ls in verts.values():
        if eid in vs:
            raise GraphError(f"edge id {eid} repeats; line graph vertex ids would collide")
        vs[eid] = ls
    es = {(verts[d][0], verts[e][0]): (vid, xs) for d, e, vid, xs in edges}
    return LabeledDigraph(vs, es)


def _check_e2v_input(g: LabeledDigraph):
    if g.m == 0:
        raise TransformError("edge-to-vertex transform needs at least one edge")
    if g.dummy is not None:
        raise TransformError("graph already has a dummy vertex")
    isolated = [v for v in sorted(g.vertices) if not g.in_adj[v] and not g.out_adj[v]]
    if isolated:
        raise TransformError(f"isolated vertex {isolated[0]} would be lost by the transform")
    ids = Counter(eid for eid, _ in g.edges.values())
    dup = [eid for eid, c in ids.items() if c > 1]
    if dup:
        raise TransformError(f"edge id {min(dup)} repeats")


def drop_isolated(g: LabeledDigraph) -> LabeledDigraph:
    vs = {v: ls for v, ls in g.vertices.items() if g.in_adj[v] or g.out_adj[v]}
    if len(vs) == g.n:
        return g
    return LabeledDigraph(vs, dict(g.edges))


def edge_to_vertex(g: LabeledDigraph, method: str = "direct") -> LabeledDigraph:
    """G -> H_Phi.

    method="direct" builds H_Phi straight from G in O(sum d-*d+ + m);
    method="literal" materializes G_phi and L(G_phi) and prunes, step for
    step. Both produce identical graphs, ids included.
    """
    _check_e2v_input(g)
    if method == "literal":
        return _edge_to_vertex_literal(g)
    if method != "direct":
        raise ValueError(f"unknown method {method!r}")
    phi = _next_edge_id(g) + 2 * g.n
    X = g.vertices
    vs = {eid: ls for eid, ls in g.edges.values()}
    vs[phi] = PHI_LABELS
    es = {}
    for (u, v), (eid, _) in g.edges.items():
        es[(phi, eid)] = (u, X[u])
        es[(eid, phi)] = (v, X[v])
    E = g.edges
    for v in g.vertices:
        xs = X[v]
        for u in g.in_adj[v]:
            d = E[(u, v)][0]
            for w in g.out_adj[v]:
                es[(d, E[(v, w)][0])] = (v, xs)
    return LabeledDigraph(vs, es)


def _edge_to_vertex_literal(g: LabeledDigraph) -> LabeledDigraph:
    g_phi = augment_dummy(g)
    h_phi = line_graph(g_phi)
    phi = _next_edge_id(g_phi)
    return prune_dummy_line_graph(h_phi, phi)


def prune_dummy_line_graph(h_phi: LabeledDigraph, phi: int) -> LabeledDigraph:
    """Collapse the dummy-edge vertices of H_phi = L(G_phi) into one vertex Phi.

    Edges between two dummy-edge vertices are dropped (the n^2 edges through
    phi and the n edges through original vertices); an edge with one
    dummy-edge endpoint is rerouted to Phi keeping its id and labels.
    """
    if phi in h_phi.vertices:
        raise TransformError(f"id {phi} for Phi is taken")
    is_dummy = {v: DUMMY_EDGE in ls for v, ls in h_phi.vertices.items()}
    es = {}

    def add(pair, rec):
        if pair in es:
            raise TransformError(f"pruning produced parallel edge {pair}")
        es[pair] = rec

    for (u, v), rec in sorted(h_phi.edges.items()):
        if is_dummy[u] and is_dummy[v]:
            continue
        if is_dummy[u]:
            add((phi, v), rec)
        elif is_dummy[v]:
            add((u, phi), rec)
        else:
            add((u, v), rec)
    vs = {v: ls for v, ls in h_phi.vertices.items() if not is_dummy[v]}
    vs[phi] = PHI_LABELS
    return LabeledDigraph(vs, es)


def edge_to_vertex_lenient(g: LabeledDigraph) -> LabeledDigraph:
    """edge_to_vertex for dataset pipelines.

    Isolated vertices are dropped first. A graph with no edges maps to a lone
    Phi vertex. Both cases are logged.
    """
    if g.m == 0:
        log.warning("graph without edges: using a lone dummy vertex")
        return LabeledDigraph({_next_edge_id(g) + 2 * g.n: PHI_LABELS}, {})
    h = drop_isolated(g)
    if h.n != g.n:
        log.warning("dropping %d isolated vertices before the transform", g.n - h.n)
    return edge_to_vertex(h)


def inverse_edge_to_vertex(h: LabeledDigraph) -> LabeledDigraph:
    """H_Phi -> G.

    Vertices of L(H_Phi) with equal ids are merged (they are copies of one
    original vertex); the L(H_Phi) edges passing through Phi carry the dummy
    label and are removed, so they are never generated.
    """
    dummies = [v for v, ls in h.vertices.items() if DUMMY_VERTEX in ls]
    if len(dummies) != 1:
        raise TransformError(f"expected exactly one dummy vertex, found {len(dummies)}")
    phi = dummies[0]

    vs: dict[int, tuple] = {}
    for (a, b), (vid, xs) in sorted(h.edges.items()):
        prev = vs.setdefault(vid, xs)
        if prev != xs:
            raise TransformError(f"vertex id {vid} carries inconsistent labels")

    es: dict[tuple, tuple] = {}
    E = h.edges
    for w in sorted(h.vertices):
        if w == phi:
            continue
        ys = h.vertices[w]
        for a in h.in_adj[w]:
            src = E[(a, w)][0]
            for b in h.out_adj[w]:
                dst = E[(w, b)][0]
                if src == dst:
                    raise TransformError(f"self-loop at vertex {src} in recovered graph")
                prev = es.setdefault((src, dst), (w, ys))
                if prev != (w, ys):
                    raise TransformError(f"conflicting records for edge ({src},{dst})")
    return LabeledDigraph(vs, es)


@dataclass(frozen=True)
class TransformStats:
    n: int
    m: int
    v_g_phi: int
    e_g_phi: int
    v_h_phi: int
    e_h_phi: int
    v_h_Phi: int
    e_h_Phi: int

    def as_dict(self):
        return asdict(self)


def closed_form_stats(g: LabeledDigraph) -> TransformStats:
    n, m = g.n, g.m
    deg = [degrees(g, v) for v in g.vertices]
    return TransformStats(
        n=n,
        m=m,
        v_g_phi=n + 1,
        e_g_phi=m + 2 * n,
        v_h_phi=m + 2 * n,
        e_h_phi=n * n + sum((a + 1) * (b + 1) for a, b in deg),
        v_h_Phi=m + 1,
        e_h_Phi=sum(a * b + a + b for a, b in deg),
    )


def transform_stats(g: LabeledDigraph, full: bool = True) -> TransformStats:
    """Sizes of G, G_phi, H_phi and H_Phi, computed from degrees and checked
    against the materialized graphs.

    With full=False, H_phi is not built; its sizes are counted on the
    materialized G_phi instead (H_phi has O(n^2) edges).
    """
    closed = closed_form_stats(g)
    g_phi = augment_dummy(g)
    if full:
        h_phi = line_graph(g_phi)
        v_h_phi, e_h_phi = h_phi.n, h_phi.m
    else:
        v_h_phi = g_phi.m
        e_h_phi = sum(len(g_phi.in_adj[v]) * len(g_phi.out_adj[v]) for v in g_phi.vertices)
    h = edge_to_vertex_lenient(g)
    seen = TransformStats(
        n=g.n, m=g.m,
        v_g_phi=g_phi.n, e_g_phi=g_phi.m,
        v_h_phi=v_h_phi, e_h_phi=e_h_phi,
        v_h_Phi=h.n, e_h_Phi=h.m,
    )
    if seen != closed:
        raise TransformError(f"size mismatch: closed form {closed} vs materialized {seen}")
    return closed


def label_copy_counts(h: LabeledDigraph) -> Counter:
    """Number of edges of a line-graph-like h carrying each (vertex id, labels)."""
    return Counter(rec for rec in h.edges.values())
