"""Random and hand-built test graphs."""

from __future__ import annotations

import numpy as np

from .graph import LabeledDigraph, make_graph
from .labels import UNIVERSE, LabelUniverse

VERTEX_ALPHABET = "abcdefgh"
EDGE_ALPHABET = "ABCDEFGH"


def _labels(rng, alphabet, k, universe, multi):
    size = 2 if multi and k > 1 and rng.random() < 0.15 else 1
    picks = rng.choice(k, size=size, replace=False)
    return universe.labels(*(alphabet[i] for i in picks))


def random_digraph(
    rng: np.random.Generator,
    n: int,
    p: float = 0.3,
    vertex_labels: int = 3,
    edge_labels: int = 2,
    connected: bool = True,
    max_edges: int | None = None,
    multi_labels: bool = True,
    universe: LabelUniverse = UNIVERSE,
) -> LabeledDigraph:
    """Random labeled digraph on vertices 0..n-1.

    With connected=True a random oriented spanning tree is laid down first, so
    the result is weakly connected and (for n >= 2) has no isolated vertex.
    Extra ordered pairs are added with probability p, capped at max_edges.
    """
    pairs = set()
    if connected:
        order = rng.permutation(n)
        for i in range(1, n):
            a, b = int(order[i]), int(order[rng.integers(i)])
            pairs.add((a, b) if rng.random() < 0.5 else (b, a))
    cap = max_edges if max_edges is not None else n * (n - 1)
    extra = [(u, v) for u in range(n) for v in range(n) if u != v and (u, v) not in pairs]
    rng.shuffle(extra)
    for u, v in extra:
        if len(pairs) >= cap:
            break
        if rng.random() < p:
            pairs.add((int(u), int(v)))
    vs = {v: _labels(rng, VERTEX_ALPHABET, vertex_labels, universe, multi_labels) for v in range(n)}
    edges = [
        (i, u, v, _labels(rng, EDGE_ALPHABET, edge_labels, universe, multi_labels))
        for i, (u, v) in enumerate(sorted(pairs))
    ]
    return make_graph(vs, edges)


def random_permutation(rng: np.random.Generator, g: LabeledDigraph) -> dict[int, int]:
    ids = sorted(g.vertices)
    return dict(zip(ids, (ids[i] for i in rng.permutation(len(ids)))))


def claw(kind: str, center="c", leaves=("x", "y", "z"), edge_labels=("A", "A", "A"),
         universe: LabelUniverse = UNIVERSE) -> LabeledDigraph:
    """Directed 3-claws with center 0 and leaves 1..3.

    kind "a": leaf 1 -> center -> leaves 2, 3
    kind "b": center -> all leaves (out-star)
    kind "c": leaves 1, 2 -> center -> leaf 3
    kind "d": all leaves -> center (in-star)
    """
    into = {"a": (1,), "b": (), "c": (1, 2), "d": (1, 2, 3)}[kind]
    vs = {0: universe.labels(center)}
    edges = []
    for i, leaf in enumerate(leaves, start=1):
        vs[i] = universe.labels(leaf)
        pair = (i, 0) if i in into else (0, i)
        edges.append((i - 1, *pair, universe.labels(edge_labels[i - 1])))
    return make_graph(vs, edges)


def path2(src_label: str, dst_label: str, edge_label: str = "A",
          universe: LabelUniverse = UNIVERSE) -> LabeledDigraph:
    """Single edge 0 -> 1."""
    return make_graph(
        {0: universe.labels(src_label), 1: universe.labels(dst_label)},
        [(0, 0, 1, universe.labels(edge_label))],
    )


def write_synthetic_tudataset(directory, name: str, n_graphs: int, seed: int = 0,
                              mean_nodes: int = 30, node_labels: int = 10,
                              edge_labels: int = 0) -> None:
    """Write molecule-like undirected graphs in TUDataset layout.

    Each graph is a random tree plus a few ring-closing edges. The class
    depends on whether label 0 sits next to label 1 somewhere, flipped with
    probability 0.1, so kernels that see labeled neighborhoods can learn it.
    """
    import os

    rng = np.random.default_rng(seed)
    os.makedirs(directory, exist_ok=True)
    indicator, nlab, rows, elab, glab = [], [], [], [], []
    offset = 0
    for gid in range(1, n_graphs + 1):
        n = max(2, int(rng.poisson(mean_nodes)))
        labels = rng.integers(node_labels, size=n)
        pairs = set()
        for i in range(1, n):
            j = int(rng.integers(i))
            pairs.add((j, i))
        for _ in range(int(rng.integers(0, 3))):
            a, b = sorted(int(x) for x in rng.choice(n, 2, replace=False))
            pairs.add((a, b))
        hit = any({labels[a], labels[b]} == {0, 1} for a, b in pairs)
        cls = int(hit) ^ int(rng.random() < 0.1)
        for v in range(n):
            indicator.append(gid)
            nlab.append(int(labels[v]))
        for a, b in sorted(pairs):
            lab = int(rng.integers(edge_labels)) if edge_labels else None
            for x, y in ((a, b), (b, a)):
                rows.append(f"{x + offset + 1}, {y + offset + 1}")
                elab.append(lab)
        glab.append(cls)
        offset += n

    def dump(suffix, items):
        with open(os.path.join(directory, f"{name}_{suffix}.txt"), "w") as fh:
            fh.writelines(f"{x}\n" for x in items)

    dump("A", rows)
    dump("graph_indicator", indicator)
    dump("graph_labels", glab)
    dump("node_labels", nlab)
    if edge_labels:
        dump("edge_labels", elab)
