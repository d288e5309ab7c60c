"""Graph kernels on labeled digraphs and Gram-matrix assembly.

Every base kernel is a dot product of sparse count vectors, so a Gram matrix
is X @ X.T over an integer feature matrix and exact in float64.
"""

from __future__ import annotations

import logging
import math
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Hashable, Sequence

import numpy as np
import scipy.sparse as sp

from .graph import LabeledDigraph
from .transform import augment_dummy, edge_to_vertex_lenient

log = logging.getLogger(__name__)

BASES = ("wl", "wloa", "sp", "gr")
VARIANTS = ("plain", "dummy", "e2v")
ITERATED = ("wl", "wloa")
DEFAULT_H = 5


class Vocabulary:
    """Collision-free feature ids: each distinct key gets the next integer."""

    def __init__(self):
        self._ids: dict[Hashable, int] = {}

    def __call__(self, key: Hashable) -> int:
        ids = self._ids
        i = ids.get(key)
        if i is None:
            i = ids[key] = len(ids)
        return i

    def __len__(self):
        return len(self._ids)


DEFAULT_VOCAB = Vocabulary()


@dataclass
class FeatureVector:
    counts: dict[int, int]
    vocab: Vocabulary = field(repr=False, compare=False)

    def dot(self, other: "FeatureVector") -> float:
        if self.vocab is not other.vocab:
            raise ValueError("feature vectors come from different vocabularies")
        a, b = self.counts, other.counts
        if len(a) > len(b):
            a, b = b, a
        return float(sum(c * b[k] for k, c in a.items() if k in b))

    def __eq__(self, other):
        return isinstance(other, FeatureVector) and self.counts == other.counts


def _vector(counter: Counter, vocab) -> FeatureVector:
    return FeatureVector({k: c for k, c in counter.items() if c}, vocab)


# ---------------------------------------------------------------- WL family

def wl_blocks(g: LabeledDigraph, h: int, vocab: Vocabulary) -> list[Counter]:
    """Color histograms of refinement rounds 0..h (one Counter per round).

    Round 0 colors a vertex by its label set; round t+1 by its round-t color
    plus the sorted multisets of (edge labels, neighbor color) over in- and
    out-neighbors. Colors are vocabulary ids of keys tagged with the round,
    so rounds never share ids.
    """
    if h < 0:
        raise ValueError("h must be >= 0")
    E = g.edges
    vids = list(g.vertices)
    ins = {v: [(E[(u, v)][1], u) for u in g.in_adj[v]] for v in vids}
    outs = {v: [(E[(v, u)][1], u) for u in g.out_adj[v]] for v in vids}
    col = {v: vocab((0, g.vertices[v])) for v in vids}
    blocks = [Counter(col.values())]
    for t in range(1, h + 1):
        col = {
            v: vocab((
                t,
                col[v],
                tuple(sorted((ls, col[u]) for ls, u in ins[v])),
                tuple(sorted((ls, col[u]) for ls, u in outs[v])),
            ))
            for v in vids
        }
        blocks.append(Counter(col.values()))
    return blocks


def wl_features(g: LabeledDigraph, h: int = DEFAULT_H, vocab: Vocabulary | None = None) -> FeatureVector:
    vocab = DEFAULT_VOCAB if vocab is None else vocab
    total = Counter()
    for b in wl_blocks(g, h, vocab):
        total.update(b)
    return _vector(total, vocab)


def wl_kernel(f1: FeatureVector, f2: FeatureVector) -> float:
    return f1.dot(f2)


def wloa_kernel(g1: LabeledDigraph, g2: LabeledDigraph, h: int = DEFAULT_H) -> float:
    """Histogram intersection summed over refinement rounds 0..h."""
    vocab = Vocabulary()
    total = 0
    for b1, b2 in zip(wl_blocks(g1, h, vocab), wl_blocks(g2, h, vocab)):
        total += sum(min(c, b2[k]) for k, c in b1.items() if k in b2)
    return float(total)


def _unary(block: Counter, vocab: Vocabulary) -> Counter:
    # min(a, b) = sum_k [a >= k][b >= k]: expand each count into indicator slots
    out = Counter()
    for color, c in block.items():
        for k in range(1, c + 1):
            out[vocab(("oa", color, k))] = 1
    return out


# ---------------------------------------------------------------- shortest path

def sp_counts(g: LabeledDigraph, vocab: Vocabulary) -> Counter:
    """(label set of u, label set of v, directed BFS distance) over ordered
    pairs u != v with v reachable from u."""
    X = g.vertices
    out = Counter()
    for s in g.vertices:
        dist = {s: 0}
        queue = deque([s])
        while queue:
            x = queue.popleft()
            for y in g.out_adj[x]:
                if y not in dist:
                    dist[y] = dist[x] + 1
                    queue.append(y)
        xs = X[s]
        for t, d in dist.items():
            if t != s:
                out[vocab(("sp", xs, X[t], d))] += 1
    return out


def sp_features(g: LabeledDigraph, vocab: Vocabulary | None = None) -> FeatureVector:
    vocab = DEFAULT_VOCAB if vocab is None else vocab
    return _vector(sp_counts(g, vocab), vocab)


def sp_kernel(g1: LabeledDigraph, g2: LabeledDigraph) -> float:
    vocab = Vocabulary()
    return sp_features(g1, vocab).dot(sp_features(g2, vocab))


# ---------------------------------------------------------------- graphlets

def graphlet_counts(g: LabeledDigraph) -> tuple[int, int, int, int]:
    """Induced 3-vertex subgraph counts of the underlying undirected simple
    graph: (no edge, one edge, two edges, triangle)."""
    nbrs = {v: set() for v in g.vertices}
    for u, v in g.edges:
        nbrs[u].add(v)
        nbrs[v].add(u)
    n = len(nbrs)
    n_edges = sum(len(s) for s in nbrs.values()) // 2
    wedges = sum(len(s) * (len(s) - 1) // 2 for s in nbrs.values())
    tri3 = 0  # each triangle seen once per edge
    for u, su in nbrs.items():
        for v in su:
            if u < v:
                tri3 += len(su & nbrs[v])
    tri = tri3 // 3
    two = wedges - 3 * tri
    one = n_edges * (n - 2) - 2 * two - 3 * tri if n >= 2 else 0
    zero = math.comb(n, 3) - one - two - tri
    return zero, one, two, tri


def gr_features(g: LabeledDigraph, vocab: Vocabulary | None = None) -> FeatureVector:
    vocab = DEFAULT_VOCAB if vocab is None else vocab
    counts = Counter({vocab(("gr", i)): c for i, c in enumerate(graphlet_counts(g))})
    return _vector(counts, vocab)


def gr_kernel(g1: LabeledDigraph, g2: LabeledDigraph) -> float:
    vocab = Vocabulary()
    return gr_features(g1, vocab).dot(gr_features(g2, vocab))


# ---------------------------------------------------------------- specs

@dataclass(frozen=True)
class KernelSpec:
    base: str = "wl"
    h: int = DEFAULT_H
    variant: str = "plain"
    extended: bool = False
    # extended only: normalize each addend's Gram before summing
    normalize_addends: bool = True

    def __post_init__(self):
        if self.base not in BASES:
            raise ValueError(f"unknown base kernel {self.base!r}")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.h < 0:
            raise ValueError("h must be >= 0")
        if self.extended and self.variant == "plain":
            raise ValueError("extended kernels need the dummy or e2v variant")

    def summary(self) -> str:
        s = f"base={self.base}"
        if self.base in ITERATED:
            s += f" h={self.h}"
        s += f" variant={self.variant} extended={int(self.extended)}"
        if self.extended:
            s += f" normalize_addends={int(self.normalize_addends)}"
        return s

    @classmethod
    def from_summary(cls, text: str) -> "KernelSpec":
        fields = dict(tok.split("=", 1) for tok in text.split())
        return cls(
            base=fields["base"],
            h=int(fields.get("h", DEFAULT_H)),
            variant=fields["variant"],
            extended=fields.get("extended", "0") == "1",
            normalize_addends=fields.get("normalize_addends", "1") == "1",
        )

    def replace(self, **kw) -> "KernelSpec":
        d = dict(base=self.base, h=self.h, variant=self.variant, extended=self.extended,
                 normalize_addends=self.normalize_addends)
        d.update(kw)
        return KernelSpec(**d)


def apply_variant(g: LabeledDigraph, variant: str) -> LabeledDigraph:
    if variant == "plain":
        return g
    if variant == "dummy":
        return augment_dummy(g)
    if variant == "e2v":
        return edge_to_vertex_lenient(g)
    raise ValueError(f"unknown variant {variant!r}")


def feature_blocks(g: LabeledDigraph, base: str, h: int, vocab: Vocabulary) -> list[Counter]:
    """Per-block feature counts; WL and WLOA have one block per round."""
    if base == "wl":
        return wl_blocks(g, h, vocab)
    if base == "wloa":
        return [_unary(b, vocab) for b in wl_blocks(g, h, vocab)]
    if base == "sp":
        return [sp_counts(g, vocab)]
    if base == "gr":
        return [Counter({vocab(("gr", i)): c for i, c in enumerate(graphlet_counts(g)) if c})]
    raise ValueError(f"unknown base kernel {base!r}")


def _pair_value(base, h, g1, g2) -> float:
    vocab = Vocabulary()
    f1, f2 = (sum(feature_blocks(g, base, h, vocab), Counter()) for g in (g1, g2))
    return float(sum(c * f2[k] for k, c in f1.items() if k in f2))


def base_kernel(spec: KernelSpec, g1: LabeledDigraph, g2: LabeledDigraph) -> float:
    """k(variant(g1), variant(g2)) for the spec's base kernel."""
    return _pair_value(spec.base, spec.h, apply_variant(g1, spec.variant), apply_variant(g2, spec.variant))


def extended_kernel(spec: KernelSpec, g1: LabeledDigraph, g2: LabeledDigraph) -> float:
    """k(g1, g2) + k(variant(g1), variant(g2)).

    With spec.normalize_addends each addend is cosine-normalized first, so
    the value on (g, g) is 2 unless a feature vector is empty.
    """
    if not spec.extended:
        raise ValueError("spec is not extended")
    total = 0.0
    for variant in ("plain", spec.variant):
        s = spec.replace(variant=variant, extended=False)
        k12 = base_kernel(s, g1, g2)
        if spec.normalize_addends:
            d = math.sqrt(base_kernel(s, g1, g1) * base_kernel(s, g2, g2))
            k12 = k12 / d if d > 0 else 0.0
        total += k12
    return total


def kernel(spec: KernelSpec, g1: LabeledDigraph, g2: LabeledDigraph) -> float:
    return extended_kernel(spec, g1, g2) if spec.extended else base_kernel(spec, g1, g2)


# ---------------------------------------------------------------- Gram matrices

@dataclass
class GramMatrix:
    values: np.ndarray
    normalized: bool
    spec: KernelSpec

    @property
    def n(self) -> int:
        return self.values.shape[0]


def normalize_gram(M: GramMatrix) -> GramMatrix:
    """K[i,j] / sqrt(K[i,i] K[j,j]); rows and columns with a zero diagonal become 0."""
    K = np.asarray(M.values, dtype=float)
    d = np.diag(K).copy()
    ok = d > 0
    s = np.zeros_like(d)
    s[ok] = 1.0 / np.sqrt(d[ok])
    out = K * np.outer(s, s)
    np.fill_diagonal(out, ok.astype(float))
    return GramMatrix(out, True, M.spec)


def _block_grams(graphs: Sequence[LabeledDigraph], base: str, h: int) -> list[np.ndarray]:
    """One integer Gram per feature block, all graphs sharing one vocabulary."""
    vocab = Vocabulary()
    per_graph = []
    for i, g in enumerate(graphs):
        try:
            per_graph.append(feature_blocks(g, base, h, vocab))
        except Exception as exc:
            raise type(exc)(f"graph {i}: {exc}") from exc
    n_blocks = len(per_graph[0])
    grams = []
    for b in range(n_blocks):
        rows, cols, vals = [], [], []
        for i, blocks in enumerate(per_graph):
            c = blocks[b]
            rows.extend([i] * len(c))
            cols.extend(c.keys())
            vals.extend(c.values())
        X = sp.csr_matrix(
            (np.asarray(vals, dtype=np.int64), (np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64))),
            shape=(len(graphs), max(len(vocab), 1)),
        )
        grams.append((X @ X.T).toarray().astype(np.int64))
    return grams


def _raw_grams_by_h(graphs, base, variant, hs) -> dict[int, np.ndarray]:
    inputs = [apply_variant(g, variant) for g in graphs] if variant != "plain" else list(graphs)
    if base in ITERATED:
        blocks = _block_grams(inputs, base, max(hs))
        cum = np.cumsum(np.stack(blocks), axis=0)
        return {h: cum[h].astype(float) for h in hs}
    K = _block_grams(inputs, base, 0)[0].astype(float)
    return {h: K for h in hs}


def gram_matrices(
    graphs: Sequence[LabeledDigraph], spec: KernelSpec, hs: Sequence[int] | None = None,
    normalize: bool = False,
) -> dict[int, GramMatrix]:
    """Gram matrices for several refinement depths at once.

    WL-type features for depth h are the first h+1 blocks of the deepest
    run, so one pass covers the whole h grid. Non-iterated bases ignore h.
    """
    if not graphs:
        raise ValueError("empty dataset")
    hs = sorted(set(hs)) if hs is not None else [spec.h]
    if not spec.extended:
        raw = _raw_grams_by_h(graphs, spec.base, spec.variant, hs)
        out = {h: GramMatrix(K, False, spec.replace(h=h)) for h, K in raw.items()}
    else:
        plain = _raw_grams_by_h(graphs, spec.base, "plain", hs)
        other = _raw_grams_by_h(graphs, spec.base, spec.variant, hs)
        out = {}
        for h in hs:
            s = spec.replace(h=h)
            if spec.normalize_addends:
                K = normalize_gram(GramMatrix(plain[h], False, s)).values + \
                    normalize_gram(GramMatrix(other[h], False, s)).values
            else:
                K = plain[h] + other[h]
            out[h] = GramMatrix(K, False, s)
    if normalize:
        out = {h: normalize_gram(M) for h, M in out.items()}
    return out


def gram_matrix(graphs: Sequence[LabeledDigraph], spec: KernelSpec, normalize: bool = False) -> GramMatrix:
    return gram_matrices(graphs, spec, [spec.h], normalize=normalize)[spec.h]
