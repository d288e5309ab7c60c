"""TUDataset ingestion and the package's own graph / Gram file formats.

Graph text format, one record per line (UTF-8, LF):

    g <n> <m>
    v <id> <label>[,<label>...]
    e <id> <src> <dst> <label>[,<label>...]

Vertices come in ascending id order, edges in ascending (src, dst) order.
Labels are written by name; an empty label set is written as "-".

Gram binary format: magic b"GRAMMAT1", uint32 n, uint8 normalized flag,
uint32 length + UTF-8 kernel summary, then n*n float64 row-major, all
little-endian.
"""

from __future__ import annotations

import logging
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .graph import GraphError, LabeledDigraph, make_graph, validate
from .kernels import GramMatrix, KernelSpec
from .labels import UNIVERSE, LabelUniverse, labelset

log = logging.getLogger(__name__)

BOND = "BOND"
NODE_PREFIX = "n"
EDGE_PREFIX = "e"
EMPTY = "-"
GRAM_MAGIC = b"GRAMMAT1"


class DatasetError(ValueError):
    pass


@dataclass
class Dataset:
    name: str
    graphs: list
    class_labels: list
    universe: LabelUniverse

    def __post_init__(self):
        if len(self.graphs) != len(self.class_labels):
            raise DatasetError("one class label per graph required")

    def __len__(self):
        return len(self.graphs)

    def validate(self) -> list[str]:
        out = []
        for i, g in enumerate(self.graphs):
            out += [f"graph {i}: {p}" for p in validate(g)]
            for ls in list(g.vertices.values()) + [rec[1] for rec in g.edges.values()]:
                if any(lab >= len(self.universe) for lab in ls):
                    out.append(f"graph {i}: label outside the dictionary")
                    break
        return out


def to_directed(pairs: Iterable) -> dict[tuple[int, int], tuple]:
    """Expand undirected edges into both orientations.

    Items are (u, v) or (u, v, labels). Repeated pairs merge their label
    sets, so TUDataset rows that already list both orderings collapse to one
    record per direction.
    """
    out: dict[tuple[int, int], set] = {}
    for item in pairs:
        u, v = item[0], item[1]
        labels = item[2] if len(item) > 2 else ()
        for pair in ((u, v), (v, u)):
            out.setdefault(pair, set()).update(labels)
    return {pair: labelset(ls) for pair, ls in out.items()}


def _find(directory: Path, name: str, suffix: str) -> Path | None:
    for base in (directory, directory / name):
        p = base / f"{name}_{suffix}.txt"
        if p.exists():
            return p
    return None


def _read_ints(path: Path, width: int) -> list:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = [p.strip() for p in line.split(",")]
            if len(parts) < width:
                raise DatasetError(f"{path.name}:{lineno}: expected {width} comma-separated values")
            try:
                vals = [int(float(p)) if "." in p or "e" in p.lower() else int(p) for p in parts[:width]]
            except ValueError:
                raise DatasetError(f"{path.name}:{lineno}: not an integer: {line!r}") from None
            rows.append(vals if width > 1 else vals[0])
    return rows


def load_tudataset(directory, name: str, universe: LabelUniverse | None = None) -> Dataset:
    """Read a TUDataset directory (files {name}_A.txt etc.) into directed graphs.

    Vertices are renumbered 0..n-1 per graph in file order; each undirected
    edge becomes two directed edges with edge ids assigned in ascending
    (src, dst) order. Missing node labels give every vertex one shared label;
    missing edge labels give every edge the label BOND.
    """
    directory = Path(directory)
    universe = UNIVERSE if universe is None else universe
    paths = {s: _find(directory, name, s) for s in ("A", "graph_indicator", "graph_labels", "node_labels", "edge_labels")}
    for req in ("A", "graph_indicator", "graph_labels"):
        if paths[req] is None:
            raise DatasetError(f"missing {name}_{req}.txt under {directory}")

    indicator = _read_ints(paths["graph_indicator"], 1)
    graph_labels = _read_ints(paths["graph_labels"], 1)
    n_graphs = max(indicator) if indicator else 0
    if sorted(set(indicator)) != list(range(1, n_graphs + 1)):
        raise DatasetError("graph indicator must use ids 1..G without gaps")
    if len(graph_labels) != n_graphs:
        raise DatasetError(f"{len(graph_labels)} graph labels for {n_graphs} graphs")
    node_labels = _read_ints(paths["node_labels"], 1) if paths["node_labels"] else None
    if node_labels is not None and len(node_labels) != len(indicator):
        raise DatasetError(f"{len(node_labels)} node labels for {len(indicator)} nodes")
    rows = _read_ints(paths["A"], 2)
    edge_labels = _read_ints(paths["edge_labels"], 1) if paths["edge_labels"] else None
    if edge_labels is not None and len(edge_labels) != len(rows):
        raise DatasetError(f"{len(edge_labels)} edge labels for {len(rows)} edges")

    local = [0] * len(indicator)
    sizes = [0] * (n_graphs + 1)
    for i, gid in enumerate(indicator):
        local[i] = sizes[gid]
        sizes[gid] += 1
    vertex_sets = [dict() for _ in range(n_graphs + 1)]
    for i, gid in enumerate(indicator):
        raw = node_labels[i] if node_labels is not None else 0
        vertex_sets[gid][local[i]] = (universe.intern(f"{NODE_PREFIX}{raw}"),)

    bond = universe.intern(BOND)
    pair_lists = [[] for _ in range(n_graphs + 1)]
    loops = 0
    for row, (a, b) in enumerate(rows, start=1):
        for x in (a, b):
            if not 1 <= x <= len(indicator):
                raise DatasetError(f"{paths['A'].name}:{row}: node {x} out of range")
        ga, gb = indicator[a - 1], indicator[b - 1]
        if ga != gb:
            raise DatasetError(f"{paths['A'].name}:{row}: edge ({a}, {b}) crosses graphs {ga} and {gb}")
        if a == b:
            loops += 1
            continue
        lab = universe.intern(f"{EDGE_PREFIX}{edge_labels[row - 1]}") if edge_labels is not None else bond
        pair_lists[ga].append((local[a - 1], local[b - 1], (lab,)))
    if loops:
        log.warning("%s: dropped %d self-loop rows", name, loops)

    graphs = []
    for gid in range(1, n_graphs + 1):
        directed = to_directed(pair_lists[gid])
        edges = [(i, u, v, ls) for i, ((u, v), ls) in enumerate(sorted(directed.items()))]
        try:
            graphs.append(make_graph(vertex_sets[gid], edges))
        except GraphError as exc:
            raise DatasetError(f"graph {gid}: {exc}") from exc

    classes = list(graph_labels)
    if len(set(classes)) == 2:
        hi = max(classes)
        classes = [1 if c == hi else -1 for c in classes]
    return Dataset(name, graphs, classes, universe)


def _raw_value(universe: LabelUniverse, ls, prefix: str, what: str) -> str:
    if len(ls) != 1:
        raise DatasetError(f"{what} needs exactly one label to be written in TUDataset form")
    name = universe.name(ls[0])
    if not name.startswith(prefix):
        raise DatasetError(f"{what} label {name!r} is not a {prefix!r}-prefixed dataset label")
    return name[len(prefix):]


def write_tudataset(directory, dataset: Dataset) -> None:
    """Write a dataset loaded by load_tudataset back in TUDataset layout."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    u = dataset.universe
    name = dataset.name
    indicator, nlabels, arows, elabels = [], [], [], []
    offset = 0
    any_edge_label = False
    for gid, g in enumerate(dataset.graphs, start=1):
        ids = sorted(g.vertices)
        if ids != list(range(g.n)):
            raise DatasetError(f"graph {gid}: vertex ids must be 0..n-1")
        for v in ids:
            indicator.append(gid)
            nlabels.append(_raw_value(u, g.vertices[v], NODE_PREFIX, f"graph {gid} vertex {v}"))
        for (a, b), (_, ls) in sorted(g.edges.items()):
            arows.append(f"{a + offset + 1}, {b + offset + 1}")
            if ls == (u.intern(BOND),):
                elabels.append(None)
            else:
                any_edge_label = True
                elabels.append(_raw_value(u, ls, EDGE_PREFIX, f"graph {gid} edge ({a},{b})"))
        offset += g.n
    if any_edge_label and None in elabels:
        raise DatasetError("mixing BOND and explicit edge labels cannot be written")

    def dump(suffix, lines):
        (directory / f"{name}_{suffix}.txt").write_text("".join(f"{x}\n" for x in lines), encoding="utf-8")

    dump("A", arows)
    dump("graph_indicator", indicator)
    dump("graph_labels", dataset.class_labels)
    dump("node_labels", nlabels)
    if any_edge_label:
        dump("edge_labels", elabels)


# ---------------------------------------------------------------- graph text format

def _fmt_labels(universe: LabelUniverse, ls) -> str:
    return ",".join(universe.names(ls)) if ls else EMPTY


def format_graph(g: LabeledDigraph, universe: LabelUniverse | None = None) -> str:
    universe = UNIVERSE if universe is None else universe
    problems = validate(g)
    if problems:
        raise GraphError("; ".join(problems))
    lines = [f"g {g.n} {g.m}"]
    for v in sorted(g.vertices):
        lines.append(f"v {v} {_fmt_labels(universe, g.vertices[v])}")
    for eid, a, b, ls in g.edge_records():
        lines.append(f"e {eid} {a} {b} {_fmt_labels(universe, ls)}")
    return "\n".join(lines) + "\n"


def write_graph(path, g: LabeledDigraph, universe: LabelUniverse | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_graph(g, universe))


def parse_graph(text: str, universe: LabelUniverse | None = None, source: str = "<graph>") -> LabeledDigraph:
    universe = UNIVERSE if universe is None else universe

    def fail(lineno, msg):
        raise DatasetError(f"{source}:{lineno}: {msg}")

    def labels(lineno, tok):
        if tok == EMPTY:
            return ()
        try:
            return labelset(universe.intern(s) for s in tok.split(","))
        except ValueError as exc:
            fail(lineno, str(exc))

    header = None
    vs: dict[int, tuple] = {}
    es: dict[tuple, tuple] = {}
    for lineno, line in enumerate(text.split("\n"), start=1):
        if not line.strip():
            continue
        tok = line.split()
        try:
            if tok[0] == "g" and len(tok) == 3:
                if header is not None:
                    fail(lineno, "second header")
                header = (int(tok[1]), int(tok[2]))
            elif tok[0] == "v" and len(tok) == 3:
                v = int(tok[1])
                if v in vs:
                    fail(lineno, f"duplicate vertex id {v}")
                vs[v] = labels(lineno, tok[2])
            elif tok[0] == "e" and len(tok) == 5:
                eid, a, b = int(tok[1]), int(tok[2]), int(tok[3])
                if (a, b) in es:
                    fail(lineno, f"parallel edge ({a},{b})")
                es[(a, b)] = (eid, labels(lineno, tok[4]))
            else:
                fail(lineno, f"unrecognized record {line!r}")
        except ValueError as exc:
            if isinstance(exc, DatasetError):
                raise
            fail(lineno, f"bad integer in {line!r}")
        if header is None:
            fail(lineno, "missing 'g' header")
    if header is None:
        fail(1, "empty file")
    if header != (len(vs), len(es)):
        fail(1, f"header says {header[0]} vertices / {header[1]} edges, found {len(vs)} / {len(es)}")
    g = LabeledDigraph(vs, es)
    problems = validate(g)
    if problems:
        raise DatasetError(f"{source}: " + "; ".join(problems))
    return g


def read_graph(path, universe: LabelUniverse | None = None) -> LabeledDigraph:
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read(), universe, source=str(path))


# ---------------------------------------------------------------- Gram format

def write_gram(path, M: GramMatrix) -> None:
    K = np.asarray(M.values, dtype="<f8")
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ValueError("Gram matrix must be square")
    if not np.all(np.isfinite(K)):
        raise ValueError("Gram matrix has non-finite entries")
    if not np.array_equal(K, K.T):
        raise ValueError("Gram matrix is not symmetric")
    summary = M.spec.summary().encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(GRAM_MAGIC)
        fh.write(struct.pack("<IBI", K.shape[0], int(M.normalized), len(summary)))
        fh.write(summary)
        fh.write(np.ascontiguousarray(K).tobytes())


def read_gram(path) -> GramMatrix:
    data = Path(path).read_bytes()
    head = len(GRAM_MAGIC) + 9
    if len(data) < head or data[:len(GRAM_MAGIC)] != GRAM_MAGIC:
        raise DatasetError(f"{path}: not a Gram file (bad magic or truncated header)")
    n, flag, slen = struct.unpack_from("<IBI", data, len(GRAM_MAGIC))
    body = head + slen
    if len(data) < body:
        raise DatasetError(f"{path}: truncated kernel summary")
    spec = KernelSpec.from_summary(data[head:body].decode("utf-8"))
    expected = body + 8 * n * n
    if len(data) != expected:
        raise DatasetError(f"{path}: {len(data) - body} value bytes for a {n}x{n} matrix")
    K = np.frombuffer(data, dtype="<f8", offset=body).reshape(n, n).astype(float)
    return GramMatrix(K, bool(flag), spec)


def dataset_label_counts(graphs: Sequence[LabeledDigraph]) -> tuple[int, int]:
    """Distinct vertex and edge label counts over a collection of graphs."""
    xs, ys = set(), set()
    for g in graphs:
        for ls in g.vertices.values():
            xs.update(ls)
        for _, ls in g.edges.values():
            ys.update(ls)
    return len(xs), len(ys)
