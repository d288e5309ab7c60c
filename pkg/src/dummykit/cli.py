"""Command-line entry point.

Exit status: 0 on success, 1 on data errors, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import dataio, generate
from .experiment import (DEFAULT_C_GRID, DEFAULT_H_GRID, DEFAULT_SEEDS, evaluate_grams,
                         run_experiment)
from .graph import GraphError, weakly_connected
from .kernels import ITERATED, KernelSpec, gram_matrix, normalize_gram
from .transform import (augment_dummy, closed_form_stats, edge_to_vertex, edge_to_vertex_lenient,
                        inverse_edge_to_vertex, line_graph, transform_stats)

log = logging.getLogger("dummykit")

THREADS_ENV = "DUMMYKIT_THREADS"
CONFIG_SKIP = {"config", "dump_config", "handler"}


def parse_range(text: str) -> list[int]:
    """'A..B' (inclusive) or a comma-separated list of integers."""
    text = text.strip()
    if ".." in text:
        a, b = text.split("..", 1)
        lo, hi = int(a), int(b)
        if hi < lo:
            raise argparse.ArgumentTypeError(f"empty range {text!r}")
        return list(range(lo, hi + 1))
    return [int(x) for x in text.split(",") if x.strip()]


def _range_arg(text):
    try:
        return parse_range(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}") from None


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}") from None


def default_jobs() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


# ---------------------------------------------------------------- commands

TRANSFORMS = {
    "dummy": augment_dummy,
    "line": line_graph,
    "e2v": edge_to_vertex,
    "inv-e2v": inverse_edge_to_vertex,
}


def cmd_transform(args) -> int:
    g = dataio.read_graph(args.inp)
    h = TRANSFORMS[args.op](g)
    if args.out:
        dataio.write_graph(args.out, h)
    else:
        sys.stdout.write(dataio.format_graph(h))
    return 0


def _load(args):
    if not args.dataset or not args.name:
        raise SystemExit("error: --dataset and --name are required")
    ds = dataio.load_tudataset(args.dataset, args.name)
    log.info("loaded %s: %d graphs", args.name, len(ds))
    return ds


def _variant_graphs(graphs, variant):
    if variant == "g":
        return graphs
    if variant == "gphi":
        return [augment_dummy(g) for g in graphs]
    return [edge_to_vertex_lenient(g) for g in graphs]


def cmd_stats(args) -> int:
    if args.inp:
        g = dataio.read_graph(args.inp)
        s = transform_stats(g, full=True)
        print(" ".join(f"{k}={v}" for k, v in s.as_dict().items()))
        return 0
    ds = _load(args)
    t0 = time.perf_counter()
    if args.per_graph:
        for i, g in enumerate(ds.graphs):
            s = transform_stats(g, full=False)
            print(f"graph={i} " + " ".join(f"{k}={v}" for k, v in s.as_dict().items()))
    variants = ["g", "gphi", "hphi"] if args.variant == "all" else [args.variant]
    for variant in variants:
        gs = _variant_graphs(ds.graphs, variant)
        nv = np.mean([g.n for g in gs])
        ne = np.mean([g.m for g in gs])
        xl, yl = dataio.dataset_label_counts(gs)
        print(f"name={ds.name} variant={variant} graphs={len(gs)} avg_vertices={nv:.2f} "
              f"avg_edges={ne:.2f} vertex_labels={xl} edge_labels={yl}")
    log.info("stats took %.1fs", time.perf_counter() - t0)
    return 0


def _spec(args) -> KernelSpec:
    return KernelSpec(base=args.kernel, h=args.h, variant=args.variant,
                      extended=args.extended, normalize_addends=not args.raw_sum)


def cmd_gram(args) -> int:
    ds = _load(args)
    M = gram_matrix(ds.graphs, _spec(args), normalize=not args.raw)
    dataio.write_gram(args.out, M)
    log.info("wrote %dx%d Gram to %s", M.n, M.n, args.out)
    return 0


def cmd_classify(args) -> int:
    ds = _load(args)
    jobs = args.jobs or default_jobs()
    if args.gram:
        M = dataio.read_gram(args.gram)
        if M.n != len(ds):
            raise dataio.DatasetError(f"Gram is {M.n}x{M.n} but dataset has {len(ds)} graphs")
        K = (M if M.normalized else normalize_gram(M)).values
        h = M.spec.h if M.spec.base in ITERATED else None
        report = evaluate_grams({h: K}, ds.class_labels, M.spec, args.seeds, args.c_grid, jobs)
    else:
        report = run_experiment(ds.graphs, ds.class_labels, _spec(args), args.seeds,
                                args.c_grid, args.h_grid, jobs)
    text = report.to_text()
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return 0


def cmd_roundtrip(args) -> int:
    if args.inp:
        graphs = [dataio.read_graph(args.inp)]
    else:
        graphs = _load(args).graphs
    failures = skipped = 0
    for i, g in enumerate(graphs):
        if g.m == 0 or any(not g.in_adj[v] and not g.out_adj[v] for v in g.vertices):
            skipped += 1
            continue
        if inverse_edge_to_vertex(edge_to_vertex(g)) != g:
            failures += 1
            print(f"mismatch on graph {i}")
    print(f"checked={len(graphs) - skipped} skipped={skipped} failures={failures}")
    return 1 if failures else 0


def cmd_selftest(args) -> int:
    """Randomized property checks over the transforms."""
    rng = np.random.default_rng(args.seed)
    failures = 0
    for i in range(args.graphs):
        n = int(rng.integers(2, 11))
        g = generate.random_digraph(rng, n, p=float(rng.uniform(0, 0.5)),
                                    vertex_labels=int(rng.integers(1, 5)),
                                    edge_labels=int(rng.integers(1, 5)))
        problems = []
        if not weakly_connected(augment_dummy(g)):
            problems.append("G_phi not connected")
        h = edge_to_vertex(g)
        if inverse_edge_to_vertex(h) != g:
            problems.append("round trip")
        if h != edge_to_vertex(g, method="literal"):
            problems.append("direct and literal transforms differ")
        try:
            transform_stats(g)
        except GraphError as exc:
            problems.append(str(exc))
        s = closed_form_stats(g)
        if s.e_h_Phi != line_graph(g).m + 2 * g.m:
            problems.append("edge count identity")
        for p in problems:
            failures += 1
            print(f"graph {i}: {p}")
    print(f"graphs={args.graphs} failures={failures}")
    return 1 if failures else 0


# ---------------------------------------------------------------- parser

def _add_dataset(p):
    p.add_argument("--dataset", help="directory holding TUDataset files")
    p.add_argument("--name", help="dataset name, e.g. NCI1")


def _add_kernel(p):
    p.add_argument("--kernel", choices=["wl", "wloa", "sp", "gr"], default="wl")
    p.add_argument("--h", type=int, default=5, help="refinement rounds for wl/wloa")
    p.add_argument("--variant", choices=["plain", "dummy", "e2v"], default="plain")
    p.add_argument("--extended", action="store_true", help="add the plain-graph kernel to the variant kernel")
    p.add_argument("--raw-sum", action="store_true", help="extended: sum raw addends, then normalize")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dummykit", description=__doc__)
    parser.add_argument("--log-level", default="WARNING")
    parser.add_argument("--config", help="JSON file of option defaults")
    parser.add_argument("--dump-config", help="write the resolved options as JSON and continue")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("transform", help="apply one transform to a graph file")
    p.add_argument("--op", choices=sorted(TRANSFORMS), required=True)
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out")
    p.set_defaults(handler=cmd_transform)

    p = sub.add_parser("stats", help="transform sizes per graph and dataset averages")
    p.add_argument("--in", dest="inp")
    _add_dataset(p)
    p.add_argument("--variant", choices=["g", "gphi", "hphi", "all"], default="all")
    p.add_argument("--per-graph", action="store_true")
    p.set_defaults(handler=cmd_stats)

    p = sub.add_parser("gram", help="compute and write a Gram matrix")
    _add_dataset(p)
    _add_kernel(p)
    p.add_argument("--raw", action="store_true", help="skip the final normalization")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_gram)

    p = sub.add_parser("classify", help="SVM accuracy over seeded splits")
    _add_dataset(p)
    _add_kernel(p)
    p.add_argument("--gram", help="use a precomputed Gram file instead of computing one")
    p.add_argument("--seeds", type=_range_arg, default=list(DEFAULT_SEEDS))
    p.add_argument("--c-grid", type=_float_list, default=list(DEFAULT_C_GRID))
    p.add_argument("--h-grid", type=_range_arg, default=list(DEFAULT_H_GRID))
    p.add_argument("--jobs", type=int, default=0, help=f"worker threads (default: ${THREADS_ENV} or all cores)")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_classify)

    p = sub.add_parser("roundtrip", help="check inv-e2v(e2v(G)) == G")
    p.add_argument("--in", dest="inp")
    _add_dataset(p)
    p.set_defaults(handler=cmd_roundtrip)

    p = sub.add_parser("selftest", help="randomized property checks")
    p.add_argument("--graphs", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=cmd_selftest)
    return parser


def parse_args(argv):
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config:
        with open(known.config, encoding="utf-8") as fh:
            cfg = json.load(fh)
        command = cfg.pop("command", None)
        sub = parser._subparsers._group_actions[0].choices
        if command in sub:
            sub[command].set_defaults(**cfg)
        parser.set_defaults(**{k: v for k, v in cfg.items() if k in ("log_level",)})
    return parser.parse_args(argv)


def config_of(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in CONFIG_SKIP}


def run(argv=None) -> int:
    try:
        args = parse_args(sys.argv[1:] if argv is None else argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    logging.basicConfig(level=args.log_level.upper(), format="%(levelname)s %(name)s: %(message)s")
    if args.dump_config:
        with open(args.dump_config, "w", encoding="utf-8") as fh:
            json.dump(config_of(args), fh, indent=2, sort_keys=True)
    try:
        return args.handler(args)
    except SystemExit as exc:
        if isinstance(exc.code, str):
            print(exc.code, file=sys.stderr)
            return 2
        return exc.code or 0
    except (dataio.DatasetError, GraphError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
