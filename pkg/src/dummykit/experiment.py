"""Split/seed/C-grid protocol and accuracy aggregation."""

from __future__ import annotations

import logging
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .graph import LabeledDigraph
from .kernels import ITERATED, GramMatrix, KernelSpec, gram_matrices
from .svm import svm_train

log = logging.getLogger(__name__)

DEFAULT_SEEDS = tuple(range(2020, 2030))
DEFAULT_C_GRID = tuple(10.0 ** k for k in range(-7, 4))
DEFAULT_H_GRID = tuple(range(0, 6))

_MASK = (1 << 64) - 1


def splitmix64(state: int):
    """One step of splitmix64: returns (new_state, output)."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return state, z ^ (z >> 31)


def seeded_permutation(n: int, seed: int) -> list[int]:
    """Fisher-Yates shuffle of 0..n-1 driven by splitmix64 seeded with `seed`;
    position i swaps with (next output mod (i + 1)), i from n-1 down to 1."""
    perm = list(range(n))
    state = seed & _MASK
    for i in range(n - 1, 0, -1):
        state, r = splitmix64(state)
        j = r % (i + 1)
        perm[i], perm[j] = perm[j], perm[i]
    return perm


@dataclass(frozen=True)
class SplitPlan:
    train: tuple
    valid: tuple
    test: tuple
    seed: int


def split_sizes(n: int) -> tuple[int, int, int]:
    sizes = [8 * n // 10, n // 10, n // 10]
    for k in range(n - sum(sizes)):
        sizes[k % 3] += 1
    return tuple(sizes)


def make_splits(n: int, seed: int) -> SplitPlan:
    if n < 10:
        raise ValueError(f"need at least 10 items to split, got {n}")
    perm = seeded_permutation(n, seed)
    a, b, _ = split_sizes(n)
    return SplitPlan(tuple(perm[:a]), tuple(perm[a:a + b]), tuple(perm[a + b:]), seed)


def _folds(K: np.ndarray, train, evaluate):
    tr, ev = np.asarray(train), np.asarray(evaluate)
    return np.ascontiguousarray(K[np.ix_(tr, tr)]), K[np.ix_(ev, tr)]


def _accuracy(K_train, K_eval, y_train, y_eval, C: float) -> float:
    model = svm_train(K_train, y_train, C)
    return float(np.mean(model.predict(K_eval) == y_eval))


def model_select(grams: Mapping[int, np.ndarray] | np.ndarray, labels, plan: SplitPlan,
                 c_grid: Sequence[float] = DEFAULT_C_GRID):
    """Grid search on the validation fold.

    `grams` maps a refinement depth h to its Gram matrix (a bare matrix means
    no h). Returns (C, h, validation accuracy); ties go to the smaller C,
    then the smaller h.
    """
    if not c_grid:
        raise ValueError("empty C grid")
    if not isinstance(grams, Mapping):
        grams = {None: grams}
    y = np.asarray(labels)
    if len(set(y[list(plan.train)])) < 2:
        raise ValueError(f"degenerate split for seed {plan.seed}: one class in training fold")
    best = None
    y_tr, y_va = y[list(plan.train)], y[list(plan.valid)]
    for h, K in grams.items():
        K = K.values if isinstance(K, GramMatrix) else K
        K_tr, K_va = _folds(K, plan.train, plan.valid)
        for C in c_grid:
            acc = _accuracy(K_tr, K_va, y_tr, y_va, C)
            key = (-acc, C, -1 if h is None else h)
            if best is None or key < best[0]:
                best = (key, C, h, acc)
    return best[1], best[2], best[3]


@dataclass
class SeedResult:
    seed: int
    C: float
    h: int | None
    valid_accuracy: float
    test_accuracy: float


@dataclass
class EvalReport:
    spec: KernelSpec
    per_seed: list[SeedResult] = field(default_factory=list)

    @property
    def accuracies(self) -> list[float]:
        return [100.0 * r.test_accuracy for r in self.per_seed]

    @property
    def mean(self) -> float:
        return statistics.fmean(self.accuracies)

    @property
    def std(self) -> float:
        acc = self.accuracies
        return statistics.stdev(acc) if len(acc) > 1 else 0.0

    def to_text(self) -> str:
        lines = [f"# {self.spec.summary()}"]
        for r in self.per_seed:
            h = "-" if r.h is None else str(r.h)
            lines.append(
                f"seed={r.seed} C={r.C:.0e} h={h} valid={100 * r.valid_accuracy:.2f} "
                f"test={100 * r.test_accuracy:.2f}"
            )
        lines.append(f"mean={self.mean:.2f} std={self.std:.2f}")
        return "\n".join(lines) + "\n"


def binary_labels(class_labels) -> np.ndarray:
    values = sorted(set(class_labels))
    if len(values) != 2:
        raise ValueError(f"expected two classes, found {len(values)}")
    return np.where(np.asarray(class_labels) == values[1], 1, -1)


def run_seed(grams, y, seed: int, c_grid) -> SeedResult:
    plan = make_splits(len(y), seed)
    C, h, valid = model_select(grams, y, plan, c_grid)
    K = grams[h]
    K = K.values if isinstance(K, GramMatrix) else K
    K_tr, K_te = _folds(K, plan.train, plan.test)
    test = _accuracy(K_tr, K_te, y[list(plan.train)], y[list(plan.test)], C)
    log.info("seed %d: C=%g h=%s valid=%.4f test=%.4f", seed, C, h, valid, test)
    return SeedResult(seed, C, h, valid, test)


def evaluate_grams(grams: Mapping, class_labels, spec: KernelSpec, seeds=DEFAULT_SEEDS,
                   c_grid=DEFAULT_C_GRID, jobs: int = 1) -> EvalReport:
    y = binary_labels(class_labels)
    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            results = list(pool.map(lambda s: run_seed(grams, y, s, c_grid), seeds))
    else:
        results = [run_seed(grams, y, s, c_grid) for s in seeds]
    return EvalReport(spec, results)


def run_experiment(graphs: Sequence[LabeledDigraph], class_labels, spec: KernelSpec,
                   seeds=DEFAULT_SEEDS, c_grid=DEFAULT_C_GRID, h_grid=DEFAULT_H_GRID,
                   jobs: int = 1) -> EvalReport:
    """Normalized Grams, then per seed: split, select (C, h) on the validation
    fold, score the selected model on the test fold."""
    binary_labels(class_labels)
    hs = list(h_grid) if spec.base in ITERATED else [spec.h]
    mats = gram_matrices(graphs, spec, hs, normalize=True)
    grams = {(h if spec.base in ITERATED else None): M.values for h, M in mats.items()}
    return evaluate_grams(grams, class_labels, spec, seeds, c_grid, jobs)
