"""C-SVC on a precomputed kernel, solved by sequential minimal optimization.

Working-set selection is the maximal violating pair; the solver stops when
the KKT gap m(alpha) - M(alpha) drops below `tol`. The bias follows the
usual rule: average over free support vectors, otherwise the midpoint of
the feasible interval.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

KKT_TOL = 1e-3
MAX_ITER = 10_000_000
TAU = 1e-12
SNAP = 1e-12


class ConvergenceError(RuntimeError):
    pass


@njit(cache=True, nogil=True)
def _smo(K, y, C, tol, max_iter, alpha, grad, trace):
    n = y.shape[0]
    it = 0
    while it < max_iter:
        # i: argmax over I_up of -y G, j: argmin over I_low of -y G
        gmax = -np.inf
        gmin = np.inf
        i = -1
        j = -1
        for t in range(n):
            v = -y[t] * grad[t]
            a = alpha[t]
            if (y[t] > 0 and a < C) or (y[t] < 0 and a > 0):
                if v > gmax:
                    gmax = v
                    i = t
            if (y[t] < 0 and a < C) or (y[t] > 0 and a > 0):
                if v < gmin:
                    gmin = v
                    j = t
        if i < 0 or j < 0 or gmax - gmin < tol:
            return it, True
        eta = K[i, i] + K[j, j] - 2.0 * K[i, j]
        if eta <= 0:
            eta = TAU
        step = (gmax - gmin) / eta
        # alpha_i += y_i * step, alpha_j -= y_j * step, both kept in [0, C]
        room_i = C - alpha[i] if y[i] > 0 else alpha[i]
        room_j = alpha[j] if y[j] > 0 else C - alpha[j]
        step = min(step, room_i, room_j)
        alpha[i] += y[i] * step
        alpha[j] -= y[j] * step
        # snap to the bounds exactly so the box tests stay exact; rounding
        # can leave a multiplier an ulp inside the box otherwise
        for t in (i, j):
            if alpha[t] >= C - SNAP * C:
                alpha[t] = C
            elif alpha[t] <= SNAP * C:
                alpha[t] = 0.0
        Ki = K[i]
        Kj = K[j]
        for t in range(n):
            grad[t] += step * y[t] * (Ki[t] - Kj[t])
        if trace.shape[0] > it:
            s = 0.0
            for t in range(n):
                s += alpha[t] * (grad[t] - 1.0)
            trace[it] = -0.5 * s
        it += 1
    return it, False


@dataclass
class SvmModel:
    alphas: np.ndarray
    bias: float
    C: float
    y: np.ndarray
    n_iter: int = 0
    objective_trace: np.ndarray | None = field(default=None, repr=False)

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.alphas > 0)

    def decision(self, kernel_rows: np.ndarray) -> np.ndarray:
        rows = np.atleast_2d(np.asarray(kernel_rows, dtype=float))
        if rows.shape[1] != self.alphas.shape[0]:
            raise ValueError(f"kernel row length {rows.shape[1]} != training size {self.alphas.shape[0]}")
        return rows @ (self.alphas * self.y) + self.bias

    def predict(self, kernel_rows: np.ndarray) -> np.ndarray:
        return np.where(self.decision(kernel_rows) >= 0, 1, -1)


def dual_objective(K: np.ndarray, y: np.ndarray, alphas: np.ndarray) -> float:
    """sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij (to be maximized)."""
    ay = alphas * y
    return float(alphas.sum() - 0.5 * ay @ K @ ay)


def _bias(y, alpha, grad, C) -> float:
    yg = y * grad
    upper = alpha >= C
    lower = alpha <= 0
    free = ~(upper | lower)
    if free.any():
        return -float(yg[free].mean())
    ub_mask = (upper & (y < 0)) | (lower & (y > 0))
    lb_mask = (upper & (y > 0)) | (lower & (y < 0))
    ub = yg[ub_mask].min() if ub_mask.any() else np.inf
    lb = yg[lb_mask].max() if lb_mask.any() else -np.inf
    return -float((ub + lb) / 2)


def svm_train(K, labels, C: float, tol: float = KKT_TOL, max_iter: int = MAX_ITER,
              trace: bool = False) -> SvmModel:
    """Fit a C-SVC on the training Gram matrix K with labels in {+1, -1}."""
    K = np.ascontiguousarray(K, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)
    if K.ndim != 2 or K.shape[0] != K.shape[1] or K.shape[0] != y.shape[0]:
        raise ValueError("K must be square and match the label count")
    if not np.all(np.isfinite(K)):
        raise ValueError("kernel matrix has non-finite values")
    if not np.all(np.abs(y) == 1):
        raise ValueError("labels must be +1 or -1")
    if np.all(y == y[0]):
        raise ValueError("training labels contain a single class")
    if C <= 0:
        raise ValueError("C must be positive")
    n = y.shape[0]
    alpha = np.zeros(n)
    grad = -np.ones(n)
    buf = np.zeros(min(max_iter, 1_000_000) if trace else 0)
    n_iter, ok = _smo(K, y, float(C), float(tol), int(max_iter), alpha, grad, buf)
    if not ok:
        raise ConvergenceError(f"SMO did not converge in {max_iter} iterations (C={C})")
    return SvmModel(
        alphas=alpha,
        bias=_bias(y, alpha, grad, C),
        C=float(C),
        y=y,
        n_iter=int(n_iter),
        objective_trace=buf[:n_iter].copy() if trace else None,
    )


def svm_predict(model: SvmModel, kernel_row) -> int:
    row = np.asarray(kernel_row, dtype=float)
    if row.ndim != 1:
        raise ValueError("expected a single kernel row")
    return int(model.predict(row)[0])
