import numpy as np
import pytest

from oracles import qp_oracle
from dummykit.svm import ConvergenceError, dual_objective, svm_predict, svm_train


def random_problem(rng, n=None, d=None):
    n = n or int(rng.integers(2, 9))
    d = d or int(rng.integers(1, 7))
    X = rng.normal(size=(n + 10, d))
    K = X @ X.T
    y = rng.choice([-1, 1], size=n)
    if len(set(y)) < 2:
        y[0] = -y[1]
    return K[:n, :n], y, K[n:, :n]


def test_identity_two_points():
    m = svm_train(np.eye(2), [1, -1], C=1.0)
    assert np.allclose(m.alphas, [1, 1]) and m.bias == 0
    assert list(m.predict(np.eye(2))) == [1, -1]
    assert svm_predict(m, [1, 0]) == 1


def test_zero_row_gives_sign_of_bias():
    K = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    m = svm_train(K, [1, 1, -1], C=0.1)
    assert svm_predict(m, [0, 0, 0]) == (1 if m.bias >= 0 else -1)


def test_tie_goes_positive():
    m = svm_train(np.eye(2), [1, -1], C=1.0)
    assert svm_predict(m, [0.5, 0.5]) == 1


def test_duplicate_point_keeps_decision(rng):
    # splitting a multiplier across two copies is only free while it is
    # below C; a point at the bound would get twice the box
    checked = 0
    for _ in range(20):
        K, y, rows = random_problem(rng, n=6, d=3)
        m1 = svm_train(K, y, 1.0, tol=1e-9)
        below = np.flatnonzero(m1.alphas < m1.C - 1e-6)
        if not len(below):
            continue
        j = int(below[0])
        idx = list(range(6)) + [j]
        m2 = svm_train(K[np.ix_(idx, idx)], y[idx], 1.0, tol=1e-9)
        assert np.allclose(m1.decision(rows), m2.decision(rows[:, idx]), atol=1e-6)
        checked += 1
    assert checked >= 10


def test_tiny_c_predicts_majority():
    rng = np.random.default_rng(3)
    X = rng.normal(size=(20, 3))
    y = np.array([1] * 14 + [-1] * 6)
    m = svm_train(X @ X.T, y, C=1e-9)
    # the minority class is entirely at the bound
    assert np.all(m.alphas[y < 0] == 1e-9)
    assert np.all(m.predict(X @ X.T) == 1)


def test_interior_support_vector_own_prediction(rng):
    for _ in range(20):
        K, y, _ = random_problem(rng)
        m = svm_train(K, y, 10.0)
        for j in np.flatnonzero((m.alphas > 1e-6) & (m.alphas < m.C - 1e-6)):
            assert svm_predict(m, K[j]) == y[j]


def test_dual_feasibility(rng):
    for _ in range(40):
        K, y, _ = random_problem(rng)
        C = float(10 ** rng.uniform(-3, 3))
        m = svm_train(K, y, C)
        assert np.all(m.alphas >= 0) and np.all(m.alphas <= C)
        assert abs(m.alphas @ y) <= 1e-9


def test_matches_qp_oracle(rng):
    for _ in range(30):
        K, y, rows = random_problem(rng)
        C = float(10 ** rng.uniform(-2, 2))
        m = svm_train(K, y, C, tol=1e-8)
        a, f, b = qp_oracle(K, y, C)
        assert dual_objective(K, y, m.alphas) == pytest.approx(f, abs=1e-6)
        assert np.array_equal(m.predict(rows), np.where(rows @ (a * y) + b >= 0, 1, -1))


def test_default_tolerance_is_close_to_optimum(rng):
    for _ in range(30):
        K, y, _ = random_problem(rng)
        C = float(10 ** rng.uniform(-2, 2))
        m = svm_train(K, y, C)
        _, f, _ = qp_oracle(K, y, C)
        assert dual_objective(K, y, m.alphas) <= f + 1e-9
        assert dual_objective(K, y, m.alphas) >= f - 1e-4


def test_objective_monotone(rng):
    for _ in range(20):
        K, y, _ = random_problem(rng, n=8)
        m = svm_train(K, y, 5.0, tol=1e-8, trace=True)
        tr = m.objective_trace
        assert len(tr) == m.n_iter
        assert np.all(np.diff(tr) >= -1e-12)
        assert tr[-1] == pytest.approx(dual_objective(K, y, m.alphas), abs=1e-9)


def test_scale_robustness(rng):
    for _ in range(15):
        K, y, rows = random_problem(rng)
        s = float(10 ** rng.uniform(-2, 2))
        m1 = svm_train(K, y, 1.0, tol=1e-9)
        m2 = svm_train(s * K, y, 1.0 / s, tol=1e-9)
        assert np.allclose(m1.alphas, s * m2.alphas, atol=1e-6)
        assert np.array_equal(m1.predict(rows), m2.predict(s * rows))


def test_deterministic(rng):
    K, y, _ = random_problem(rng, n=8)
    m1, m2 = svm_train(K, y, 1.0), svm_train(K, y, 1.0)
    assert np.array_equal(m1.alphas, m2.alphas) and m1.bias == m2.bias


def test_errors():
    with pytest.raises(ValueError, match="single class"):
        svm_train(np.eye(2), [1, 1], 1.0)
    with pytest.raises(ValueError, match="non-finite"):
        svm_train(np.array([[1.0, np.nan], [np.nan, 1.0]]), [1, -1], 1.0)
    with pytest.raises(ValueError):
        svm_train(np.eye(2), [1, 0], 1.0)
    with pytest.raises(ValueError):
        svm_train(np.eye(3), [1, -1], 1.0)
    with pytest.raises(ValueError):
        svm_train(np.eye(2), [1, -1], 0.0)
    m = svm_train(np.eye(2), [1, -1], 1.0)
    with pytest.raises(ValueError, match="length"):
        m.decision(np.ones((1, 3)))
    with pytest.raises(ConvergenceError):
        rng = np.random.default_rng(0)
        X = rng.normal(size=(30, 2))
        svm_train(X @ X.T, np.sign(X[:, 0] + 0.5 * rng.normal(size=30)), 100.0, max_iter=3)


def test_bias_is_bracket_midpoint_without_free_vectors():
    # no free multipliers: the bias is the middle of the interval allowed by
    # y_i f(x_i) >= 1 at alpha=0 and <= 1 at alpha=C
    rng = np.random.default_rng(707)
    checked = 0
    for _ in range(300):
        K, y, _ = random_problem(rng)
        C = float(10 ** rng.uniform(-2, 0))
        m = svm_train(K, y, C, tol=1e-8)
        a = m.alphas
        at0, atC = a <= 1e-9 * C, a >= C - 1e-9 * C
        if not np.all(at0 | atC):
            continue
        w = K @ (a * y)
        lo = max(np.max((y - w)[(at0 & (y > 0)) | (atC & (y < 0))], initial=-np.inf), -np.inf)
        hi = min(np.min((y - w)[(at0 & (y < 0)) | (atC & (y > 0))], initial=np.inf), np.inf)
        if np.isfinite(lo) and np.isfinite(hi):
            assert m.bias == pytest.approx((lo + hi) / 2, abs=1e-9)
            checked += 1
    assert checked >= 20


def test_multipliers_land_exactly_on_bounds():
    # a multiplier an ulp inside the box would count as free in the bias rule
    rng = np.random.default_rng(1)
    for _ in range(3000):
        K, y, _ = random_problem(rng)
        C = float(10 ** rng.uniform(-2, 2))
        a = svm_train(K, y, C, tol=1e-8).alphas
        near = ((a > 0) & (a < 1e-12 * C)) | ((a < C) & (a > C - 1e-12 * C))
        assert not near.any()
