import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from sppa import (
    INFINITE,
    AffineIndicator,
    CustomObjective,
    L1Norm,
    Metric,
    Quadratic,
    QuadraticPlusL1,
    is_infinite,
    metric_prox,
    objective_from_config,
)

I2 = Metric.identity()


def test_quadratic_value():
    f = Quadratic(np.eye(2))
    assert f.value([3.0, 4.0]) == pytest.approx(12.5)


def test_l1_value():
    f = L1Norm(2.0)
    assert f.value([1.0, -2.0]) == pytest.approx(6.0)


def test_affine_indicator_value():
    f = AffineIndicator([[1.0, 1.0]], [2.0])
    assert f.value([1.0, 1.0]) == 0.0
    assert is_infinite(f.value([0.0, 0.0]))


def test_infinite_marker_comparisons():
    assert INFINITE > 1e300
    assert not (INFINITE < 5.0)
    assert INFINITE == INFINITE
    assert INFINITE >= INFINITE
    assert repr(INFINITE) == "INFINITE"


def test_quadratic_prox_simple():
    f = Quadratic(np.eye(2))
    res = metric_prox(f, I2, [2.0, 2.0], 1.0)
    np.testing.assert_allclose(res.minimizer, [1.0, 1.0], atol=1e-14)
    assert res.inner_iterations == 0


def test_l1_prox_soft_threshold_with_subgradient_check():
    f = L1Norm(1.0)
    res = metric_prox(f, I2, [3.0, -0.5, 2.0], 1.0)
    np.testing.assert_allclose(res.minimizer, [2.0, 0.0, 1.0], atol=1e-14)
    # subgradient inclusion: f(p) >= f(x) + <g, p - x> on sampled points
    rng = np.random.default_rng(0)
    x, g = res.minimizer, res.tilde_subgradient
    for _ in range(50):
        p = rng.standard_normal(3) * 3
        assert f.value(p) >= f.value(x) + g @ (p - x) - 1e-9


def test_quadratic_prox_weighted_metric_stationarity():
    f = Quadratic(np.diag([2.0, 4.0]), [-2.0, -4.0])
    L = Metric.diagonal([1.0, 2.0])
    res = metric_prox(f, L, [0.0, 0.0], 2.0)
    # stationarity of the subproblem: grad f(x) + w L (x - y) = 0
    grad = f.gradient(res.minimizer) + 2.0 * L.apply(res.minimizer - np.zeros(2))
    assert np.abs(grad).max() <= 1e-12
    # equivalently (Q + 2L) x = 2 L y + (2, 4)
    M = f.Q + 2.0 * L.matrix(2)
    np.testing.assert_allclose(M @ res.minimizer, [2.0, 4.0], atol=1e-12)


def test_gradient_examples():
    f = Quadratic(np.eye(2))
    np.testing.assert_allclose(f.gradient([1.0, 2.0]), [1.0, 2.0])
    g = Quadratic(np.diag([2.0, 3.0]), [1.0, 0.0])
    np.testing.assert_allclose(g.gradient([1.0, 1.0]), [3.0, 3.0])


def test_gradient_finite_difference_oracle():
    rng = np.random.default_rng(11)
    M = rng.standard_normal((4, 4))
    f = Quadratic(M @ M.T + np.eye(4), rng.standard_normal(4), 0.3)
    x = rng.standard_normal(4)
    g = f.gradient(x)
    h = 1e-6
    for i in range(4):
        e = np.zeros(4)
        e[i] = h
        fd = (f.value(x + e) - f.value(x - e)) / (2 * h)
        assert abs(fd - g[i]) <= 1e-6 * max(1.0, abs(g[i]))


def test_gradient_unavailable_for_nonsmooth():
    with pytest.raises(ValueError, match="gradient unavailable"):
        L1Norm(1.0).gradient([1.0])


def test_prox_weight_must_be_positive():
    with pytest.raises(ValueError, match="positive"):
        metric_prox(Quadratic(np.eye(1)), I2, [1.0], 0.0)


def test_unsupported_pairing_named():
    L = Metric.dense([[2.0, 1.0], [1.0, 2.0]])
    with pytest.raises(ValueError, match=r"\(l1, dense metric\)"):
        metric_prox(L1Norm(1.0), L, [1.0, 1.0], 1.0)


def test_quadratic_requires_psd():
    with pytest.raises(ValueError, match="semidefinite"):
        Quadratic([[1.0, 2.0], [2.0, 1.0]])


def test_sum_prox_matches_scalar_minimization_oracle():
    quad = Quadratic(np.diag([2.0, 0.5, 1.0]), [0.3, -1.0, 0.0])
    f = QuadraticPlusL1(quad, L1Norm(0.7))
    L = Metric.diagonal([1.0, 2.0, 0.5])
    y = np.array([1.5, -2.0, 0.1])
    w = 1.3
    res = metric_prox(f, L, y, w)
    ell = L.diagonal_values(3)
    for i in range(3):
        def scalar(t, i=i):
            return (0.5 * quad.Q[i, i] * t * t + quad.b[i] * t + 0.7 * abs(t)
                    + 0.5 * w * ell[i] * (t - y[i]) ** 2)
        best = minimize_scalar(scalar, bounds=(-10, 10), method="bounded",
                               options={"xatol": 1e-12})
        assert abs(res.minimizer[i] - best.x) <= 1e-6
        # the closed form must be at least as good as the numeric oracle
        assert scalar(res.minimizer[i]) <= scalar(best.x) + 1e-12


def test_sum_prox_rejects_nondiagonal_quadratic():
    quad = Quadratic([[1.0, 0.2], [0.2, 1.0]])
    f = QuadraticPlusL1(quad, L1Norm(1.0))
    with pytest.raises(ValueError, match="non-diagonal"):
        metric_prox(f, I2, [1.0, 1.0], 1.0)


def test_affine_prox_is_projection():
    f = AffineIndicator([[1.0, 1.0]], [2.0])
    res = metric_prox(f, I2, [3.0, 3.0], 1.0)
    np.testing.assert_allclose(res.minimizer, [1.0, 1.0], atol=1e-12)
    # projection is independent of the prox weight
    res2 = metric_prox(f, I2, [3.0, 3.0], 17.0)
    np.testing.assert_allclose(res.minimizer, res2.minimizer, atol=1e-12)
    assert f.value(res.minimizer) == 0.0


def test_prox_subgradient_inequality_property():
    rng = np.random.default_rng(3)
    L = Metric.diagonal([1.0, 2.0, 0.7, 1.4])
    objectives = [
        Quadratic(np.diag([1.0, 2.0, 0.5, 3.0]), rng.standard_normal(4)),
        L1Norm(0.9),
        QuadraticPlusL1(Quadratic(np.diag([1.0, 0.0, 2.0, 0.3])), L1Norm(0.4)),
    ]
    for f in objectives:
        for _ in range(10):
            y = rng.standard_normal(4) * 2
            res = metric_prox(f, L, y, float(rng.uniform(0.2, 5.0)))
            x, g = res.minimizer, res.tilde_subgradient
            fx = f.value(x)
            for _ in range(50):
                p = rng.standard_normal(4) * 3
                assert f.value(p) >= fx + g @ (p - x) - 1e-9


def test_prox_firmly_nonexpansive_property():
    rng = np.random.default_rng(4)
    M = rng.standard_normal((3, 3))
    L = Metric.dense(M @ M.T + 3 * np.eye(3))
    f = Quadratic(M.T @ M, rng.standard_normal(3))
    for _ in range(40):
        y1 = rng.standard_normal(3) * 2
        y2 = rng.standard_normal(3) * 2
        w = float(rng.uniform(0.1, 4.0))
        x1 = metric_prox(f, L, y1, w).minimizer
        x2 = metric_prox(f, L, y2, w).minimizer
        assert L.norm_sq(x1 - x2) <= L.norm_sq(y1 - y2) * (1.0 + 1e-10)


def test_prox_large_weight_approaches_anchor():
    rng = np.random.default_rng(5)
    y = rng.standard_normal(4)
    for f in [L1Norm(1.0), QuadraticPlusL1(Quadratic(np.diag([1.0, 1.0, 2.0, 0.5])), L1Norm(1.0))]:
        x = metric_prox(f, Metric.identity(), y, 1e8).minimizer
        assert np.linalg.norm(x - y) <= 1e-6


def test_custom_objective_records_inner_iterations():
    def prox_fn(metric, y, weight):
        return y / (1.0 + 1.0 / weight), 7

    f = CustomObjective(lambda x: 0.5 * float(x @ x), prox_fn, smooth=False, dim=2)
    res = metric_prox(f, I2, [1.0, 1.0], 2.0)
    assert res.inner_iterations == 7
    np.testing.assert_allclose(res.minimizer, np.array([1.0, 1.0]) / 1.5)


def test_quadratic_gap_is_cancellation_free():
    f = Quadratic(np.diag([2.0, 1.0]), [0.0, 0.0], 5.0)
    xstar = np.zeros(2)
    x = np.array([1e-160, -1e-160])
    gap = f.gap(x, xstar, f.value(xstar))
    assert gap == pytest.approx(1.5e-320, rel=1e-6)
    # a direct value difference would round to zero against c = 5
    assert f.value(x) - f.value(xstar) == 0.0


def test_objective_config_roundtrip():
    objs = [
        Quadratic(np.diag([1.0, 2.0]), [0.5, -0.5], 0.1),
        L1Norm(1.5, dim=3),
        QuadraticPlusL1(Quadratic(np.diag([1.0, 2.0])), L1Norm(0.3)),
        AffineIndicator([[1.0, 1.0]], [2.0]),
    ]
    for f in objs:
        g = objective_from_config(f.to_config())
        assert g.kind == f.kind


def test_objective_config_errors_name_fields():
    with pytest.raises(ValueError, match="problem.weight"):
        objective_from_config({"kind": "l1"})
    with pytest.raises(ValueError, match="problem.kind"):
        objective_from_config({"kind": "entropy"})
