import math

import numpy as np
import pytest

from sppa import (
    L1Norm,
    Metric,
    Quadratic,
    Schedule,
    augmented_energy,
    continuous_schedule,
    hamiltonian_demo,
    integrate_flow,
    lyapunov_energy,
    run_sppa,
)
from sppa.ode import (
    OdeTrajectory,
    grad_energy_integral,
    pairing_integral,
    velocity_integral,
)

I1 = Metric.identity()


def simple_quadratic(n=1):
    return Quadratic(np.eye(n))


# ---------------------------------------------------------------------------
# oscillator demo
# ---------------------------------------------------------------------------

def test_explicit_euler_energy_growth_closed_form():
    s, n = 0.1, 1000
    pq = hamiltonian_demo(s, n, "explicit")
    energy = (pq ** 2).sum(axis=1)
    ref = (1.0 + s * s) ** np.arange(n + 1)
    assert np.abs(energy / ref - 1.0).max() <= 1e-9


def test_implicit_euler_energy_decay_closed_form():
    s, n = 0.1, 1000
    pq = hamiltonian_demo(s, n, "implicit")
    energy = (pq ** 2).sum(axis=1)
    ref = (1.0 + s * s) ** (-np.arange(n + 1.0))
    assert np.abs(energy / ref - 1.0).max() <= 1e-9


def test_symplectic_euler_energy_stays_in_band():
    pq = hamiltonian_demo(0.1, 1000, "symplectic")
    energy = (pq ** 2).sum(axis=1)
    assert np.abs(energy - 1.0).max() <= 0.12


def test_symplectic_tracks_exact_circle():
    s, n = 0.01, 500
    pq = hamiltonian_demo(s, n, "symplectic")
    ts = np.arange(n + 1) * s
    assert np.abs(pq[:, 0] - np.sin(ts)).max() <= 0.02
    assert np.abs(pq[:, 1] - np.cos(ts)).max() <= 0.02


def test_demo_rejects_bad_scheme_and_step():
    with pytest.raises(ValueError, match="scheme"):
        hamiltonian_demo(0.1, 10, "leapfrog")
    with pytest.raises(ValueError, match="step"):
        hamiltonian_demo(-0.1, 10, "explicit")


# ---------------------------------------------------------------------------
# flow integration
# ---------------------------------------------------------------------------

def test_flow_rate_bound_simple_quadratic():
    f = simple_quadratic()
    cs = continuous_schedule("polynomial", p=2, d=1.0)
    traj = integrate_flow(f, I1, cs, [1.0], 1e-3, 10.0)
    gap_T = f.gap(traj.xs[-1], np.zeros(1), 0.0)
    # A_T = 100; bound (gap_0 + dist^2/2)/A_T = 1/100
    assert gap_T <= (0.5 + 0.5) / 100.0


def test_flow_stationary_at_minimizer():
    f = simple_quadratic(2)
    cs = continuous_schedule("polynomial", p=2, d=1.0)
    traj = integrate_flow(f, Metric.identity(), cs, [0.0, 0.0], 1e-2, 1.0)
    assert np.abs(traj.xs).max() == 0.0
    assert np.abs(traj.zs).max() == 0.0


def test_flow_first_order_in_step():
    f = simple_quadratic()
    cs = continuous_schedule("polynomial", p=2, d=1.0)
    gaps = []
    for s in (4e-3, 2e-3, 1e-3):
        traj = integrate_flow(f, I1, cs, [1.0], s, 2.0)
        gaps.append(f.gap(traj.xs[-1], np.zeros(1), 0.0))
    d1 = abs(gaps[0] - gaps[1])
    d2 = abs(gaps[1] - gaps[2])
    # halving the step roughly halves the discretization error
    assert d2 <= 0.75 * d1
    c_hat = d2 / 1e-3
    assert d1 <= 3.0 * c_hat * 2e-3


def test_flow_requires_smooth_objective():
    cs = continuous_schedule("polynomial", p=2, d=1.0)
    with pytest.raises(ValueError, match="smooth"):
        integrate_flow(L1Norm(1.0, dim=1), I1, cs, [1.0], 0.1, 1.0)


def test_flow_implicit_step_satisfies_defining_relation():
    # each step solves z_k = (b/s)(x' - x) + c L^{-1} grad f(x') + x'
    rng = np.random.default_rng(6)
    M = rng.standard_normal((3, 3))
    f = Quadratic(M @ M.T + np.eye(3), rng.standard_normal(3))
    L = Metric.diagonal([1.0, 2.0, 0.5])
    cs = continuous_schedule("polynomial", p=2, d=1.0)
    s = 0.05
    traj = integrate_flow(f, L, cs, rng.standard_normal(3), s, 1.0)
    for k in range(len(traj.ts) - 1):
        t = traj.ts[k]
        b_over_s = cs.b(t) / s
        c_t = cs.c(t)
        lhs = (b_over_s * (traj.xs[k + 1] - traj.xs[k])
               + c_t * L.solve(f.gradient(traj.xs[k + 1])) + traj.xs[k + 1])
        assert np.abs(lhs - traj.zs[k]).max() <= 1e-9 * max(1.0, np.abs(traj.zs[k]).max())


def test_flow_step_one_matches_discrete_solver():
    # constant coefficients make the continuous and discrete schedules agree,
    # so one unit step of the flow must reproduce the discrete iteration
    a0, b0, c0 = 2.0, 1.5, 2.0
    from sppa.schedules import ContinuousSchedule
    cs = ContinuousSchedule(a=lambda t: a0, b=lambda t: b0, c=lambda t: c0,
                            A=lambda t: a0 * b0, A_dot=lambda t: 0.0,
                            family="constant", d=None)
    disc = Schedule(a=lambda k: a0, b=lambda k: b0, c=lambda k: c0,
                    A=lambda k: a0 * b0, family="constant")
    rng = np.random.default_rng(12)
    M = rng.standard_normal((3, 3))
    f = Quadratic(M @ M.T + 0.5 * np.eye(3), rng.standard_normal(3))
    x0 = rng.standard_normal(3)
    K = 20
    traj = integrate_flow(f, I1, cs, x0, 1.0, float(K))
    run = run_sppa(f, I1, disc, x0, K, verify_schedule=False)
    np.testing.assert_allclose(traj.xs, run.xs, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(traj.zs, run.zs, rtol=1e-12, atol=1e-11)


# ---------------------------------------------------------------------------
# energies
# ---------------------------------------------------------------------------

def test_energy_constant_on_frozen_trajectory():
    # X pinned at the minimizer, Z pinned at x0: only the mixed term remains
    x0 = np.array([2.0, -1.0])
    xstar = np.zeros(2)
    m = 50
    traj = OdeTrajectory(ts=np.arange(m + 1) * 0.1,
                         xs=np.tile(xstar, (m + 1, 1)),
                         zs=np.tile(x0, (m + 1, 1)), step=0.1)
    f = simple_quadratic(2)
    cs = continuous_schedule("polynomial", p=2, d=1.0)
    series = lyapunov_energy(traj, f, Metric.identity(), cs, xstar, 0.0)
    np.testing.assert_allclose(series.values, 0.5 * 5.0, rtol=1e-14)


def test_energy_nonincreasing_in_budget_on_quadratic():
    f = simple_quadratic()
    cs = continuous_schedule("polynomial", p=2, d=1.0)
    s = 1e-3
    traj = integrate_flow(f, I1, cs, [1.0], s, 10.0)
    series = lyapunov_energy(traj, f, I1, cs, [0.0], 0.0)
    assert series.max_increment <= 10.0 * s
    assert series.monotone_within_budget


def test_energy_at_zero_clock_is_mixed_term_only():
    f = simple_quadratic()
    cs = continuous_schedule("polynomial", p=2, d=1.0)   # A_0 = 0
    traj = integrate_flow(f, I1, cs, [1.0], 1e-2, 0.1)
    series = lyapunov_energy(traj, f, I1, cs, [0.0], 0.0)
    assert series.values[0] == pytest.approx(0.5)


def test_augmented_energy_zero_on_saddle_trajectory():
    xstar = np.array([1.0, 2.0])
    m = 10
    traj = OdeTrajectory(ts=np.arange(m + 1) * 0.1,
                         xs=np.tile(xstar, (m + 1, 1)),
                         zs=np.tile(xstar, (m + 1, 1), ), step=0.1)
    f = Quadratic(np.eye(2), -xstar)   # minimizer at xstar
    cs = continuous_schedule("polynomial", p=2, d=0.5)
    out = augmented_energy(traj, f, Metric.identity(), cs, xstar, 0.1)
    np.testing.assert_allclose(out.g_values, 0.0, atol=1e-12)


def test_augmented_energy_monotone_and_nonnegative():
    f = simple_quadratic()
    cs = continuous_schedule("polynomial", p=2, d=0.5)
    s = 1e-3
    traj = integrate_flow(f, I1, cs, [1.0], s, 10.0)
    out = augmented_energy(traj, f, I1, cs, [0.0], 0.25, 0.0)
    assert out.max_increment <= 10.0 * s
    assert out.min_value >= -1e-12


def test_augmented_energy_rejects_inadmissible_alpha():
    f = simple_quadratic()
    cs = continuous_schedule("polynomial", p=2, d=0.5)
    traj = integrate_flow(f, I1, cs, [1.0], 1e-2, 5.0)
    with pytest.raises(ValueError, match="alpha"):
        augmented_energy(traj, f, I1, cs, [0.0], 0.9)
    cs1 = continuous_schedule("polynomial", p=2, d=1.0)
    with pytest.raises(ValueError, match="d < 1"):
        augmented_energy(traj, f, I1, cs1, [0.0], 0.1)


# ---------------------------------------------------------------------------
# integral certificates
# ---------------------------------------------------------------------------

def _qp_trajectory():
    rng = np.random.default_rng(21)
    V, _ = np.linalg.qr(rng.standard_normal((4, 4)))
    Q = (V * np.array([0.5, 1.0, 2.0, 4.0])) @ V.T
    f = Quadratic(0.5 * (Q + Q.T))
    cs = continuous_schedule("polynomial", p=2, d=0.5)
    s = 1e-3
    x0 = rng.standard_normal(4)
    traj = integrate_flow(f, I1, cs, x0, s, 8.0)
    return f, cs, traj, s


def test_gradient_energy_integral_bounded():
    f, cs, traj, s = _qp_trajectory()
    e0 = lyapunov_energy(traj, f, I1, cs, np.zeros(4), 0.0).values[0]
    total = grad_energy_integral(traj, f, I1, cs)[-1]
    assert total <= e0 + 10.0 * s * traj.horizon


def test_pairing_integral_bounded():
    f, cs, traj, s = _qp_trajectory()
    e0 = lyapunov_energy(traj, f, I1, cs, np.zeros(4), 0.0).values[0]
    total = pairing_integral(traj, f, I1, cs, np.zeros(4))[-1]
    assert total <= e0 + 10.0 * s * traj.horizon


def test_velocity_integral_bounded_under_assumptions():
    f, cs, traj, s = _qp_trajectory()
    alpha = 0.2
    out = augmented_energy(traj, f, I1, cs, np.zeros(4), alpha, 0.0)
    total = velocity_integral(traj, I1, cs)[-1]
    assert total <= out.e_alpha[0] / alpha + 10.0 * s * traj.horizon


def test_terminal_rate_certificate_on_smooth_problems():
    for n, seed in ((1, 1), (3, 5)):
        rng = np.random.default_rng(seed)
        M = rng.standard_normal((n, n))
        f = Quadratic(M @ M.T + np.eye(n))
        cs = continuous_schedule("polynomial", p=2, d=1.0)
        s = 1e-3
        traj = integrate_flow(f, I1, cs, rng.standard_normal(n), s, 5.0)
        series = lyapunov_energy(traj, f, I1, cs, np.zeros(n), 0.0)
        gap_T = f.gap(traj.xs[-1], np.zeros(n), 0.0)
        assert cs.A(traj.horizon) * gap_T <= series.values[0] * (1.0 + 50.0 * s)


def test_trajectory_state_accessor():
    f = simple_quadratic()
    cs = continuous_schedule("polynomial", p=2, d=1.0)
    traj = integrate_flow(f, I1, cs, [1.0], 0.1, 1.0)
    assert len(traj) == 11
    s0 = traj.state(0)
    assert s0.t == 0.0
    np.testing.assert_allclose(s0.x, [1.0])
    np.testing.assert_allclose(s0.z, [1.0])
    assert traj.state(10).t == pytest.approx(1.0)
