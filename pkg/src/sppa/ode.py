"""Continuous-time lab: the accelerated flow, its energies, and Euler demos.

The flow couples a primal trajectory X and a momentum trajectory Z through

    Z  = b_t dX/dt + c_t L^{-1} grad f(X) + X,
    dZ/dt = -a_t L^{-1} grad f(X),        X(0) = Z(0) = x0,

for a smooth convex f and a positive schedule (a_t, b_t, c_t).  The
integrator is the semi-implicit (symplectic) Euler scheme: the X update is
implicit and reduces to one metric-prox solve per step, the Z update is
explicit.  With step s the X relation becomes

    z_k = (b/s)(x_{k+1} - x_k) + c L^{-1} grad f(x_{k+1}) + x_{k+1}

with coefficients frozen at t_k, i.e. x_{k+1} = prox(x_tilde, (b/s + 1)/c)
at x_tilde = (z_k + (b/s) x_k)/(b/s + 1); step s = 1 reproduces the discrete
solver exactly.  c_t = 0 (possible at t = 0) degenerates gracefully to
x_{k+1} = x_tilde.

Energies: E(t) = A_t (f(X)-f*) + 0.5 |Z-x*|_L^2 is the rate certificate;
G(t) = c_t (f(X)-f*) + 0.5 |X-x*|_L^2 - <X-x*, Z-x*>_L is the auxiliary
term whose weighted sum E + alpha G upgrades the rate from O(1/A) to
o(1/A).  Monotonicity is exact only in continuous time, so every check
carries an explicit linear-in-s budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .metric import Metric, as_point
from .objectives import Objective, metric_prox
from .schedules import ContinuousSchedule

__all__ = [
    "OdeTrajectory",
    "integrate_flow",
    "EnergySeries",
    "lyapunov_energy",
    "AugmentedEnergy",
    "augmented_energy",
    "hamiltonian_demo",
    "grad_energy_integral",
    "pairing_integral",
    "velocity_integral",
]


@dataclass(frozen=True)
class OdeState:
    """One trajectory sample: time, primal point and momentum point."""

    t: float
    x: np.ndarray
    z: np.ndarray


@dataclass(frozen=True)
class OdeTrajectory:
    """Uniformly sampled (t_k, X_k, Z_k) trajectory starting at t = 0."""

    ts: np.ndarray
    xs: np.ndarray
    zs: np.ndarray
    step: float
    scheme: str = "symplectic"

    @property
    def horizon(self) -> float:
        return float(self.ts[-1])

    def __len__(self) -> int:
        return self.ts.shape[0]

    def state(self, i: int) -> OdeState:
        return OdeState(t=float(self.ts[i]), x=self.xs[i], z=self.zs[i])


def integrate_flow(f: Objective, metric: Metric, cs: ContinuousSchedule,
                   x0, step: float, horizon: float) -> OdeTrajectory:
    """Integrate the flow with semi-implicit Euler steps of size ``step``."""
    if not f.smooth:
        raise ValueError("the flow requires a smooth objective (gradient oracle)")
    if not (step > 0 and horizon >= step):
        raise ValueError("need 0 < step <= horizon")
    x0 = as_point(x0, f.dim)
    n_steps = int(round(horizon / step))
    n = x0.shape[0]
    xs = np.empty((n_steps + 1, n))
    zs = np.empty((n_steps + 1, n))
    xs[0] = x0
    zs[0] = x0
    x, z = x0, x0.copy()
    for k in range(n_steps):
        t = k * step
        b_over_s = cs.b(t) / step
        x_tilde = (z + b_over_s * x) / (b_over_s + 1.0)
        c_t = cs.c(t)
        if c_t == 0.0:
            x = x_tilde
        else:
            weight = (b_over_s + 1.0) / c_t
            x = metric_prox(f, metric, x_tilde, weight).minimizer
        z = z - step * cs.a(t) * metric.solve(f.gradient(x))
        xs[k + 1] = x
        zs[k + 1] = z
    ts = np.arange(n_steps + 1) * step
    return OdeTrajectory(ts=ts, xs=xs, zs=zs, step=step)


@dataclass(frozen=True)
class EnergySeries:
    values: np.ndarray
    max_increment: float
    budget_per_step: float

    @property
    def monotone_within_budget(self) -> bool:
        return self.max_increment <= self.budget_per_step


def _gaps(traj: OdeTrajectory, f: Objective, xstar: np.ndarray, fstar: float | None):
    return np.array([f.gap(x, xstar, fstar) for x in traj.xs])


def lyapunov_energy(traj: OdeTrajectory, f: Objective, metric: Metric,
                    cs: ContinuousSchedule, xstar, fstar: float | None = None,
                    budget_factor: float = 10.0) -> EnergySeries:
    """E(t_k) along the trajectory plus its worst positive increment.

    The declared per-step tolerance is ``budget_factor * step``: the energy
    decreases exactly only in continuous time.
    """
    xstar = as_point(xstar, f.dim)
    if fstar is None:
        fstar = float(f.value(xstar))
    gaps = _gaps(traj, f, xstar, fstar)
    pot = np.array([cs.A(t) for t in traj.ts]) * gaps
    mix = np.array([0.5 * metric.norm_sq(z - xstar) for z in traj.zs])
    values = pot + mix
    incr = np.diff(values)
    return EnergySeries(values=values, max_increment=float(incr.max()) if incr.size else 0.0,
                        budget_per_step=budget_factor * traj.step)


@dataclass(frozen=True)
class AugmentedEnergy:
    g_values: np.ndarray
    e_alpha: np.ndarray
    alpha: float
    alpha_max: float
    sup_ratio_estimate: float
    max_increment: float
    budget_per_step: float
    min_value: float


def augmented_energy(traj: OdeTrajectory, f: Objective, metric: Metric,
                     cs: ContinuousSchedule, xstar, alpha: float,
                     fstar: float | None = None,
                     budget_factor: float = 10.0) -> AugmentedEnergy:
    """Auxiliary series G(t_k) and the perturbed energy E + alpha G.

    ``alpha`` must lie in (0, (1-d)/(1 + sup dc/dt / a)).  The schedule's
    derivative ratio is estimated by central differences over the second
    half of the time window: the admissibility requirement is asymptotic and
    the ratio may blow up at t = 0 for polynomial clocks.
    """
    if cs.d is None or not cs.d < 1.0:
        raise ValueError("augmented energy requires a schedule with declared d < 1")
    xstar = as_point(xstar, f.dim)
    if fstar is None:
        fstar = float(f.value(xstar))
    h = 1e-6
    tail = traj.ts[traj.ts >= traj.ts[-1] / 2.0]
    sup_ratio = 0.0
    for t in tail:
        a_t = cs.a(t)
        if a_t > 0:
            c_dot = (cs.c(t + h) - cs.c(t - h)) / (2.0 * h)
            sup_ratio = max(sup_ratio, c_dot / a_t)
    alpha_max = (1.0 - cs.d) / (1.0 + max(sup_ratio, 0.0))
    if not 0.0 < alpha < alpha_max:
        raise ValueError(f"alpha must lie in (0, {alpha_max:.6g}), got {alpha}")

    gaps = _gaps(traj, f, xstar, fstar)
    g_vals = (np.array([cs.c(t) for t in traj.ts]) * gaps
              + np.array([0.5 * metric.norm_sq(x - xstar) for x in traj.xs])
              - np.array([metric.inner(x - xstar, z - xstar)
                          for x, z in zip(traj.xs, traj.zs)]))
    e_vals = lyapunov_energy(traj, f, metric, cs, xstar, fstar, budget_factor).values
    e_alpha = e_vals + alpha * g_vals
    incr = np.diff(e_alpha)
    return AugmentedEnergy(
        g_values=g_vals, e_alpha=e_alpha, alpha=alpha, alpha_max=alpha_max,
        sup_ratio_estimate=sup_ratio,
        max_increment=float(incr.max()) if incr.size else 0.0,
        budget_per_step=budget_factor * traj.step,
        min_value=float(e_alpha.min()))


def hamiltonian_demo(step: float, n_steps: int, scheme: str) -> np.ndarray:
    """Integrate dp/dt = q, dq/dt = -p from (p, q) = (0, 1).

    The exact solution is p = sin t, q = cos t, a unit circle in phase
    space.  Returns an (n_steps + 1, 2) array of (p, q) samples under the
    chosen scheme:

    * ``explicit``  -- both updates use the current state; the squared
      radius grows by exactly (1 + step^2) per step;
    * ``implicit``  -- both updates use the next state; the squared radius
      shrinks by exactly (1 + step^2) per step;
    * ``symplectic`` -- p steps explicitly, q implicitly (using the fresh
      p); the radius oscillates but stays O(step)-close to 1 forever.
    """
    if not step > 0:
        raise ValueError("step must be positive")
    if scheme not in ("explicit", "implicit", "symplectic"):
        raise ValueError(f"scheme must be explicit, implicit or symplectic, got {scheme!r}")
    out = np.empty((n_steps + 1, 2))
    p, q = 0.0, 1.0
    out[0] = (p, q)
    det = 1.0 + step * step
    for k in range(n_steps):
        if scheme == "explicit":
            p, q = p + step * q, q - step * p
        elif scheme == "implicit":
            p, q = (p + step * q) / det, (q - step * p) / det
        else:
            p = p + step * q
            q = q - step * p
        out[k + 1] = (p, q)
    return out


# ---------------------------------------------------------------------------
# integral diagnostics (cumulative trapezoid rules along the trajectory)
# ---------------------------------------------------------------------------

def grad_energy_integral(traj: OdeTrajectory, f: Objective, metric: Metric,
                         cs: ContinuousSchedule) -> np.ndarray:
    """Cumulative integral of a_t c_t |grad f(X)|^2_{L^{-1}}."""
    w = np.array([cs.a(t) * cs.c(t) * metric.inv_norm_sq(f.gradient(x))
                  for t, x in zip(traj.ts, traj.xs)])
    return _cumtrap(w, traj.ts)


def pairing_integral(traj: OdeTrajectory, f: Objective, metric: Metric,
                     cs: ContinuousSchedule, xstar) -> np.ndarray:
    """Cumulative integral of (a_t - dA/dt) <grad f(X), X - x*>."""
    xstar = as_point(xstar, f.dim)
    w = np.array([(cs.a(t) - cs.A_dot(t)) * float(f.gradient(x) @ (x - xstar))
                  for t, x in zip(traj.ts, traj.xs)])
    return _cumtrap(w, traj.ts)


def velocity_integral(traj: OdeTrajectory, metric: Metric,
                      cs: ContinuousSchedule) -> np.ndarray:
    """Cumulative integral of b_t |dX/dt|^2_L, central differences on dX/dt."""
    if traj.xs.shape[0] < 3:
        return np.zeros(1)
    xdot = (traj.xs[2:] - traj.xs[:-2]) / (2.0 * traj.step)
    ts = traj.ts[1:-1]
    w = np.array([cs.b(t) * metric.norm_sq(v) for t, v in zip(ts, xdot)])
    return _cumtrap(w, ts)


def _cumtrap(values: np.ndarray, ts: np.ndarray) -> np.ndarray:
    out = np.zeros_like(values)
    if values.size >= 2:
        dt = np.diff(ts)
        out[1:] = np.cumsum(0.5 * dt * (values[1:] + values[:-1]))
    return out
