"""The discrete solvers: plain, accelerated and symplectic proximal point.

All three algorithms share the metric-prox oracle and record a per-iteration
trace of objective gaps, Lyapunov energy, implicit-subgradient norms and the
partial sums that certify their convergence rates.  Runs are deterministic:
iteration counts are fixed up front and there is no tolerance-based early
stopping, so certificate prefixes are well defined.

Conventions:

* the Lyapunov energy at step k is ``E(k) = A_k * (f(x_k) - f*) + 0.5 |z_k - x*|_L^2``;
* the implicit subgradient of the prox step is
  ``(b_k + 1)/c_k * L (x_tilde_{k+1} - x_{k+1})``, an element of the
  subdifferential at x_{k+1};
* when the true minimum is unknown, gap columns are relative to the best
  value seen and the run is marked ``gap_mode = "relative"``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .metric import Metric, as_point
from .objectives import Objective, is_infinite, metric_prox
from .schedules import Schedule, certify

__all__ = ["TraceRecord", "SolverRun", "run_ppa", "run_appa", "run_sppa", "tilde_gradient"]


@dataclass(frozen=True)
class TraceRecord:
    """Per-iterate diagnostics; ``None`` marks quantities that do not apply."""

    k: int
    objective_gap: float
    lyapunov_e: float | None = None
    e_alpha: float | None = None
    tilde_grad_norm_sq: float | None = None
    step_norm_x: float | None = None
    step_norm_z: float | None = None
    sum_pairing_prefix: float | None = None     # sum of (a_k + A_k - A_{k+1}) <g, x-x*>
    sum_gradsq_prefix: float | None = None      # sum of (a_k c_k - a_k^2/2) |g|^2_{L^-1}
    bound_rhs: float | None = None              # theoretical gap bound at this k


@dataclass
class SolverRun:
    """Iterates and trace of one solver execution; immutable once returned."""

    algorithm: str
    xs: np.ndarray                       # (K+1, n) primal iterates
    trace: list[TraceRecord]
    gap_mode: str                        # "absolute" (truth known) or "relative"
    zs: np.ndarray | None = None         # momentum iterates (sppa)
    vs: np.ndarray | None = None         # extrapolation iterates (appa)
    x_tildes: np.ndarray | None = None   # prox anchors (sppa)
    ys: np.ndarray | None = None         # prox anchors (appa)
    tilde_grads: np.ndarray | None = None  # (K, n) implicit subgradients
    schedule: Schedule | None = None
    rhos: np.ndarray | None = None
    A_vals: np.ndarray | None = None
    fstar: float | None = None
    xstar: np.ndarray | None = None
    e0: float | None = None
    extras: dict = field(default_factory=dict)

    @property
    def iterations(self) -> int:
        return self.xs.shape[0] - 1

    def gaps(self) -> np.ndarray:
        return np.array([r.objective_gap for r in self.trace])

    def energies(self) -> np.ndarray:
        return np.array([math.nan if r.lyapunov_e is None else r.lyapunov_e
                         for r in self.trace])


def _normalize_rhos(rhos, iterations: int) -> np.ndarray:
    if isinstance(rhos, (int, float)):
        vals = np.full(iterations, float(rhos))
    elif callable(rhos):
        vals = np.array([float(rhos(k)) for k in range(iterations)])
    else:
        vals = np.asarray(list(rhos), dtype=float)
        if vals.shape[0] < iterations:
            raise ValueError(f"need {iterations} rho values, got {vals.shape[0]}")
        vals = vals[:iterations]
    for i, r in enumerate(vals):
        if not (np.isfinite(r) and r > 0):
            raise ValueError(f"rhos[{i}] must be positive")
    return vals


def _value_as_float(f: Objective, x) -> float:
    v = f.value(x)
    return math.inf if is_infinite(v) else float(v)


def _resolve_truth(f: Objective, metric: Metric, x0: np.ndarray, omega, fstar):
    """Pick the reference minimizer and distance term from the supplied set."""
    if omega is None or len(omega) == 0:
        return None, fstar, None
    reps = [as_point(r, x0.shape[0]) for r in omega]
    dists = [metric.norm_sq(x0 - r) for r in reps]
    i = int(np.argmin(dists))
    xstar = reps[i]
    if fstar is None:
        v = f.value(xstar)
        fstar = float(v)
    return xstar, fstar, dists[i]


def tilde_gradient(s: Schedule, k: int, x_tilde, x_next, metric: Metric) -> np.ndarray:
    """Implicit subgradient (b_k + 1)/c_k * L (x_tilde - x_next) of the prox step."""
    w = s.prox_weight(k)
    x_tilde = as_point(x_tilde)
    x_next = as_point(x_next, x_tilde.shape[0])
    return w * metric.apply(x_tilde - x_next)


# ---------------------------------------------------------------------------
# plain proximal point
# ---------------------------------------------------------------------------

def run_ppa(f: Objective, metric: Metric, rhos, x0, iterations: int, *,
            omega=None, fstar: float | None = None) -> SolverRun:
    """Proximal point iteration x_{k+1} = prox(x_k, 1/rho_k) in the L metric.

    When solution representatives are supplied the trace carries the
    classical gap bound dist_L(x0)^2 / (2 sum_{i<k} rho_i).
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    x0 = as_point(x0, f.dim)
    rho = _normalize_rhos(rhos, iterations)
    xstar, fstar, dist_sq = _resolve_truth(f, metric, x0, omega, fstar)
    gap_mode = "absolute" if fstar is not None else "relative"

    n = x0.shape[0]
    xs = np.empty((iterations + 1, n))
    grads = np.empty((iterations, n))
    xs[0] = x0
    x = x0
    for k in range(iterations):
        res = metric_prox(f, metric, x, 1.0 / rho[k])
        x = res.minimizer
        xs[k + 1] = x
        grads[k] = res.tilde_subgradient

    best = math.inf
    trace = []
    rho_cumsum = np.concatenate([[0.0], np.cumsum(rho)])
    for k in range(iterations + 1):
        if gap_mode == "absolute":
            gap = f.gap(xs[k], xstar, fstar)
        else:
            v = _value_as_float(f, xs[k])
            best = min(best, v)
            gap = v - best
        bound = None
        if dist_sq is not None and k >= 1:
            bound = dist_sq / (2.0 * rho_cumsum[k])
        trace.append(TraceRecord(
            k=k, objective_gap=gap,
            tilde_grad_norm_sq=metric.inv_norm_sq(grads[k]) if k < iterations else None,
            step_norm_x=math.sqrt(metric.norm_sq(xs[k] - xs[k - 1])) if k >= 1 else None,
            bound_rhs=bound))
    return SolverRun(algorithm="ppa", xs=xs, trace=trace, gap_mode=gap_mode,
                     tilde_grads=grads, rhos=rho, fstar=fstar, xstar=xstar,
                     extras={"dist_sq": dist_sq})


# ---------------------------------------------------------------------------
# accelerated proximal point (estimate-sequence form)
# ---------------------------------------------------------------------------

def run_appa(f: Objective, rhos, x0, big_a: float, iterations: int, *,
             omega=None, fstar: float | None = None,
             metric: Metric | None = None) -> SolverRun:
    """Accelerated proximal point iteration with extrapolation parameter A > 0.

    Defined for the identity metric only.  Per step:

        alpha_k = (sqrt((A_k rho_k)^2 + 4 A_k rho_k) - A_k rho_k) / 2
        y_k     = (1 - alpha_k) x_k + alpha_k v_k
        x_{k+1} = prox(y_k, 1/rho_k)
        v_{k+1} = v_k + (x_{k+1} - y_k)/alpha_k
        A_{k+1} = (1 - alpha_k) A_k              (kept in log space)

    The trace records the classical bound
    4 (f(x0) - f* + (A/2) dist^2) / (A (sum_{i<k} sqrt(rho_i))^2).
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    if metric is not None and metric.kind != "identity":
        raise ValueError("accelerated proximal point is defined for the identity metric only")
    metric = Metric.identity() if metric is None else metric
    if not big_a > 0:
        raise ValueError("A must be positive")
    x0 = as_point(x0, f.dim)
    v0 = f.value(x0)
    if is_infinite(v0) or not math.isfinite(float(v0)):
        raise ValueError("f(x0) must be finite")
    v0 = float(v0)
    rho = _normalize_rhos(rhos, iterations)
    xstar, fstar, dist_sq = _resolve_truth(f, metric, x0, omega, fstar)
    gap_mode = "absolute" if fstar is not None else "relative"

    n = x0.shape[0]
    xs = np.empty((iterations + 1, n))
    vs = np.empty((iterations + 1, n))
    ys = np.empty((iterations, n))
    grads = np.empty((iterations, n))
    alphas = np.empty(iterations)
    A_log = np.empty(iterations + 1)
    xs[0] = x0
    vs[0] = x0
    x, v = x0, x0.copy()
    log_a = math.log(big_a)
    A_log[0] = log_a
    for k in range(iterations):
        a_rho = math.exp(log_a) * rho[k]
        alpha = 0.5 * (math.sqrt(a_rho * a_rho + 4.0 * a_rho) - a_rho)
        alphas[k] = alpha
        y = (1.0 - alpha) * x + alpha * v
        ys[k] = y
        res = metric_prox(f, metric, y, 1.0 / rho[k])
        x = res.minimizer
        grads[k] = res.tilde_subgradient
        v = v + (x - y) / alpha
        log_a += math.log1p(-alpha)
        xs[k + 1] = x
        vs[k + 1] = v
        A_log[k + 1] = log_a

    best = math.inf
    sqrt_rho_cumsum = np.concatenate([[0.0], np.cumsum(np.sqrt(rho))])
    trace = []
    for k in range(iterations + 1):
        if gap_mode == "absolute":
            gap = f.gap(xs[k], xstar, fstar)
        else:
            val = _value_as_float(f, xs[k])
            best = min(best, val)
            gap = val - best
        bound = None
        if dist_sq is not None and fstar is not None and k >= 1:
            # undefined at k = 0 (empty accumulated-parameter sum)
            ssum = sqrt_rho_cumsum[k]
            bound = 4.0 * (v0 - fstar + 0.5 * big_a * dist_sq) / (big_a * ssum * ssum)
        trace.append(TraceRecord(
            k=k, objective_gap=gap,
            tilde_grad_norm_sq=float(grads[k] @ grads[k]) if k < iterations else None,
            step_norm_x=float(np.linalg.norm(xs[k] - xs[k - 1])) if k >= 1 else None,
            bound_rhs=bound))
    return SolverRun(algorithm="appa", xs=xs, trace=trace, gap_mode=gap_mode,
                     vs=vs, ys=ys, tilde_grads=grads, rhos=rho,
                     A_vals=np.exp(A_log), fstar=fstar, xstar=xstar,
                     extras={"alphas": alphas, "A_log": A_log, "big_a": big_a,
                             "dist_sq": dist_sq})


# ---------------------------------------------------------------------------
# symplectic proximal point
# ---------------------------------------------------------------------------

def _estimate_alpha(s: Schedule, iterations: int) -> float | None:
    """Admissible perturbation weight for the augmented energy, or None."""
    if s.d is None or not s.d < 1.0:
        return None
    sup = 0.0
    for k in range(max(1, iterations)):
        a = s.a(k)
        if a > 0:
            sup = max(sup, (s.c(k + 1) - s.c(k)) / a)
    upper = (1.0 - s.d) / (1.0 + max(sup, 0.0))
    return 0.5 * upper if upper > 0 else None


def run_sppa(f: Objective, metric: Metric, s: Schedule, x0, iterations: int, *,
             omega=None, fstar: float | None = None,
             verify_schedule: bool = True) -> SolverRun:
    """Symplectic proximal point iteration driven by schedule ``s``.

    Starting from z_0 = x_0, each step computes

        x_tilde = (z_k + b_k x_k) / (b_k + 1)
        x_{k+1} = prox(x_tilde, (b_k + 1)/c_k)          in the L metric
        z_{k+1} = z_k + a_k (b_k + 1)/c_k (x_{k+1} - x_tilde)

    The trace records the Lyapunov energy, the implicit subgradient norms
    and the two certificate partial sums.  ``verify_schedule=False`` waives
    the up-front hypothesis scan (the scan covers the run horizon).
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    if verify_schedule:
        report = certify(s, max(2, iterations), "T4")
        if not report.passed:
            failed = [c.name for c in report.conditions if not c.passed]
            raise ValueError(
                "schedule fails the rate-certificate conditions "
                f"({'; '.join(failed)}); pass verify_schedule=False to waive")
    x0 = as_point(x0, f.dim)
    xstar, fstar, dist_sq = _resolve_truth(f, metric, x0, omega, fstar)
    gap_mode = "absolute" if fstar is not None else "relative"
    alpha = _estimate_alpha(s, iterations) if xstar is not None else None

    n = x0.shape[0]
    K = iterations
    xs = np.empty((K + 1, n))
    zs = np.empty((K + 1, n))
    xts = np.empty((K, n))
    grads = np.empty((K, n))
    # per-step coefficients stop at K-1 so finite rho sequences of length K
    # drive exactly K steps; only the rate clock extends to K
    a_vals = np.array([s.a(k) for k in range(K)])
    b_vals = np.array([s.b(k) for k in range(K)])
    c_vals = np.array([s.c(k) for k in range(K)])
    A_vals = np.array([s.A(k) for k in range(K + 1)])
    xs[0] = x0
    zs[0] = x0

    sum22 = np.zeros(K + 1)
    sum23 = np.zeros(K + 1)
    x, z = x0, x0.copy()
    for k in range(K):
        bk = b_vals[k]
        weight = s.prox_weight(k)
        gain = s.z_gain(k)
        if not (np.isfinite(weight) and weight > 0 and np.isfinite(gain)):
            raise ValueError(f"schedule coefficients not representable at k={k} "
                             f"(prox weight {weight}, gain {gain})")
        xt = (z + bk * x) / (bk + 1.0)
        xts[k] = xt
        res = metric_prox(f, metric, xt, weight)
        x_next = res.minimizer
        grads[k] = res.tilde_subgradient
        # certificate sums in ratio form: gain * L(xt - x') equals a_k * g
        diff = xt - x_next
        g_scaled = gain * metric.apply(diff)
        if xstar is not None:
            if a_vals[k] > 0:
                ratio_da = (A_vals[k + 1] - A_vals[k]) / a_vals[k]
                sum22[k + 1] = sum22[k] + (1.0 - ratio_da) * float(g_scaled @ (x_next - xstar))
                sum23[k + 1] = sum23[k] + gain * gain * (c_vals[k] / a_vals[k] - 0.5) \
                    * metric.norm_sq(diff)
            else:
                # a_k = 0 forces A_{k+1} = A_k, so both step terms vanish
                sum22[k + 1] = sum22[k]
                sum23[k + 1] = sum23[k]
        z = z + gain * (x_next - xt)
        x = x_next
        xs[k + 1] = x
        zs[k + 1] = z

    best = math.inf
    e0 = None
    trace = []
    for k in range(K + 1):
        if gap_mode == "absolute":
            gap = f.gap(xs[k], xstar, fstar)
        else:
            val = _value_as_float(f, xs[k])
            best = min(best, val)
            gap = val - best
        energy = e_alpha = None
        if xstar is not None:
            energy = A_vals[k] * gap + 0.5 * metric.norm_sq(zs[k] - xstar)
            if k == 0:
                e0 = energy
            if alpha is not None:
                g_aux = (s.c(k) * gap + 0.5 * metric.norm_sq(xs[k] - xstar)
                         - metric.inner(xs[k] - xstar, zs[k] - xstar))
                e_alpha = energy + alpha * g_aux
        bound = None
        if dist_sq is not None and fstar is not None and A_vals[k] > 0:
            bound = (A_vals[0] * f.gap(xs[0], xstar, fstar) + 0.5 * dist_sq) / A_vals[k]
        w_k = s.prox_weight(k) if k < K else None
        trace.append(TraceRecord(
            k=k, objective_gap=gap, lyapunov_e=energy, e_alpha=e_alpha,
            tilde_grad_norm_sq=(w_k * w_k * metric.norm_sq(xts[k] - xs[k + 1])
                                if k < K else None),
            step_norm_x=math.sqrt(metric.norm_sq(xs[k] - xs[k - 1])) if k >= 1 else None,
            step_norm_z=math.sqrt(metric.norm_sq(zs[k] - zs[k - 1])) if k >= 1 else None,
            sum_pairing_prefix=float(sum22[k]) if xstar is not None else None,
            sum_gradsq_prefix=float(sum23[k]) if xstar is not None else None,
            bound_rhs=bound))
    return SolverRun(algorithm="sppa", xs=xs, trace=trace, gap_mode=gap_mode,
                     zs=zs, x_tildes=xts, tilde_grads=grads, schedule=s,
                     A_vals=A_vals, fstar=fstar, xstar=xstar, e0=e0,
                     extras={"a_vals": a_vals, "b_vals": b_vals, "c_vals": c_vals,
                             "dist_sq": dist_sq, "alpha": alpha})
