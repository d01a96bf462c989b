"""Convex objective oracles: values, gradients and metric-prox subproblems.

Every solver in this package reduces to repeated evaluation of

    prox(y, w) = argmin_x  f(x) + (w/2) |x - y|_L^2

for a metric L and weight w > 0.  The supported closed-form pairings are

* quadratic with any metric (one SPD linear solve, plus one refinement pass),
* l1 with identity or diagonal metrics (componentwise soft threshold),
* quadratic-plus-l1 with diagonal quadratic part and identity/diagonal metric
  (componentwise scalar minimization, exact),
* affine equality indicators with any metric (KKT projection), and
* user-supplied oracles via :class:`CustomObjective`.

Indicator objectives return the :data:`INFINITE` marker off their constraint
set; the marker is an explicit tagged object, never a float special.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._linalg import refined_solve
from .metric import Metric, as_point

__all__ = [
    "INFINITE",
    "is_infinite",
    "ProxResult",
    "Objective",
    "Quadratic",
    "L1Norm",
    "QuadraticPlusL1",
    "AffineIndicator",
    "CustomObjective",
    "metric_prox",
    "objective_from_config",
]


class _InfiniteValue:
    """Marker for +infinity objective values (off an indicator's domain)."""

    __slots__ = ()

    def __repr__(self):
        return "INFINITE"

    def __gt__(self, other):
        return not isinstance(other, _InfiniteValue)

    def __ge__(self, other):
        return True

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return isinstance(other, _InfiniteValue)

    def __eq__(self, other):
        return isinstance(other, _InfiniteValue)

    def __hash__(self):
        return hash("_InfiniteValue")


INFINITE = _InfiniteValue()


def is_infinite(v) -> bool:
    return isinstance(v, _InfiniteValue)


@dataclass(frozen=True)
class ProxResult:
    """Outcome of one metric-prox solve.

    ``tilde_subgradient`` is w * L (y - minimizer); by first-order optimality
    of the subproblem it lies in the subdifferential of f at the minimizer.
    ``inner_iterations`` is 0 for closed-form solves.
    """

    minimizer: np.ndarray
    tilde_subgradient: np.ndarray
    inner_iterations: int = 0


class Objective:
    """Base class for convex objectives; subclasses fill in the oracles."""

    kind: str = "abstract"
    smooth: bool = False
    dim: int | None = None

    def value(self, x):
        raise NotImplementedError

    def gradient(self, x) -> np.ndarray:
        raise ValueError(f"gradient unavailable for non-smooth objective kind {self.kind!r}")

    def _prox(self, metric: Metric, y: np.ndarray, weight: float) -> tuple[np.ndarray, int]:
        raise NotImplementedError

    def gap(self, x, xstar=None, fstar: float | None = None) -> float:
        """f(x) - f*; subclasses may use cancellation-free forms.

        An infeasible x (indicator kinds) yields an infinite gap.
        """
        if fstar is None:
            raise ValueError("gap needs the optimal value fstar")
        v = self.value(x)
        if is_infinite(v):
            return float("inf")
        return float(v) - float(fstar)

    def to_config(self) -> dict:
        raise NotImplementedError


class Quadratic(Objective):
    """f(x) = 0.5 x'Qx + b'x + c with symmetric positive semidefinite Q."""

    kind = "quadratic"
    smooth = True

    def __init__(self, Q, b=None, c: float = 0.0):
        Q = np.asarray(Q, dtype=float)
        if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
            raise ValueError("Q must be a square matrix")
        n = Q.shape[0]
        scale = max(1.0, np.abs(Q).max())
        if np.abs(Q - Q.T).max() > 1e-10 * scale:
            raise ValueError("Q must be symmetric")
        Q = 0.5 * (Q + Q.T)
        eigs = np.linalg.eigvalsh(Q)
        if eigs.min() < -1e-10 * scale:
            raise ValueError(f"Q must be positive semidefinite (min eigenvalue {eigs.min():.3e})")
        self.Q = Q
        self.b = np.zeros(n) if b is None else as_point(b, n)
        self.c = float(c)
        self.dim = n
        self.Q.setflags(write=False)
        self.b.setflags(write=False)

    def value(self, x) -> float:
        x = as_point(x, self.dim)
        return float(0.5 * x @ self.Q @ x + self.b @ x + self.c)

    def gradient(self, x) -> np.ndarray:
        x = as_point(x, self.dim)
        return self.Q @ x + self.b

    def gap(self, x, xstar=None, fstar: float | None = None) -> float:
        # Expansion around a minimizer avoids the catastrophic cancellation
        # of value(x) - fstar once the gap falls below eps * |fstar|.
        if xstar is None:
            return super().gap(x, fstar=fstar)
        x = as_point(x, self.dim)
        d = x - as_point(xstar, self.dim)
        residual = self.Q @ as_point(xstar, self.dim) + self.b
        return float(0.5 * d @ self.Q @ d + residual @ d)

    def _prox(self, metric: Metric, y: np.ndarray, weight: float):
        Lmat = metric.matrix(self.dim)
        M = self.Q + weight * Lmat
        rhs = weight * (Lmat @ y) - self.b
        return refined_solve(M, rhs), 0

    def minimizer(self) -> np.ndarray:
        """Unconstrained minimizer Q x = -b (requires Q positive definite)."""
        return refined_solve(self.Q, -self.b)

    def to_config(self) -> dict:
        return {"kind": "quadratic", "Q": self.Q.tolist(), "b": self.b.tolist(), "c": self.c}


class L1Norm(Objective):
    """f(x) = weight * sum_i |x_i|."""

    kind = "l1"
    smooth = False

    def __init__(self, weight: float, dim: int | None = None):
        if not weight > 0:
            raise ValueError("l1 weight must be positive")
        self.weight = float(weight)
        self.dim = dim

    def value(self, x) -> float:
        x = as_point(x, self.dim)
        return float(self.weight * np.abs(x).sum())

    def _prox(self, metric: Metric, y: np.ndarray, weight: float):
        if metric.kind == "dense":
            raise ValueError("metric prox unsupported for pairing (l1, dense metric)")
        ell = metric.diagonal_values(y.shape[0])
        thresh = self.weight / (weight * ell)
        return np.sign(y) * np.maximum(np.abs(y) - thresh, 0.0), 0

    def to_config(self) -> dict:
        cfg = {"kind": "l1", "weight": self.weight}
        if self.dim is not None:
            cfg["dim"] = self.dim
        return cfg


class QuadraticPlusL1(Objective):
    """f = quadratic + l1, proxed exactly when the quadratic part is diagonal.

    The solvers here prox the entire objective, so exactness of this
    composite subproblem is required rather than a splitting approximation.
    """

    kind = "sum"
    smooth = False

    def __init__(self, quadratic: Quadratic, l1: L1Norm):
        self.quadratic = quadratic
        self.l1 = l1
        self.dim = quadratic.dim

    def value(self, x) -> float:
        return self.quadratic.value(x) + self.l1.value(x)

    def _prox(self, metric: Metric, y: np.ndarray, weight: float):
        Q = self.quadratic.Q
        if np.abs(Q - np.diag(np.diag(Q))).max() > 0.0:
            raise ValueError("metric prox unsupported for pairing (sum with non-diagonal quadratic, any metric)")
        if metric.kind == "dense":
            raise ValueError("metric prox unsupported for pairing (sum, dense metric)")
        qd = np.diag(Q)
        ell = metric.diagonal_values(y.shape[0])
        wl = weight * ell
        # per coordinate: min 0.5 q x^2 + b x + omega |x| + (wl/2)(x - y)^2
        omega = self.l1.weight
        denom = qd + wl
        plus = (wl * y - self.quadratic.b - omega) / denom
        minus = (wl * y - self.quadratic.b + omega) / denom
        x = np.where(plus > 0, plus, np.where(minus < 0, minus, 0.0))
        return x, 0

    def to_config(self) -> dict:
        return {"kind": "sum", "quadratic": self.quadratic.to_config(), "l1": self.l1.to_config()}


class AffineIndicator(Objective):
    """Indicator of the affine set {x : A x = rhs}; prox is the L-projection."""

    kind = "affine_indicator"
    smooth = False

    def __init__(self, A, rhs, feas_tol: float = 1e-8):
        A = np.asarray(A, dtype=float)
        if A.ndim == 1:
            A = A.reshape(1, -1)
        rhs = as_point(rhs, A.shape[0])
        if np.linalg.matrix_rank(A) < A.shape[0]:
            raise ValueError("affine indicator rows must be linearly independent")
        self.A = A
        self.rhs = rhs
        self.dim = A.shape[1]
        self.feas_tol = feas_tol
        self.A.setflags(write=False)
        self.rhs.setflags(write=False)

    def value(self, x):
        x = as_point(x, self.dim)
        tol = self.feas_tol * (1.0 + np.abs(self.rhs).max())
        if np.abs(self.A @ x - self.rhs).max() <= tol:
            return 0.0
        return INFINITE

    def _prox(self, metric: Metric, y: np.ndarray, weight: float):
        n, m = self.dim, self.A.shape[0]
        Lmat = metric.matrix(n)
        K = np.zeros((n + m, n + m))
        K[:n, :n] = weight * Lmat
        K[:n, n:] = self.A.T
        K[n:, :n] = self.A
        rhs = np.concatenate([weight * (Lmat @ y), self.rhs])
        sol = refined_solve(K, rhs, assume_posdef=False)
        return sol[:n], 0

    def to_config(self) -> dict:
        return {"kind": "affine_indicator", "A": self.A.tolist(), "rhs": self.rhs.tolist()}


class CustomObjective(Objective):
    """User-supplied value and prox oracles.

    ``prox_fn(metric, y, weight)`` must return ``(minimizer, inner_iterations)``;
    the library records the iteration count but trusts the oracle's accuracy.
    """

    kind = "custom"

    def __init__(self, value_fn, prox_fn, gradient_fn=None, smooth: bool = False,
                 dim: int | None = None):
        self._value_fn = value_fn
        self._prox_fn = prox_fn
        self._gradient_fn = gradient_fn
        self.smooth = smooth
        self.dim = dim

    def value(self, x):
        return self._value_fn(as_point(x, self.dim))

    def gradient(self, x) -> np.ndarray:
        if self._gradient_fn is None:
            return super().gradient(x)
        return as_point(self._gradient_fn(as_point(x, self.dim)))

    def _prox(self, metric: Metric, y: np.ndarray, weight: float):
        x, iters = self._prox_fn(metric, y, weight)
        return as_point(x, y.shape[0]), int(iters)


def metric_prox(f: Objective, metric: Metric, y, weight: float) -> ProxResult:
    """Solve argmin_x f(x) + (weight/2) |x - y|_L^2.

    Returns the minimizer together with the implicit subgradient
    weight * L (y - minimizer) recovered from first-order optimality.
    """
    if not (np.isfinite(weight) and weight > 0):
        raise ValueError(f"prox weight must be a positive finite real, got {weight}")
    y = as_point(y, f.dim)
    x, iters = f._prox(metric, y, float(weight))
    x = as_point(x, y.shape[0])
    tilde = weight * metric.apply(y - x)
    return ProxResult(minimizer=x, tilde_subgradient=tilde, inner_iterations=iters)


def objective_from_config(cfg: dict) -> Objective:
    """Build an objective from its config-file form (mirrors the kind tags)."""
    kind = cfg.get("kind")
    if kind == "quadratic":
        if "Q" not in cfg:
            raise ValueError("problem.Q is required for the quadratic kind")
        return Quadratic(np.asarray(cfg["Q"], dtype=float), cfg.get("b"), cfg.get("c", 0.0))
    if kind == "l1":
        if "weight" not in cfg:
            raise ValueError("problem.weight is required for the l1 kind")
        return L1Norm(cfg["weight"], cfg.get("dim"))
    if kind == "sum":
        if "quadratic" not in cfg or "l1" not in cfg:
            raise ValueError("problem.quadratic and problem.l1 are required for the sum kind")
        quad = objective_from_config(cfg["quadratic"])
        l1 = objective_from_config(cfg["l1"])
        return QuadraticPlusL1(quad, l1)
    if kind == "affine_indicator":
        if "A" not in cfg or "rhs" not in cfg:
            raise ValueError("problem.A and problem.rhs are required for the affine_indicator kind")
        return AffineIndicator(np.asarray(cfg["A"], dtype=float), cfg["rhs"])
    raise ValueError(f"problem.kind {kind!r} is not a recognized objective kind")
