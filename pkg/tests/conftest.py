"""Shared problem builders for the test suite.

The reference quadratic has a rotation-times-spectrum structure with an
exactly controlled condition number and a zero linear term, so its
minimizer is the origin and objective gaps stay meaningful in floating
point down to the underflow threshold (no cancellation against a nonzero
optimum).  Proximal iterations are translation-equivariant, so this
normalization loses no generality.
"""

import numpy as np
import pytest

from sppa import (
    LinearEqualityProblem,
    Quadratic,
    constant_ratio_schedule,
    exponential_schedule,
    guler_schedule,
    polynomial_schedule,
)

QP_SEED = 20240611
X0_SEED = 7


def spectrum_qp(n=10, cond=1e3, seed=QP_SEED) -> Quadratic:
    rng = np.random.default_rng(seed)
    V, _ = np.linalg.qr(rng.standard_normal((n, n)))
    eigs = np.logspace(0.0, np.log10(cond), n)
    Q = (V * eigs) @ V.T
    return Quadratic(0.5 * (Q + Q.T))


def seeded_x0(n=10, seed=X0_SEED) -> np.ndarray:
    return np.random.default_rng(seed).standard_normal(n)


def acceptance_schedules() -> dict:
    """The built-in schedule instances exercised by the acceptance gate."""
    return {
        "polynomial_p1": polynomial_schedule(1, 1.0),
        "polynomial_p2": polynomial_schedule(2, 1.0),
        "polynomial_p3": polynomial_schedule(3, 1.0),
        "exponential_r1.2": exponential_schedule(1.2, 1.0),
        "exponential_r2": exponential_schedule(2.0, 1.0),
        "constant_ratio_r2": constant_ratio_schedule(1.0, 2),
        "constant_ratio_r4": constant_ratio_schedule(1.0, 4),
        "guler_rho1": guler_schedule(1.0),
    }


def seeded_eq_qp(n=10, m=3, seed=42) -> LinearEqualityProblem:
    rng = np.random.default_rng(seed)
    M = rng.standard_normal((n, n))
    Q = M.T @ M + 0.1 * np.eye(n)
    q = rng.standard_normal(n)
    A = rng.standard_normal((m, n))
    b = A @ rng.standard_normal(n)
    return LinearEqualityProblem(Quadratic(Q, q), A, b)


@pytest.fixture
def qp10():
    return spectrum_qp()


@pytest.fixture
def x0_10():
    return seeded_x0()


@pytest.fixture
def eq_qp():
    return seeded_eq_qp()
