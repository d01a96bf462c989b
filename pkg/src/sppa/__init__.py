"""Proximal point solvers from a symplectic discretization of an accelerated
flow, with Lyapunov-certificate diagnostics and an augmented Lagrangian
variant for equality-constrained programs."""

from .metric import Metric, as_point, metric_from_config
from .objectives import (
    INFINITE,
    AffineIndicator,
    CustomObjective,
    L1Norm,
    Objective,
    ProxResult,
    Quadratic,
    QuadraticPlusL1,
    is_infinite,
    metric_prox,
    objective_from_config,
)
from .schedules import (
    CertificationReport,
    ContinuousSchedule,
    Schedule,
    certify,
    constant_ratio_schedule,
    continuous_schedule,
    exponential_schedule,
    guler_schedule,
    polynomial_schedule,
    schedule_from_config,
)
from .ode import (
    OdeState,
    OdeTrajectory,
    augmented_energy,
    hamiltonian_demo,
    integrate_flow,
    lyapunov_energy,
)
from .solvers import SolverRun, TraceRecord, run_appa, run_ppa, run_sppa, tilde_gradient
from .salm import (
    DualRun,
    LinearEqualityProblem,
    PerturbedProblem,
    dual_objective,
    linear_equality_oracle,
    run_salm,
    saddle_certificates,
    solve_kkt,
)
from .diagnostics import CertificateReport, RateFit, certificate_suite, estimate_order

__version__ = "0.1.0"

__all__ = [
    "Metric", "as_point", "metric_from_config",
    "INFINITE", "is_infinite", "ProxResult", "Objective", "Quadratic", "L1Norm",
    "QuadraticPlusL1", "AffineIndicator", "CustomObjective", "metric_prox",
    "objective_from_config",
    "Schedule", "ContinuousSchedule", "polynomial_schedule", "exponential_schedule",
    "constant_ratio_schedule", "guler_schedule", "continuous_schedule", "certify",
    "CertificationReport", "schedule_from_config",
    "OdeState", "OdeTrajectory", "integrate_flow", "lyapunov_energy", "augmented_energy",
    "hamiltonian_demo",
    "SolverRun", "TraceRecord", "run_ppa", "run_appa", "run_sppa", "tilde_gradient",
    "DualRun", "PerturbedProblem", "LinearEqualityProblem", "linear_equality_oracle",
    "run_salm", "solve_kkt", "dual_objective", "saddle_certificates",
    "RateFit", "estimate_order", "CertificateReport", "certificate_suite",
]
