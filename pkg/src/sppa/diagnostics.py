"""Empirical rate fits and aggregated certificate reports for solver runs."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .salm import DualRun, saddle_certificates
from .schedules import Schedule
from .solvers import SolverRun

__all__ = ["RateFit", "estimate_order", "CheckRow", "CertificateReport", "certificate_suite"]

# The little-o theorems assert a limit, which no finite run can verify.  The
# operational proxy: over the trailing window, the rate-scaled gap must be
# decreasing (within noise) and must end below a small fraction of its
# running maximum.  Window and thresholds are printed with every report.
O_RATE_WINDOW = 0.2          # trailing fraction of the run
O_RATE_NOISE = 1e-12         # permitted per-step increase
O_RATE_FRACTION = 0.01       # final value vs overall max


@dataclass(frozen=True)
class RateFit:
    """Log-linear fit of a gap series; the residual is always reported."""

    model: str                  # "power" or "exponential"
    estimate: float             # exponent p (power) or ratio r (exponential)
    stderr: float
    residual: float             # rms residual of the log fit
    window: tuple[int, int]     # index range used
    clamped: int = 0            # number of gap values clamped at the floor


def estimate_order(gaps, ks=None, model: str = "power",
                   floor: float | None = None) -> RateFit:
    """Fit gap ~ C k^-p (power) or gap ~ C r^k (exponential) on the tail.

    Uses least squares on the log series over the last half of the samples.
    Gaps must be positive; supply ``floor`` (e.g. 100 eps |f*|) to clamp
    values at the resolution limit of the gap computation (the clamp count
    is reported, never hidden).
    """
    gaps = np.asarray(gaps, dtype=float)
    if ks is None:
        ks = np.arange(1, gaps.shape[0] + 1)
    ks = np.asarray(ks, dtype=float)
    if gaps.shape[0] < 20:
        raise ValueError("need at least 20 samples to fit a rate")
    if model not in ("power", "exponential"):
        raise ValueError(f"model must be power or exponential, got {model!r}")
    clamped = 0
    if floor is not None and floor > 0:
        clamped = int((gaps < floor).sum())
        gaps = np.maximum(gaps, floor)
    if np.any(gaps <= 0):
        raise ValueError("gaps must be positive for a log fit; "
                         "supply the optimal value more precisely or a clamp floor")

    lo = gaps.shape[0] // 2
    window = (lo, gaps.shape[0])
    y = np.log(gaps[lo:])
    x = np.log(ks[lo:]) if model == "power" else ks[lo:]
    n = x.shape[0]
    xm, ym = x.mean(), y.mean()
    sxx = float(((x - xm) ** 2).sum())
    if sxx == 0:
        raise ValueError("degenerate fit window")
    slope = float(((x - xm) * (y - ym)).sum()) / sxx
    resid = y - (ym + slope * (x - xm))
    rms = float(np.sqrt((resid ** 2).mean()))
    var = float((resid ** 2).sum()) / max(n - 2, 1) / sxx
    stderr = math.sqrt(var)
    if model == "power":
        return RateFit("power", -slope, stderr, rms, window, clamped)
    return RateFit("exponential", math.exp(slope), stderr * math.exp(slope), rms,
                   window, clamped)


@dataclass(frozen=True)
class CheckRow:
    name: str
    status: str                 # "PASS", "FAIL" or "N/A"
    worst_slack: float | None
    detail: str


@dataclass(frozen=True)
class CertificateReport:
    algorithm: str
    rows: tuple[CheckRow, ...]
    notes: tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return all(r.status != "FAIL" for r in self.rows)

    def as_text(self) -> str:
        lines = [f"certificates [{self.algorithm}] -> {'PASS' if self.passed else 'FAIL'}"]
        for r in self.rows:
            slack = "" if r.worst_slack is None else f" worst_slack={r.worst_slack:.17g}"
            lines.append(f"  [{r.status}] {r.name}:{slack} {r.detail}")
        for n in self.notes:
            lines.append(f"  note: {n}")
        return "\n".join(lines)

    def as_dict(self) -> dict:
        return {"algorithm": self.algorithm, "passed": self.passed,
                "rows": [{"name": r.name, "status": r.status,
                          "worst_slack": r.worst_slack, "detail": r.detail}
                         for r in self.rows],
                "notes": list(self.notes)}


def _suite_for_dual(run: DualRun, truth: dict) -> CertificateReport:
    report = saddle_certificates(run, truth["xstar"], truth["lambdastar"])
    rows = tuple(CheckRow(name, status, None, detail)
                 for name, status, detail in report.rows)
    return CertificateReport(algorithm="salm", rows=rows, notes=report.notes)


def certificate_suite(run, s: Schedule | None = None, truth: dict | None = None) -> CertificateReport:
    """One PASS/FAIL table covering every certificate a run supports.

    For the symplectic solver: Lyapunov monotonicity, the rate bound, both
    certificate prefix sums and (for schedules with d < 1) the little-o
    trend proxy.  For dual runs the saddle certificates are aggregated.
    ``truth`` supplies {"xstar": ..., "fstar": ...} (or "lambdastar" for dual
    runs); identical runs yield byte-identical reports.
    """
    if isinstance(run, DualRun):
        if truth is None or "xstar" not in truth or "lambdastar" not in truth:
            raise ValueError("dual-run certificates need truth with xstar and lambdastar")
        return _suite_for_dual(run, truth)
    if not isinstance(run, SolverRun):
        raise TypeError(f"unsupported run type {type(run).__name__}")
    if s is None:
        s = run.schedule
    rows: list[CheckRow] = []

    energies = run.energies()
    have_e = np.isfinite(energies).all() and run.e0 is not None
    if have_e:
        tol = 1e-10 * (1.0 + run.e0)
        incr = np.diff(energies)
        worst = float(incr.max()) if incr.size else 0.0
        rows.append(CheckRow(
            "lyapunov monotone", "PASS" if worst <= tol else "FAIL", tol - worst,
            f"max increment {worst:.6g}, tolerance {tol:.6g}"))
    else:
        rows.append(CheckRow("lyapunov monotone", "N/A", None,
                             "needs a known minimizer"))

    if run.A_vals is not None and run.fstar is not None and run.e0 is not None:
        gaps = run.gaps()
        scaled = run.A_vals * gaps
        rhs = run.e0
        slack = rhs - scaled
        ok = bool((slack >= -1e-9 * max(abs(rhs), 1.0)).all())
        rows.append(CheckRow(
            "rate bound", "PASS" if ok else "FAIL", float(slack.min()),
            f"A_k * gap <= A_0 gap_0 + dist^2/2 = {rhs:.6g}, relative slack 1e-09"))
    else:
        rows.append(CheckRow("rate bound", "N/A", None, "needs truth and a rate clock"))

    s22 = [r.sum_pairing_prefix for r in run.trace]
    s23 = [r.sum_gradsq_prefix for r in run.trace]
    if run.e0 is not None and s22[0] is not None:
        for name, series in (("pairing sum bound", s22), ("gradient sum bound", s23)):
            arr = np.array(series, dtype=float)
            worst = float((run.e0 - arr).min())
            ok = bool((arr <= run.e0 + 1e-9).all())
            rows.append(CheckRow(name, "PASS" if ok else "FAIL", worst,
                                 f"every prefix <= E(0) = {run.e0:.6g} + 1e-09"))
    else:
        rows.append(CheckRow("pairing sum bound", "N/A", None, "needs truth"))
        rows.append(CheckRow("gradient sum bound", "N/A", None, "needs truth"))

    if s is not None and s.d is not None and s.d < 1.0 and run.A_vals is not None \
            and run.fstar is not None:
        gaps = run.gaps()
        scaled = run.A_vals * gaps
        K = scaled.shape[0] - 1
        start = int((1.0 - O_RATE_WINDOW) * K)
        tail = scaled[start:]
        incr = np.diff(tail)
        worst_inc = float(incr.max()) if incr.size else 0.0
        mx = float(scaled.max())
        final_ok = scaled[-1] <= O_RATE_FRACTION * mx
        trend_ok = worst_inc <= O_RATE_NOISE
        rows.append(CheckRow(
            "o-rate trend", "PASS" if (final_ok and trend_ok) else "FAIL",
            None,
            f"tail window last {int(O_RATE_WINDOW * 100)}%, max tail increment "
            f"{worst_inc:.6g} (noise {O_RATE_NOISE:g}), final/max = "
            f"{(scaled[-1] / mx if mx > 0 else 0.0):.6g} (threshold {O_RATE_FRACTION:g})"))
    else:
        rows.append(CheckRow("o-rate trend", "N/A", None,
                             "schedule lacks the d < 1 hypothesis"))
    return CertificateReport(algorithm=run.algorithm, rows=tuple(rows))
