"""Config-driven experiment runner.

Subcommands:

* ``run``     -- execute one experiment (ppa | appa | sppa | salm | ode |
  figure1) described by a JSON config; writes trace CSV, a JSON summary and
  SVG figures into the output directory.
* ``certify`` -- scan a schedule against the hypotheses of one of the rate
  theorems; exit 0 on PASS, 2 on FAIL.
* ``compare`` -- run several algorithms on one problem and emit a combined
  gap CSV plus an overlay figure.

Experiment parameters live in the config document only; the command line
carries ``--config``, ``--out`` and ``--strict-certificates``.  The default
output root is ``$SPPA_OUT_DIR`` (falling back to ``./sppa_out``).  Exit
codes: 0 success, 1 config/validation error, 2 certificate failure (for
``run``/``compare`` only with --strict-certificates).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import plots
from .diagnostics import CertificateReport, CheckRow, certificate_suite, estimate_order
from .metric import Metric, metric_from_config
from .objectives import Quadratic, objective_from_config
from .ode import hamiltonian_demo, integrate_flow, lyapunov_energy
from .salm import LinearEqualityProblem, linear_equality_oracle, run_salm, \
    saddle_certificates, solve_kkt
from .schedules import certify, continuous_schedule, schedule_from_config
from .solvers import run_appa, run_ppa, run_sppa

__all__ = ["main"]

RANDOM_QP_RIDGE = 1e-3   # Q = M'M + ridge*I, M standard normal (PCG64 generator)


class ConfigError(Exception):
    """Config validation failure; the message names the offending field."""


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float) and not math.isfinite(x):
        return ""
    return f"{x:.17g}"


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) if not isinstance(v, str) else v for v in row) + "\n")


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _require(cfg: dict, key: str, context: str = ""):
    if key not in cfg:
        where = f"{context}.{key}" if context else key
        raise ConfigError(f"{where} is required")
    return cfg[key]


def _positive_rhos(raw, context: str = "rhos"):
    if isinstance(raw, dict):
        if "const" not in raw:
            raise ConfigError(f"{context}.const is required when {context} is an object")
        val = float(raw["const"])
        if not val > 0:
            raise ConfigError(f"{context}.const must be positive")
        return val
    if isinstance(raw, (int, float)):
        if not raw > 0:
            raise ConfigError(f"{context} must be positive")
        return float(raw)
    vals = [float(v) for v in raw]
    for i, v in enumerate(vals):
        if not v > 0:
            raise ConfigError(f"{context}[{i}] must be positive")
    return vals


def make_random_qp(n: int, rng: np.random.Generator) -> tuple[Quadratic, np.ndarray]:
    """Seeded random quadratic: Q = M'M + ridge I, M and q standard normal."""
    M = rng.standard_normal((n, n))
    Q = M.T @ M + RANDOM_QP_RIDGE * np.eye(n)
    q = rng.standard_normal(n)
    x0 = rng.standard_normal(n)
    return Quadratic(Q, q), x0


def _build_problem(cfg: dict, rng: np.random.Generator):
    """Returns (objective, default_x0 or None, truth dict or None)."""
    pcfg = _require(cfg, "problem")
    kind = _require(pcfg, "kind", "problem")
    default_x0 = None
    if kind == "random_qp":
        n = int(_require(pcfg, "n", "problem"))
        sub = np.random.default_rng(pcfg.get("seed", cfg.get("seed", 0)))
        f, default_x0 = make_random_qp(n, sub)
    else:
        try:
            f = objective_from_config(pcfg)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    truth = None
    if "truth" in cfg:
        t = cfg["truth"]
        truth = {"xstar": np.asarray(_require(t, "xstar", "truth"), dtype=float),
                 "fstar": float(_require(t, "fstar", "truth"))}
    else:
        truth = _default_truth(f)
    return f, default_x0, truth


def _default_truth(f) -> dict | None:
    if isinstance(f, Quadratic):
        try:
            xstar = f.minimizer()
        except np.linalg.LinAlgError:
            return None
        if not np.all(np.isfinite(xstar)):
            return None
        return {"xstar": xstar, "fstar": float(f.value(xstar))}
    if f.kind == "l1":
        n = f.dim
        if n is None:
            return None
        return {"xstar": np.zeros(n), "fstar": 0.0}
    if f.kind == "sum":
        qd = np.diag(f.quadratic.Q)
        if np.abs(f.quadratic.Q - np.diag(qd)).max() > 0 or np.any(qd <= 0):
            return None
        b, om = f.quadratic.b, f.l1.weight
        plus = (-b - om) / qd
        minus = (-b + om) / qd
        xstar = np.where(plus > 0, plus, np.where(minus < 0, minus, 0.0))
        return {"xstar": xstar, "fstar": float(f.value(xstar))}
    return None


def _x0_from(cfg: dict, f, default_x0):
    if "x0" in cfg:
        return np.asarray(cfg["x0"], dtype=float)
    if default_x0 is not None:
        return default_x0
    raise ConfigError("x0 is required")


def _metric_from(cfg: dict) -> Metric:
    mcfg = cfg.get("metric", {"kind": "identity"})
    try:
        return metric_from_config(mcfg)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _out_dir(args, cfg: dict) -> Path:
    if args.out:
        root = Path(args.out)
    elif cfg.get("out"):
        root = Path(cfg["out"])
    else:
        root = Path(os.environ.get("SPPA_OUT_DIR", "sppa_out"))
    root.mkdir(parents=True, exist_ok=True)
    return root


def _trace_rows(run):
    for r in run.trace:
        yield (r.k, r.objective_gap, r.lyapunov_e, r.e_alpha, r.sum_pairing_prefix,
               r.sum_gradsq_prefix, r.tilde_grad_norm_sq, r.bound_rhs)


TRACE_HEADER = ["k", "f_gap", "E", "E_alpha", "sum22_prefix", "sum23_prefix",
                "tilde_grad_norm_sq", "bound21_rhs"]


def _bound_report(run) -> CertificateReport:
    """Gap-vs-theoretical-bound row for the plain and accelerated solvers."""
    gaps = run.gaps()
    bounds = np.array([math.inf if r.bound_rhs is None else r.bound_rhs for r in run.trace])
    finite = np.isfinite(bounds)
    if not finite.any():
        rows = (CheckRow("gap bound", "N/A", None, "no solution representatives supplied"),)
        return CertificateReport(algorithm=run.algorithm, rows=rows)
    slack = bounds[finite] - gaps[finite]
    ok = bool((slack >= -1e-9 * np.maximum(np.abs(bounds[finite]), 1.0)).all())
    rows = (CheckRow("gap bound", "PASS" if ok else "FAIL", float(slack.min()),
                     "f(x_k) - f* <= theoretical bound at every k"),)
    return CertificateReport(algorithm=run.algorithm, rows=rows)


def _rate_fit_summary(run, family: str | None) -> dict | None:
    gaps = run.gaps()
    if gaps.shape[0] < 21 or run.fstar is None:
        return None
    model = "exponential" if family == "exponential" else "power"
    floor = 100.0 * np.finfo(float).eps * max(abs(run.fstar), 1.0)
    try:
        fit = estimate_order(gaps[1:], np.arange(1, gaps.shape[0]), model, floor=floor)
    except ValueError:
        return None
    return {"model": fit.model, "estimate": fit.estimate, "stderr": fit.stderr,
            "residual": fit.residual, "window": list(fit.window), "clamped": fit.clamped}


# ---------------------------------------------------------------------------
# run subcommand
# ---------------------------------------------------------------------------

def _run_discrete(cfg: dict, out: Path) -> tuple[CertificateReport, dict]:
    algorithm = cfg["algorithm"]
    rng = np.random.default_rng(cfg.get("seed", 0))
    f, default_x0, truth = _build_problem(cfg, rng)
    x0 = _x0_from(cfg, f, default_x0)
    K = int(_require(cfg, "K"))
    omega = [truth["xstar"]] if truth else None
    fstar = truth["fstar"] if truth else None

    family = None
    if algorithm == "ppa":
        metric = _metric_from(cfg)
        rhos = _positive_rhos(_require(cfg, "rhos"))
        run = run_ppa(f, metric, rhos, x0, K, omega=omega, fstar=fstar)
        report = _bound_report(run)
    elif algorithm == "appa":
        rhos = _positive_rhos(_require(cfg, "rhos"))
        big_a = float(cfg.get("A", 1.0))
        metric = _metric_from(cfg) if "metric" in cfg else None
        run = run_appa(f, rhos, x0, big_a, K, omega=omega, fstar=fstar, metric=metric)
        report = _bound_report(run)
    elif algorithm == "sppa":
        metric = _metric_from(cfg)
        try:
            sched = schedule_from_config(_require(cfg, "schedule"))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        family = sched.family
        run = run_sppa(f, metric, sched, x0, K, omega=omega, fstar=fstar)
        report = certificate_suite(run)
    else:
        raise ConfigError(f"algorithm {algorithm!r} is not a discrete solver")

    _write_csv(out / "trace.csv", TRACE_HEADER, _trace_rows(run))
    ks = np.arange(run.iterations + 1)
    outputs = ["trace.csv", "gap_loglog.svg"]
    plots.save_gap_loglog(out / "gap_loglog.svg", {algorithm: (ks, run.gaps())})
    energies = run.energies()
    if np.isfinite(energies).all():
        plots.save_series(out / "lyapunov.svg", ks, energies, "iteration k",
                          "Lyapunov energy E(k)", logy=True)
        outputs.append("lyapunov.svg")
    if run.A_vals is not None and run.fstar is not None:
        plots.save_scaled_gap(out / "scaled_gap.svg", ks, run.A_vals * run.gaps())
        outputs.append("scaled_gap.svg")

    summary = {
        "algorithm": algorithm,
        "iterations": run.iterations,
        "gap_mode": run.gap_mode,
        "final_gap": run.trace[-1].objective_gap,
        "certificates": report.as_dict(),
        "rate_fit": _rate_fit_summary(run, family),
        "outputs": sorted(outputs),
    }
    return report, summary


def _run_salm(cfg: dict, out: Path) -> tuple[CertificateReport, dict]:
    pcfg = _require(cfg, "problem")
    if _require(pcfg, "kind", "problem") != "eq_qp":
        raise ConfigError("problem.kind must be eq_qp for the salm algorithm")
    for key in ("Q", "q", "A", "b"):
        _require(pcfg, key, "problem")
    try:
        problem = LinearEqualityProblem(
            Quadratic(np.asarray(pcfg["Q"], dtype=float), pcfg["q"]),
            np.asarray(pcfg["A"], dtype=float), pcfg["b"])
    except ValueError as exc:
        raise ConfigError(f"problem: {exc}") from None
    metric = _metric_from(cfg)
    try:
        sched = schedule_from_config(_require(cfg, "schedule"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    K = int(_require(cfg, "K"))
    lambda0 = np.asarray(cfg.get("lambda0", np.zeros(problem.m)), dtype=float)

    oracle = linear_equality_oracle(problem, metric)
    run = run_salm(oracle, metric, sched, lambda0, K)
    xstar, lambdastar = solve_kkt(problem)
    report = saddle_certificates(run, xstar, lambdastar, sched)

    rows = []
    for k, rec in enumerate(run.trace):
        rows.append((rec.k, report.dual_gaps[k],
                     rec.u_norm_sq, rec.sum_u_prefix,
                     None if not math.isfinite(report.corollary_rhs[k]) else report.corollary_rhs[k],
                     rec.lemma2_residual))
    _write_csv(out / "trace.csv",
               ["k", "dual_gap", "u_norm_sq_L", "sum_u_prefix", "corollary_rhs",
                "lemma2_residual"], rows)
    ks = np.arange(run.iterations + 1)
    plots.save_gap_loglog(out / "gap_loglog.svg", {"salm dual gap": (ks, report.dual_gaps)})
    plots.save_series(out / "residual.svg", ks[:-1],
                      np.array([r.u_norm_sq for r in run.trace[:-1]]),
                      "iteration k", "|u|_L^2", logy=True)

    cert = CertificateReport(algorithm="salm",
                             rows=tuple(CheckRow(n, s, None, d) for n, s, d in report.rows),
                             notes=report.notes)
    summary = {
        "algorithm": "salm",
        "iterations": run.iterations,
        "final_dual_gap": float(report.dual_gaps[-1]),
        "multiplier_error": float(np.linalg.norm(run.lambdas[-1] - lambdastar)),
        "certificates": cert.as_dict(),
        "outputs": ["gap_loglog.svg", "residual.svg", "trace.csv"],
    }
    return cert, summary


def _continuous_from(cfg: dict):
    scfg = _require(cfg, "schedule")
    family = _require(scfg, "family", "schedule")
    try:
        if family == "polynomial":
            return continuous_schedule("polynomial", p=_require(scfg, "p", "schedule"),
                                       d=scfg.get("d", 1.0))
        if family == "exponential":
            return continuous_schedule("exponential", lam=_require(scfg, "lam", "schedule"),
                                       d=scfg.get("d", 1.0))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    raise ConfigError(f"schedule.family {family!r} has no continuous form")


def _run_ode(cfg: dict, out: Path) -> tuple[CertificateReport, dict]:
    rng = np.random.default_rng(cfg.get("seed", 0))
    f, default_x0, truth = _build_problem(cfg, rng)
    x0 = _x0_from(cfg, f, default_x0)
    cs = _continuous_from(cfg)
    step = float(_require(cfg, "step"))
    horizon = float(_require(cfg, "T"))
    if truth is None:
        raise ConfigError("truth (xstar, fstar) is required for the ode algorithm")

    metric = _metric_from(cfg)
    traj = integrate_flow(f, metric, cs, x0, step, horizon)
    energy = lyapunov_energy(traj, f, metric, cs, truth["xstar"], truth["fstar"])
    gaps = np.array([f.gap(x, truth["xstar"], truth["fstar"]) for x in traj.xs])
    g_vals = (np.array([cs.c(t) for t in traj.ts]) * gaps
              + np.array([0.5 * metric.norm_sq(x - truth["xstar"]) for x in traj.xs])
              - np.array([metric.inner(x - truth["xstar"], z - truth["xstar"])
                          for x, z in zip(traj.xs, traj.zs)]))

    n = traj.xs.shape[1]
    header = (["t"] + [f"X{i}" for i in range(n)] + [f"Z{i}" for i in range(n)]
              + ["E", "G"])
    rows = []
    for i, t in enumerate(traj.ts):
        rows.append((t, *traj.xs[i], *traj.zs[i], energy.values[i], g_vals[i]))
    _write_csv(out / "trajectory.csv", header, rows)
    plots.save_series(out / "lyapunov.svg", traj.ts, energy.values, "t",
                      "Lyapunov energy E(t)", logy=True)
    A_T = cs.A(traj.ts[-1])
    scaled = np.array([cs.A(t) for t in traj.ts]) * gaps
    plots.save_scaled_gap(out / "scaled_gap.svg", traj.ts, scaled)

    rate_limit = energy.values[0] * (1.0 + 50.0 * step)
    rows_rep = (
        CheckRow("energy monotone", "PASS" if energy.monotone_within_budget else "FAIL",
                 energy.budget_per_step - energy.max_increment,
                 f"max increment {energy.max_increment:.6g}, per-step budget "
                 f"{energy.budget_per_step:.6g}"),
        CheckRow("terminal rate", "PASS" if A_T * gaps[-1] <= rate_limit else "FAIL",
                 float(rate_limit - A_T * gaps[-1]),
                 f"A_T * gap(T) = {A_T * gaps[-1]:.6g} <= E(0)(1 + 50 s) = {rate_limit:.6g}"),
    )
    report = CertificateReport(algorithm="ode", rows=rows_rep)
    summary = {
        "algorithm": "ode",
        "step": step,
        "T": horizon,
        "final_gap": float(gaps[-1]),
        "certificates": report.as_dict(),
        "outputs": ["lyapunov.svg", "scaled_gap.svg", "trajectory.csv"],
    }
    return report, summary


def _run_figure1(cfg: dict, out: Path) -> tuple[CertificateReport, dict]:
    step = float(cfg.get("step", 0.1))
    n_steps = int(cfg.get("n_steps", 1000))
    if not step > 0:
        raise ConfigError("step must be positive")
    trajs = {scheme: hamiltonian_demo(step, n_steps, scheme)
             for scheme in ("explicit", "symplectic", "implicit")}
    ts = np.arange(n_steps + 1) * step
    for scheme, pq in trajs.items():
        _write_csv(out / f"{scheme}.csv", ["t", "p", "q"],
                   ((t, p, q) for t, (p, q) in zip(ts, pq)))
    plots.save_phase_portrait(out / "phase_portrait.svg", trajs)

    growth = 1.0 + step * step
    ks = np.arange(n_steps + 1)
    rows = []
    for scheme, ref in (("explicit", growth ** ks), ("implicit", growth ** (-ks))):
        en = (trajs[scheme] ** 2).sum(axis=1)
        err = float(np.abs(en / ref - 1.0).max())
        rows.append(CheckRow(f"{scheme} energy law", "PASS" if err <= 1e-9 else "FAIL",
                             1e-9 - err,
                             f"max relative deviation {err:.6g} from (1+s^2)^(+-k)"))
    en = (trajs["symplectic"] ** 2).sum(axis=1)
    exc = float(np.abs(en - 1.0).max())
    rows.append(CheckRow("symplectic energy band", "PASS" if exc <= 0.12 else "FAIL",
                         0.12 - exc, f"max |p^2+q^2-1| = {exc:.6g}, band 0.12"))
    report = CertificateReport(algorithm="figure1", rows=tuple(rows))
    summary = {
        "algorithm": "figure1",
        "step": step,
        "n_steps": n_steps,
        "certificates": report.as_dict(),
        "outputs": ["explicit.csv", "implicit.csv", "phase_portrait.svg", "symplectic.csv"],
    }
    return report, summary


def cmd_run(args) -> int:
    cfg = _load_config(args.config)
    out = _out_dir(args, cfg)
    algorithm = _require(cfg, "algorithm")
    if algorithm in ("ppa", "appa", "sppa"):
        report, summary = _run_discrete(cfg, out)
    elif algorithm == "salm":
        report, summary = _run_salm(cfg, out)
    elif algorithm == "ode":
        report, summary = _run_ode(cfg, out)
    elif algorithm == "figure1":
        report, summary = _run_figure1(cfg, out)
    else:
        raise ConfigError(f"algorithm must be one of ppa, appa, sppa, salm, ode, figure1; "
                          f"got {algorithm!r}")
    summary["config"] = cfg
    _write_json(out / "summary.json", summary)
    print(report.as_text())
    if args.strict_certificates and not report.passed:
        return 2
    return 0


# ---------------------------------------------------------------------------
# certify subcommand
# ---------------------------------------------------------------------------

def cmd_certify(args) -> int:
    cfg = _load_config(args.config)
    try:
        sched = schedule_from_config(_require(cfg, "schedule"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    horizon = int(args.horizon or cfg.get("horizon", 1000))
    theorem = args.theorem or cfg.get("theorem", "T4")
    try:
        report = certify(sched, horizon, theorem)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    print(report.as_text())
    if args.out:
        out = _out_dir(args, cfg)
        _write_json(out / "certification.json", report.as_dict())
    return 0 if report.passed else 2


# ---------------------------------------------------------------------------
# compare subcommand
# ---------------------------------------------------------------------------

def cmd_compare(args) -> int:
    cfg = _load_config(args.config)
    out = _out_dir(args, cfg)
    entries = _require(cfg, "algorithms")
    if not isinstance(entries, list) or not entries:
        raise ConfigError("algorithms must be a non-empty list")
    rng = np.random.default_rng(cfg.get("seed", 0))
    f, default_x0, truth = _build_problem(cfg, rng)
    x0 = _x0_from(cfg, f, default_x0)
    K = int(_require(cfg, "K"))
    omega = [truth["xstar"]] if truth else None
    fstar = truth["fstar"] if truth else None
    metric = _metric_from(cfg)

    runs = {}
    failed = False
    for i, entry in enumerate(entries):
        algorithm = _require(entry, "algorithm", f"algorithms[{i}]")
        label = entry.get("label", algorithm)
        if label in runs:
            label = f"{label}_{i}"
        merged = {**cfg, **entry}
        if algorithm == "ppa":
            rhos = _positive_rhos(_require(merged, "rhos"))
            runs[label] = run_ppa(f, metric, rhos, x0, K, omega=omega, fstar=fstar)
        elif algorithm == "appa":
            rhos = _positive_rhos(_require(merged, "rhos"))
            runs[label] = run_appa(f, rhos, x0, float(merged.get("A", 1.0)), K,
                                   omega=omega, fstar=fstar)
        elif algorithm == "sppa":
            try:
                sched = schedule_from_config(_require(merged, "schedule"))
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
            runs[label] = run_sppa(f, metric, sched, x0, K, omega=omega, fstar=fstar)
        else:
            raise ConfigError(f"algorithms[{i}].algorithm {algorithm!r} not comparable")

    ks = np.arange(K + 1)
    header = ["k"]
    columns = []
    for label, run in runs.items():
        header += [f"gap_{label}", f"bound_{label}"]
        bounds = [r.bound_rhs for r in run.trace]
        columns.append((run.gaps(), bounds))
    rows = []
    for k in range(K + 1):
        row = [k]
        for gaps, bounds in columns:
            row += [gaps[k], bounds[k]]
        rows.append(tuple(row))
    _write_csv(out / "compare.csv", header, rows)
    plots.save_gap_loglog(out / "overlay.svg",
                          {label: (ks, run.gaps()) for label, run in runs.items()})

    summary = {"algorithms": sorted(runs), "iterations": K,
               "final_gaps": {label: run.trace[-1].objective_gap
                              for label, run in runs.items()},
               "final_bounds": {label: run.trace[-1].bound_rhs
                                for label, run in runs.items()},
               "outputs": ["compare.csv", "overlay.svg"],
               "config": cfg}
    _write_json(out / "summary.json", summary)
    for label, run in runs.items():
        rep = _bound_report(run)
        print(f"{label}: final gap {run.trace[-1].objective_gap:.6g}")
        if args.strict_certificates and not rep.passed:
            failed = True
    return 2 if failed else 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sppa",
                                     description="symplectic proximal point experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment from a JSON config")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", default=None)
    p_run.add_argument("--strict-certificates", action="store_true")
    p_run.set_defaults(func=cmd_run)

    p_cert = sub.add_parser("certify", help="scan a schedule against theorem hypotheses")
    p_cert.add_argument("--config", required=True)
    p_cert.add_argument("--out", default=None)
    p_cert.add_argument("--horizon", type=int, default=None)
    p_cert.add_argument("--theorem", default=None, choices=["T4", "T5", "T6"])
    p_cert.set_defaults(func=cmd_certify)

    p_cmp = sub.add_parser("compare", help="run several algorithms on one problem")
    p_cmp.add_argument("--config", required=True)
    p_cmp.add_argument("--out", default=None)
    p_cmp.add_argument("--strict-certificates", action="store_true")
    p_cmp.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        code = args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return code


if __name__ == "__main__":
    sys.exit(main())
