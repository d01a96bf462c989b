"""Rate schedules (a_k, b_k, c_k, A_k) and their hypothesis certifier.

A schedule is a quadruple of sequences driving the accelerated proximal
iteration: ``a`` scales the momentum update, ``b`` the averaging step,
``c`` the prox weight, and ``A = a*b`` is the certified rate clock.  The
built-in families are

* ``polynomial(p, d)``   -- A_k = k(k+1)...(k+p-1), rate O(1/k^p),
* ``exponential(rho, d)``-- A_k = rho^k, rate O(rho^-k),
* ``constant_ratio(c0, r)`` -- the family with constant prox ratio
  c_k/(b_k+1) = c0, rate O(1/k^2),
* ``guler(rhos)``        -- the family reproducing the classical accelerated
  proximal point method with prox parameters rho_k.

``certify`` scans the hypotheses of the three convergence theorems (T4:
last-iterate O(1/A_k) rate; T5/T6: the two little-o refinements) over a
finite horizon.  Asymptotic hypotheses are checked empirically on the
horizon tail with declared margins and are reported as evidence, never as
proof.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Callable, Sequence

__all__ = [
    "Schedule",
    "ContinuousSchedule",
    "polynomial_schedule",
    "exponential_schedule",
    "constant_ratio_schedule",
    "guler_schedule",
    "continuous_schedule",
    "certify",
    "ConditionResult",
    "CertificationReport",
    "schedule_from_config",
]

# Enforced half-step condition: c(k) >= a(k)/2.  A variant stating
# "c(k) >= c(k)/2" is vacuous and is not used; reports carry this note so
# the discrepancy between the two printed forms stays visible.
_HALFSTEP_NOTE = ("half-step condition enforced as c(k) >= a(k)/2; "
                  "the variant c(k) >= c(k)/2 is vacuous and ignored")


@dataclass(frozen=True)
class Schedule:
    """Parameter sequences as pure functions of the iteration index.

    Sequences are functions rather than precomputed arrays so horizons are
    unbounded.  ``d`` is the declared momentum-slack constant in (0, 1]
    (None when the family has no such constant), ``gamma_pair`` the declared
    (gamma1, gamma2) band for c/a, and ``beta`` the declared limit of k/b_k.
    All built-in families guarantee c(0) > 0 since the iteration divides by
    c_k.
    """

    a: Callable[[int], float]
    b: Callable[[int], float]
    c: Callable[[int], float]
    A: Callable[[int], float]
    family: str
    d: float | None = None
    gamma_pair: tuple[float, float] | None = None
    beta: float | None = None
    params: dict = field(default_factory=dict)

    def values(self, k: int) -> tuple[float, float, float, float]:
        return self.a(k), self.b(k), self.c(k), self.A(k)

    def prox_weight(self, k: int) -> float:
        """(b_k + 1)/c_k, the prox anchoring weight at step k."""
        c = self.c(k)
        if not c > 0:
            raise ValueError(f"schedule has c({k}) = {c}; must be positive")
        return (self.b(k) + 1.0) / c

    def z_gain(self, k: int) -> float:
        """a_k (b_k + 1)/c_k, evaluated ratio-first so huge a_k, c_k cancel."""
        c = self.c(k)
        if not c > 0:
            raise ValueError(f"schedule has c({k}) = {c}; must be positive")
        return (self.a(k) / c) * (self.b(k) + 1.0)

    def to_config(self) -> dict:
        return {"family": self.family, **self.params}


@dataclass(frozen=True)
class ContinuousSchedule:
    """Continuous-time counterpart (a_t, b_t, c_t, A_t) with dA/dt supplied."""

    a: Callable[[float], float]
    b: Callable[[float], float]
    c: Callable[[float], float]
    A: Callable[[float], float]
    A_dot: Callable[[float], float]
    family: str
    d: float | None = None
    params: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# built-in discrete families
# ---------------------------------------------------------------------------

def _rising(x: float, m: int) -> float:
    """Rising factorial x(x+1)...(x+m-1); empty product is 1."""
    out = 1.0
    for i in range(m):
        out *= x + i
    return out


def polynomial_schedule(p: int, d: float = 1.0) -> Schedule:
    """Rate clock A_k = k(k+1)...(k+p-1) of order p >= 1.

    With d < 1 the momentum slack needed for the little-o refinement holds;
    d = 1 gives the tight big-O family.
    """
    if p < 1 or int(p) != p:
        raise ValueError("polynomial order p must be an integer >= 1")
    if not 0 < d <= 1:
        raise ValueError("d must lie in (0, 1]")
    p = int(p)

    def a(k: int) -> float:
        return p / d * _rising(k + 1, p - 1)

    def b(k: int) -> float:
        return d / p * k

    def A(k: int) -> float:
        return _rising(k, p)

    return Schedule(a=a, b=b, c=a, A=A, family="polynomial", d=d,
                    gamma_pair=(1.0, 1.0), beta=p / d, params={"p": p, "d": d})


def exponential_schedule(rho: float, d: float = 1.0) -> Schedule:
    """Rate clock A_k = rho^k with rho > 1.

    Evaluated in log space internally so values stay finite for
    k < ~709/ln(rho); the solvers consume the ratios a/c and (b+1)/c, which
    remain representable much longer.
    """
    if not rho > 1:
        raise ValueError("rho must be > 1")
    if not 0 < d <= 1:
        raise ValueError("d must lie in (0, 1]")
    log_rho = math.log(rho)
    log_coef = math.log(rho - 1.0) - math.log(d)

    def _exp(x: float) -> float:
        try:
            return math.exp(x)
        except OverflowError:
            return math.inf

    def a(k: int) -> float:
        return _exp(log_coef + k * log_rho)

    def b(k: int) -> float:
        return d / (rho - 1.0)

    def A(k: int) -> float:
        return _exp(k * log_rho)

    return Schedule(a=a, b=b, c=a, A=A, family="exponential", d=d,
                    gamma_pair=(1.0, 1.0), beta=math.inf,
                    params={"rho": rho, "d": d})


def constant_ratio_schedule(c0: float, r: float) -> Schedule:
    """The family with constant prox ratio c_k/(b_k + 1) = c0.

    A_k = c0 k(k+r)/r^2, a_k = c_k = c0 (k+r)/r, b_k = k/r, so A = a*b holds
    exactly and the increment A_{k+1} - A_k = c0 (2k+r+1)/r^2 <= (2/r) a_k.
    Requires r >= 2; for r > 2 the little-o hypotheses hold with d = 2/r.
    """
    if not c0 > 0:
        raise ValueError("c0 must be positive")
    if not r >= 2:
        raise ValueError("r must be >= 2")

    def a(k: int) -> float:
        return c0 * (k + r) / r

    def b(k: int) -> float:
        return k / r

    def A(k: int) -> float:
        return c0 * k * (k + r) / (r * r)

    return Schedule(a=a, b=b, c=a, A=A, family="constant_ratio", d=2.0 / r,
                    gamma_pair=(1.0, 1.0), beta=float(r),
                    params={"c": c0, "r": r})


class _PrefixSums:
    """Incrementally cached S_k = sum_{i<k} sqrt(rho_i); thread-safe."""

    def __init__(self, rho_of):
        self._rho_of = rho_of
        self._sums = [0.0]
        self._lock = threading.Lock()

    def __call__(self, k: int) -> float:
        if k < len(self._sums):
            return self._sums[k]
        with self._lock:
            while len(self._sums) <= k:
                i = len(self._sums) - 1
                rho = self._rho_of(i)
                if not rho > 0:
                    raise ValueError(f"rhos[{i}] must be positive")
                self._sums.append(self._sums[-1] + math.sqrt(rho))
            return self._sums[k]


def _rho_callable(rhos) -> Callable[[int], float]:
    if callable(rhos):
        return rhos
    if isinstance(rhos, (int, float)):
        const = float(rhos)
        if not const > 0:
            raise ValueError("rhos constant must be positive")
        return lambda k: const
    seq = [float(r) for r in rhos]
    for i, r in enumerate(seq):
        if not r > 0:
            raise ValueError(f"rhos[{i}] must be positive")

    def rho_of(k: int) -> float:
        if k >= len(seq):
            raise ValueError(f"rho sequence of length {len(seq)} exhausted at index {k}")
        return seq[k]

    return rho_of


def guler_schedule(rhos) -> Schedule:
    """Schedule whose prox ratio c_k/(b_k+1) equals the supplied rho_k.

    With S_k = sum_{i<k} sqrt(rho_i):

        A_k = S_k^2 / 2,
        a_k = sqrt(rho_k) (sqrt(rho_k) + 2 S_k) / 2,
        b_k = S_k^2 / (sqrt(rho_k) (sqrt(rho_k) + 2 S_k)),
        c_k = sqrt(rho_k) S_{k+1}^2 / (sqrt(rho_k) + 2 S_k),

    which satisfies b_k + 1 = S_{k+1}^2 / (sqrt(rho_k)(sqrt(rho_k)+2S_k))
    and hence c_k/(b_k+1) = rho_k, with a_k <= c_k.  ``rhos`` may be a
    positive constant, a finite sequence (usable up to its length), or a
    callable k -> rho_k.
    """
    rho_of = _rho_callable(rhos)
    S = _PrefixSums(rho_of)

    def a(k: int) -> float:
        s = math.sqrt(rho_of(k))
        return 0.5 * s * (s + 2.0 * S(k))

    def b(k: int) -> float:
        s = math.sqrt(rho_of(k))
        return S(k) ** 2 / (s * (s + 2.0 * S(k)))

    def c(k: int) -> float:
        s = math.sqrt(rho_of(k))
        return s * S(k + 1) ** 2 / (s + 2.0 * S(k))

    def A(k: int) -> float:
        return 0.5 * S(k) ** 2

    params = {"rhos": {"const": float(rhos)}} if isinstance(rhos, (int, float)) else {}
    return Schedule(a=a, b=b, c=c, A=A, family="guler", d=None,
                    gamma_pair=None, beta=2.0, params=params)


# ---------------------------------------------------------------------------
# continuous families
# ---------------------------------------------------------------------------

def continuous_schedule(family: str, **params) -> ContinuousSchedule:
    """Continuous-time schedule families.

    ``polynomial``: A_t = t^p with a_t = p t^{p-1}/d, b_t = d t/p, c_t = a_t.
    ``exponential``: A_t = exp(lam t) with a_t = lam exp(lam t)/d,
    b_t = d/lam, c_t = a_t.  With d = 1 these are the tight choices
    (dA/dt = a_t); d < 1 rescales a and b, preserving A = a*b, to open the
    slack needed for the little-o results.
    """
    if family == "polynomial":
        p = params.get("p")
        d = params.get("d", 1.0)
        if p is None or p < 1:
            raise ValueError("polynomial continuous family needs p >= 1")
        if not 0 < d <= 1:
            raise ValueError("d must lie in (0, 1]")
        p = float(p)
        return ContinuousSchedule(
            a=lambda t: p / d * t ** (p - 1.0),
            b=lambda t: d / p * t,
            c=lambda t: p / d * t ** (p - 1.0),
            A=lambda t: t ** p,
            A_dot=lambda t: p * t ** (p - 1.0),
            family="polynomial", d=d, params={"p": p, "d": d})
    if family == "exponential":
        lam = params.get("lam")
        d = params.get("d", 1.0)
        if lam is None or not lam > 0:
            raise ValueError("exponential continuous family needs lam > 0")
        if not 0 < d <= 1:
            raise ValueError("d must lie in (0, 1]")
        lam = float(lam)
        return ContinuousSchedule(
            a=lambda t: lam / d * math.exp(lam * t),
            b=lambda t: d / lam,
            c=lambda t: lam / d * math.exp(lam * t),
            A=lambda t: math.exp(lam * t),
            A_dot=lambda t: lam * math.exp(lam * t),
            family="exponential", d=d, params={"lam": lam, "d": d})
    raise ValueError(f"unknown continuous family {family!r}")


# ---------------------------------------------------------------------------
# certification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConditionResult:
    name: str
    status: str                 # "PASS" or "FAIL"
    first_violation_k: int | None
    detail: str

    @property
    def passed(self) -> bool:
        return self.status == "PASS"


@dataclass(frozen=True)
class CertificationReport:
    family: str
    theorem: str
    horizon: int
    conditions: tuple[ConditionResult, ...]
    notes: tuple[str, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions)

    def as_text(self) -> str:
        head = (f"certification: family={self.family} theorem={self.theorem} "
                f"horizon={self.horizon} -> {'PASS' if self.passed else 'FAIL'}")
        lines = [head]
        for c in self.conditions:
            where = "" if c.first_violation_k is None else f" (first violation at k={c.first_violation_k})"
            lines.append(f"  [{c.status}] {c.name}: {c.detail}{where}")
        for n in self.notes:
            lines.append(f"  note: {n}")
        return "\n".join(lines)

    def as_dict(self) -> dict:
        return {
            "family": self.family,
            "theorem": self.theorem,
            "horizon": self.horizon,
            "passed": self.passed,
            "conditions": [
                {"name": c.name, "status": c.status,
                 "first_violation_k": c.first_violation_k, "detail": c.detail}
                for c in self.conditions
            ],
            "notes": list(self.notes),
        }


def _scan(predicate, ks) -> tuple[bool, int | None]:
    for k in ks:
        if not predicate(k):
            return False, k
    return True, None


def _fit_loglog_slope(ks, vals) -> float:
    """Least-squares slope of log(vals) against log(ks)."""
    xs = [math.log(k) for k in ks]
    ys = [math.log(v) for v in vals]
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    return sxy / sxx if sxx > 0 else 0.0


def certify(s: Schedule, horizon: int, theorem: str) -> CertificationReport:
    """Check the hypotheses of theorem T4, T5 or T6 over [0, horizon).

    Pointwise inequalities are scanned exactly (up to declared float slack);
    asymptotic hypotheses (limits, sups, existence of constants) are judged
    on the last 10% of the horizon and reported with their margins.
    Violations are data, not errors; a non-finite schedule value (e.g. an
    exponential clock past the float range) is an error, since the
    hypotheses cannot be evaluated there.
    """
    if horizon < 2:
        raise ValueError("horizon must be >= 2")
    theorem = theorem.upper()
    if theorem not in ("T4", "T5", "T6"):
        raise ValueError(f"theorem must be one of T4, T5, T6, got {theorem!r}")

    # T6's growth condition needs one extra c value; T4/T5 stay within the
    # run horizon so finite rho sequences certify without spare entries.
    a = [s.a(k) for k in range(horizon)]
    b = [s.b(k) for k in range(horizon)]
    c = [s.c(k) for k in range(horizon + (1 if theorem == "T6" else 0))]
    A = [s.A(k) for k in range(horizon + 1)]
    for name, seq in (("a", a), ("b", b), ("c", c), ("A", A)):
        for k, v in enumerate(seq):
            if not math.isfinite(v):
                raise ValueError(
                    f"schedule value {name}({k}) = {v} exceeds the float range; "
                    f"reduce the certification horizon")

    tail_start = max(1, horizon - max(2, horizon // 10))
    conds: list[ConditionResult] = []
    notes: list[str] = [_HALFSTEP_NOTE]

    rel = 1e-12
    slack = 1e-9  # pointwise inequality slack, relative

    def add(name, ok, first_k, detail):
        conds.append(ConditionResult(name, "PASS" if ok else "FAIL", first_k, detail))

    # A_k = a_k b_k, relative tolerance 1e-12, checked from k = 1
    ok, bad = _scan(
        lambda k: abs(A[k] - a[k] * b[k]) <= rel * max(abs(A[k]), abs(a[k] * b[k]), 1e-300),
        range(1, horizon))
    add("A = a*b", ok, bad, f"relative tolerance {rel:g}, k in [1, {horizon})")

    # 0 <= A_{k+1} - A_k
    ok, bad = _scan(lambda k: A[k + 1] - A[k] >= -slack * max(1.0, abs(A[k + 1])),
                    range(horizon))
    add("A nondecreasing", ok, bad, f"slack {slack:g} relative")

    if theorem == "T4":
        ok, bad = _scan(lambda k: A[k + 1] - A[k] <= a[k] * (1.0 + slack) + slack,
                        range(horizon))
        add("A(k+1) - A(k) <= a(k)", ok, bad, f"slack {slack:g}")
        ok, bad = _scan(lambda k: c[k] >= 0.5 * a[k] * (1.0 - slack), range(horizon))
        add("c(k) >= a(k)/2", ok, bad, f"slack {slack:g}")
        return CertificationReport(s.family, theorem, horizon, tuple(conds), tuple(notes))

    # T5/T6 share the strengthened increment condition with a constant d < 1.
    d_margin = 1e-3
    d_hat = max((A[k + 1] - A[k]) / a[k] for k in range(horizon) if a[k] > 0)
    ok = d_hat <= 1.0 - d_margin
    if s.d is not None:
        ok = ok and d_hat <= s.d * (1.0 + slack) + slack
    add("A(k+1) - A(k) <= d*a(k) with d < 1", ok, None,
        f"observed sup ratio {d_hat:.6g}, declared d {s.d!r}, requires <= 1 - {d_margin:g}")

    if theorem == "T5":
        # a_k >= gamma A_k for some gamma > 0: the ratio a/A must not decay.
        ratios = [(k, a[k] / A[k]) for k in range(tail_start, horizon) if A[k] > 0]
        if len(ratios) >= 2:
            slope = _fit_loglog_slope([k for k, _ in ratios], [r for _, r in ratios])
            gamma_hat = min(r for _, r in ratios)
            ok = slope >= -0.05 and gamma_hat > 0
            add("a(k) >= gamma*A(k), gamma > 0", ok, None,
                f"tail log-log slope of a/A = {slope:.4g} (margin -0.05), min ratio {gamma_hat:.6g}")
        else:
            add("a(k) >= gamma*A(k), gamma > 0", False, None, "insufficient tail samples")
        return CertificationReport(s.family, theorem, horizon, tuple(conds), tuple(notes))

    # T6 conditions
    growth = [(c[k + 1] - c[k]) / a[k] for k in range(horizon) if a[k] > 0]
    head_len = max(1, len(growth) - max(1, len(growth) * (horizon - tail_start) // horizon))
    head_max = max(growth[:head_len])
    tail_max = max(growth[head_len:]) if growth[head_len:] else head_max
    ok = tail_max <= max(head_max * (1.0 + 1e-9), head_max + 1e-12)
    add("sup (c(k+1) - c(k))/a(k) finite", ok, None,
        f"head sup {head_max:.6g}, tail sup {tail_max:.6g} (tail must not exceed head)")

    beta_start = tail_start / b[tail_start] if b[tail_start] > 0 else math.inf
    beta_end = (horizon - 1) / b[horizon - 1] if b[horizon - 1] > 0 else math.inf
    stable = (math.isfinite(beta_start) and math.isfinite(beta_end)
              and abs(beta_end - beta_start) <= 0.01 * max(abs(beta_end), abs(beta_start)))
    in_range = math.isfinite(beta_end) and beta_end > 1.0 + 1e-6
    add("beta = lim k/b(k) in (1, inf)", stable and in_range, None,
        f"k/b(k) at tail start {beta_start:.6g}, at end {beta_end:.6g} "
        f"(stability margin 1%, must exceed 1)")

    band = [c[k] / a[k] for k in range(tail_start, horizon) if a[k] > 0]
    g1_hat = min(band) if band else 0.0
    g2_hat = max(band) if band else math.inf
    ok = g1_hat >= 0.5 + 1e-9 and math.isfinite(g2_hat)
    add("gamma1*a <= c <= gamma2*a with gamma1 > 0.5", ok, None,
        f"tail band [{g1_hat:.6g}, {g2_hat:.6g}], requires lower end > 0.5")
    return CertificationReport(s.family, theorem, horizon, tuple(conds), tuple(notes))


# ---------------------------------------------------------------------------
# config parsing
# ---------------------------------------------------------------------------

def schedule_from_config(cfg: dict) -> Schedule:
    """Build a schedule from a config entry.

    Examples: ``{"family": "polynomial", "p": 2, "d": 0.9}``,
    ``{"family": "exponential", "rho": 1.5, "d": 0.9}``,
    ``{"family": "constant_ratio", "c": 1.0, "r": 4}``,
    ``{"family": "guler", "rhos": [...]}`` or
    ``{"family": "guler", "rhos": {"const": 1.0}}``.
    """
    family = cfg.get("family")
    if family == "polynomial":
        if "p" not in cfg:
            raise ValueError("schedule.p is required for the polynomial family")
        return polynomial_schedule(cfg["p"], cfg.get("d", 1.0))
    if family == "exponential":
        if "rho" not in cfg:
            raise ValueError("schedule.rho is required for the exponential family")
        return exponential_schedule(cfg["rho"], cfg.get("d", 1.0))
    if family == "constant_ratio":
        if "c" not in cfg:
            raise ValueError("schedule.c is required for the constant_ratio family")
        if "r" not in cfg:
            raise ValueError("schedule.r is required for the constant_ratio family")
        return constant_ratio_schedule(cfg["c"], cfg["r"])
    if family == "guler":
        rhos = cfg.get("rhos")
        if rhos is None:
            raise ValueError("schedule.rhos is required for the guler family")
        if isinstance(rhos, dict):
            if "const" not in rhos:
                raise ValueError("schedule.rhos.const is required when rhos is an object")
            return guler_schedule(float(rhos["const"]))
        return guler_schedule(rhos)
    raise ValueError(f"schedule.family {family!r} is not a recognized family")
