"""Fixpoint engine: iteration, closed-form solvers, convergence certificates
and divergence witnesses.

The defining iteration is f^0 = w, f^{i+1} = influence(aggregate(G, f^i), w).
iterate() runs it with a Cauchy stopping rule, oscillation detection and an
iteration budget.  guarantee() certifies convergence up-front from matrix-norm
bounds; build_divergence_witness() constructs the mutual-attack/cross-support
graphs whose iteration provably never settles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .aggregators import Aggregator, aggregate_all
from .errors import (
    DomainViolation,
    NonFiniteIteration,
    PolarityViolation,
    RangeViolation,
    SingularSystem,
    UnknownName,
)
from .graph import ValueDomain, Wasa, indegree, is_acyclic, require_valid
from .influences import Influence

# A detected cycle must replay much more tightly than the orbit moves in a
# single step, otherwise slow alternating convergence would masquerade as a
# genuine cycle.
_CYCLE_REL_GUARD = 1e-3


@dataclass(frozen=True)
class Semantics:
    """A modular semantics: aggregation composed with influence."""

    aggregator: Aggregator
    influence: Influence
    name: str | None = None
    polarity: str = "any"  # graph restriction: "any" | "supports" | "attacks"

    def describe(self) -> str:
        if self.name:
            return self.name
        return f"{self.aggregator.kind}+{self.influence.describe()}"


@dataclass(frozen=True)
class IterationConfig:
    tolerance: float = 1e-9
    max_iterations: int = 10_000
    detect_cycles: bool = True
    max_period: int = 64
    cycle_tolerance: float = 1e-7
    record_trace: bool = False

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.max_period < 2:
            raise ValueError("cycle period cap must be at least 2")


@dataclass(frozen=True)
class Converged:
    degrees: np.ndarray
    iterations: int
    residual: float
    trace: tuple | None = None


@dataclass(frozen=True)
class Oscillating:
    period: int
    cycle: tuple
    detected_at: int
    trace: tuple | None = None


@dataclass(frozen=True)
class BudgetExhausted:
    last: np.ndarray
    residual: float
    trace: tuple | None = None


IterationOutcome = Converged | Oscillating | BudgetExhausted


def _check_inputs(wasa: Wasa, sem: Semantics) -> None:
    require_valid(wasa)
    dom = sem.influence.value_domain
    for i, wi in enumerate(wasa.w.tolist()):
        if not dom.contains(wi):
            raise DomainViolation(
                f"weight {wi} of {wasa.labels[i]!r} outside the "
                f"{sem.influence.kind} value domain")
    polarity = sem.polarity
    if sem.aggregator.polarity != "any":
        polarity = sem.aggregator.polarity
    if polarity == "supports" and bool((wasa.g == -1).any()):
        raise PolarityViolation(f"{sem.describe()} admits support edges only")
    if polarity == "attacks" and bool((wasa.g == 1).any()):
        raise PolarityViolation(f"{sem.describe()} admits attack edges only")
    if sem.aggregator.unit_degrees_only:
        for i, wi in enumerate(wasa.w.tolist()):
            if not 0.0 <= wi <= 1.0:
                raise DomainViolation(
                    f"{sem.aggregator.kind} needs weights in [0, 1], got {wi}")


def _step(G: np.ndarray, w: np.ndarray, d: np.ndarray, sem: Semantics) -> np.ndarray:
    return sem.influence.evaluate_vec(aggregate_all(sem.aggregator, G, d), w)


def fixpoint_residual(wasa: Wasa, sem: Semantics, d: np.ndarray) -> float:
    """Max-norm distance between d and one application of the update map."""
    with np.errstate(over="ignore", invalid="ignore"):
        nxt = _step(wasa.g, wasa.w, np.asarray(d, dtype=float), sem)
        return float(np.abs(nxt - d).max(initial=0.0))


def iterate(wasa: Wasa, sem: Semantics,
            cfg: IterationConfig = IterationConfig()) -> IterationOutcome:
    """Run the defining iteration until it settles, cycles or runs out."""
    _check_inputs(wasa, sem)
    G = wasa.g
    w = wasa.w
    n = wasa.n
    current = w.astype(float).copy()
    trace: list[np.ndarray] | None = [current.copy()] if cfg.record_trace else None

    # Ring buffers over the last max_period iterates and step norms;
    # slot j % (window+1) holds f^j.
    window = cfg.max_period
    hist = np.empty((window + 1, n))
    hist[0] = current
    step_hist = np.empty(window)

    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(1, cfg.max_iterations + 1):
            try:
                nxt = _step(G, w, current, sem)
            except (DomainViolation, RangeViolation) as exc:
                raise NonFiniteIteration(
                    i, f"iterate left the representable domain at step {i}: {exc}"
                ) from exc
            if not np.isfinite(nxt).all():
                raise NonFiniteIteration(i)
            step = float(np.abs(nxt - current).max(initial=0.0))
            if trace is not None:
                trace.append(nxt.copy())
            hist[i % (window + 1)] = nxt
            step_hist[(i - 1) % window] = step

            if step < cfg.tolerance:
                return Converged(
                    degrees=nxt,
                    iterations=i,
                    residual=fixpoint_residual(wasa, sem, nxt),
                    trace=tuple(trace) if trace is not None else None,
                )

            if cfg.detect_cycles and i >= 2:
                found = _detect_cycle(hist, step_hist, i, window, cfg)
                if found is not None:
                    period, cycle = found
                    return Oscillating(
                        period=period,
                        cycle=cycle,
                        detected_at=i,
                        trace=tuple(trace) if trace is not None else None,
                    )
            current = nxt

    return BudgetExhausted(
        last=current,
        residual=fixpoint_residual(wasa, sem, current),
        trace=tuple(trace) if trace is not None else None,
    )


def _detect_cycle(hist: np.ndarray, step_hist: np.ndarray, i: int, window: int,
                  cfg: IterationConfig) -> tuple[int, tuple] | None:
    avail = min(i, window)
    latest = hist[i % (window + 1)]
    back = np.arange(1, avail + 1)
    gaps = np.abs(hist[(i - back) % (window + 1)] - latest).max(axis=1)
    # amplitudes[p-1] = largest single step over the last p steps
    amplitudes = np.maximum.accumulate(step_hist[(i - back) % window])
    hit = (
        (gaps < cfg.cycle_tolerance)
        & (amplitudes > 10.0 * cfg.tolerance)
        & (gaps <= _CYCLE_REL_GUARD * amplitudes)
    )
    hit[0] = False  # period 1 is convergence, handled by the Cauchy rule
    if not hit.any():
        return None
    p = int(np.argmax(hit)) + 1
    cycle = tuple(hist[(i - p + k) % (window + 1)].copy() for k in range(p))
    for a in range(p):
        for b in range(a + 1, p):
            if float(np.abs(cycle[a] - cycle[b]).max(initial=0.0)) < \
                    cfg.cycle_tolerance:
                return None  # members collide: not a genuine period-p cycle
    return p, cycle


# ---------------------------------------------------------------------------
# Closed-form solvers
# ---------------------------------------------------------------------------

PIVOT_THRESHOLD = 1e-12


def gauss_solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Dense Gaussian elimination with partial pivoting."""
    a = np.array(a, dtype=float)
    b = np.array(b, dtype=float)
    n = b.shape[0]
    for k in range(n):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if abs(a[p, k]) < PIVOT_THRESHOLD:
            raise SingularSystem(f"pivot {a[p, k]:.3e} below threshold in column {k}")
        if p != k:
            a[[k, p]] = a[[p, k]]
            b[[k, p]] = b[[p, k]]
        for i in range(k + 1, n):
            if a[i, k] != 0.0:
                lam = a[i, k] / a[k, k]
                a[i, k + 1:] -= lam * a[k, k + 1:]
                a[i, k] = 0.0
                b[i] -= lam * b[k]
    x = np.zeros(n)
    for k in range(n - 1, -1, -1):
        x[k] = (b[k] - a[k, k + 1:] @ x[k + 1:]) / a[k, k]
    return x


def solve_direct(wasa: Wasa, delta: float) -> np.ndarray:
    """Fixpoint of sum + linear(delta): solves (I - G/delta) D = w."""
    require_valid(wasa)
    if not delta > 0:
        raise ValueError("delta must be positive")
    n = wasa.n
    a = np.eye(n) - wasa.g.astype(float) / delta
    return gauss_solve(a, wasa.w)


def solve_sigmoid_direct(wasa: Wasa, delta: float) -> np.ndarray:
    """Fixpoint of sum-sigma + sigmoid(delta), via the atanh transport."""
    require_valid(wasa)
    if np.abs(wasa.w).max(initial=0.0) >= 1.0 - 1e-12:
        raise DomainViolation("sigmoid solver needs weights strictly inside (-1, 1)")
    x = solve_direct(Wasa(wasa.labels, wasa.g, np.arctanh(wasa.w),
                          ValueDomain.reals()), delta)
    return np.tanh(x)


def matrix_exponential_degrees(wasa: Wasa, term_tol: float = 1e-12) -> np.ndarray:
    """Truncated series sum_k (G^k / k!) w, stopped at term max-norm < term_tol."""
    require_valid(wasa)
    G = wasa.g.astype(float)
    term = wasa.w.astype(float).copy()
    acc = term.copy()
    for k in range(1, 101):
        term = (G @ term) / k
        acc += term
        if float(np.abs(term).max(initial=0.0)) < term_tol:
            break
    return acc


# ---------------------------------------------------------------------------
# Convergence certificates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GuaranteeReport:
    guaranteed: bool
    theorem: str | None
    reason: str
    details: dict = field(compare=False, default_factory=dict)


def _euler_effective(wasa: Wasa) -> tuple[int, float]:
    """Indegree and min weight after dropping weight-0 arguments, which are
    pinned at 0 and influence nothing."""
    keep = np.nonzero(wasa.w != 0.0)[0]
    if keep.size == 0:
        return 0, 0.0
    sub = wasa.g[np.ix_(keep, keep)]
    ind = int(np.abs(sub).sum(axis=1).max(initial=0))
    return ind, float(wasa.w[keep].min())


def _norm_certificate(wasa: Wasa, sem: Semantics,
                      details: dict) -> tuple[bool, str | None, str]:
    """The matrix-norm premises; acyclicity is handled by the caller."""
    agg = sem.aggregator.kind
    inf = sem.influence
    ind = details["indegree"]
    w_min = float(wasa.w.min(initial=0.0))
    w_max = float(wasa.w.max(initial=0.0))

    if agg in ("sum", "sum_pos"):
        if inf.kind == "euler":
            eff_ind, eff_wmin = _euler_effective(wasa)
            bound = 4.0 / (1.0 - eff_wmin * eff_wmin) if eff_wmin < 1.0 else math.inf
            details.update(effective_indegree=eff_ind, bound=bound)
            if eff_ind < bound:
                return True, "convergence-euler", \
                    f"effective indegree {eff_ind} < {bound:.6g}"
            return False, None, f"effective indegree {eff_ind} >= {bound:.6g}"
        if inf.kind == "linear":
            if ind < inf.delta:
                return True, "direct-aggregation-convergence", \
                    f"indegree {ind} < delta {inf.delta:g}"
            return False, None, f"indegree {ind} >= delta {inf.delta:g}"
        if inf.kind == "qmax":
            if ind <= 1:
                return True, "convergence-quadratic", f"indegree {ind} <= 1"
            return False, None, f"indegree {ind} > 1"
        m = inf.derivative_sup(w_min, w_max)
        details["m"] = m
        if m * ind < 1.0:
            return True, "convergence-sum", f"m*indegree = {m * ind:.6g} < 1"
        return False, None, f"m*indegree = {m * ind:.6g} >= 1"

    if agg == "sum_sigma" and inf.kind == "sigmoid":
        if ind < inf.delta:
            return True, "sigmoid-direct-aggregation-convergence", \
                f"indegree {ind} < delta {inf.delta:g}"
        return False, None, f"indegree {ind} >= delta {inf.delta:g}"

    if agg == "top":
        if inf.kind == "euler":
            return True, "max-euler-convergence", \
                "top aggregation with slope bound 1/4 < 1/2"
        if inf.kind == "linear":
            if inf.delta > 2.0:
                return True, "conv-max-based-aggr", f"delta {inf.delta:g} > 2"
            return False, None, f"delta {inf.delta:g} <= 2"
        m = inf.derivative_sup(w_min, w_max)
        details["m"] = m
        if m < 0.5:
            return True, "convergence-top", f"m = {m:.6g} < 1/2"
        return False, None, f"m = {m:.6g} >= 1/2"

    if agg == "top_sigma" and inf.kind == "sigmoid":
        if inf.delta > 2.0:
            return True, "sigmoid-conv-max-based-aggr", f"delta {inf.delta:g} > 2"
        return False, None, f"delta {inf.delta:g} <= 2"

    return False, None, \
        f"no norm-based convergence theorem covers {sem.describe()}"


def guarantee(wasa: Wasa, sem: Semantics) -> GuaranteeReport:
    """Apply the strongest matching convergence theorem premise."""
    require_valid(wasa)
    details: dict = {"indegree": indegree(wasa), "delta": sem.influence.delta}
    ok, theorem, reason = _norm_certificate(wasa, sem, details)
    if ok:
        return GuaranteeReport(True, theorem, reason, details)
    if is_acyclic(wasa):
        return GuaranteeReport(True, "limit-acyclic",
                               f"graph is acyclic ({reason})", details)
    return GuaranteeReport(False, None, reason, details)


# ---------------------------------------------------------------------------
# Divergence witnesses
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DivergenceParams:
    k: int
    v: float
    w: float


def build_divergence_witness(k: int, v: float, w: float,
                             domain: ValueDomain) -> Wasa:
    """2k-node witness: the a-block and b-block each attack themselves
    completely (self-loops included) and fully support the other block."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if not v > w:
        raise ValueError(f"witness needs v > w, got v={v} w={w}")
    for x in (v, w):
        if not domain.contains(x):
            raise DomainViolation(f"witness weight {x} outside the value domain")
    n = 2 * k
    g = np.ones((n, n), dtype=np.int64)
    g[:k, :k] = -1
    g[k:, k:] = -1
    labels = tuple(f"a_{i}" for i in range(1, k + 1)) + \
        tuple(f"b_{i}" for i in range(1, k + 1))
    weights = np.array([v] * k + [w] * k)
    return Wasa(labels, g, weights, domain)


_DIVERGENCE_TABLE = {
    "multilinear": (1, 0.5, 0.4),
    "qmax": (1, 1.0, 0.0),
    "combined_fractional": (2, 0.5, 0.4),
    "euler": (3, 0.5, 0.4),
}


def divergence_params(inf: Influence) -> DivergenceParams:
    """Tabulated witness parameters per influence kind.

    linear/sigmoid use k = delta'/2 where delta' rounds delta up to the next
    even integer plus two (delta+2 if even, delta+1 if odd).
    """
    if inf.kind in _DIVERGENCE_TABLE:
        k, v, w = _DIVERGENCE_TABLE[inf.kind]
        return DivergenceParams(k, v, w)
    if inf.kind in ("linear", "sigmoid"):
        d = inf.delta
        if d == int(d):
            d = int(d)
            d_prime = d + 2 if d % 2 == 0 else d + 1
            k = d_prime // 2
        else:
            k = math.floor(d / 2.0) + 1
        return DivergenceParams(k, 2.0 / 3.0, 3.0 / 5.0)
    if inf.s_range != "any":
        raise RangeViolation(
            f"{inf.kind} is defined for one aggregate sign only; the "
            "divergence construction needs both")
    return constructive_divergence_params(inf)


def constructive_divergence_params(inf: Influence) -> DivergenceParams:
    """Derive (k, v, w) from the recipe: pick mid-domain w, a step eps with
    w+eps in the domain, k >= eps/(iota(eps,w)-w), v = w + eps/k."""
    dom = inf.value_domain
    lo = dom.lo if dom.lo is not None else -1.0
    hi = dom.hi if dom.hi is not None else 1.0
    w = (lo + hi) / 2.0
    eps = (hi - w) / 2.0
    lift = inf.evaluate(eps, w) - w
    if not lift > 0:
        raise RangeViolation(f"{inf.kind} gives no positive lift at w={w}")
    k = max(1, math.ceil(eps / lift))
    v = w + eps / k
    return DivergenceParams(k, v, w)


def divergence_semantics(inf: Influence) -> Semantics:
    """The sum-based semantics under which the witness is iterated; the
    sigmoid influence pairs with the sigma aggregator, its conjugate."""
    agg = Aggregator("sum_sigma" if inf.kind == "sigmoid" else "sum")
    return Semantics(agg, inf)


def divergence_inequality_holds(inf: Influence, params: DivergenceParams) -> bool:
    """Check iota(k(v-w), w) >= iota(k(w-v), v) on the witness parameters.

    For the sigmoid influence the comparison transports through atanh,
    matching the sigma aggregation the witness is actually iterated with.
    """
    k, v, w = params.k, params.v, params.w
    if inf.kind == "sigmoid":
        v_hat, w_hat = math.atanh(v), math.atanh(w)
        lhs = inf.evaluate(k * (v_hat - w_hat), w)
        rhs = inf.evaluate(k * (w_hat - v_hat), v)
    else:
        lhs = inf.evaluate(k * (v - w), w)
        rhs = inf.evaluate(k * (w - v), v)
    return lhs >= rhs


# ---------------------------------------------------------------------------
# Semantics registry
# ---------------------------------------------------------------------------

_NO_DELTA = object()


def _entry(agg_kind: str, inf_kind: str, polarity: str = "any",
           fixed_delta: object = _NO_DELTA):
    return (agg_kind, inf_kind, polarity, fixed_delta)


_REGISTRY = {
    # bipolar semantics
    "euler": _entry("sum", "euler"),
    "max-euler": _entry("top", "euler"),
    "direct": _entry("sum", "linear"),
    "positive-direct": _entry("sum_pos", "linear"),
    "sigmoid-direct": _entry("sum_sigma", "sigmoid"),
    "damped-max": _entry("top", "linear"),
    "sigmoid-damped-max": _entry("top_sigma", "sigmoid"),
    "quadratic-energy": _entry("sum", "qmax"),
    # unipolar restrictions
    "aggregation-based": _entry("sum", "pos_fractional", "supports"),
    "h-categorizer": _entry("sum", "neg_fractional", "attacks"),
    "combined-h-categorizer": _entry("sum", "combined_fractional"),
    "top-based": _entry("top", "multilinear", "supports"),
    "weighted-max-based": _entry("top", "neg_fractional", "attacks"),
    "reward-based": _entry("reward", "multilinear", "supports"),
    "card-based": _entry("card", "neg_fractional", "attacks"),
}

# The bipolar comparison set, in presentation order.
COMPARISON_SEMANTICS = (
    "euler",
    "max-euler",
    "direct",
    "damped-max",
    "positive-direct",
    "sigmoid-direct",
    "sigmoid-damped-max",
)

BIPOLAR_SEMANTICS = COMPARISON_SEMANTICS + ("quadratic-energy",)

SEMANTICS_NAMES = tuple(_REGISTRY)


def semantics_needs_delta(name: str) -> bool:
    if name not in _REGISTRY:
        raise UnknownName(f"unknown semantics {name!r}")
    _, inf_kind, _, _ = _REGISTRY[name]
    return inf_kind in ("linear", "sigmoid")


def registry(name: str, delta: float | None = None) -> Semantics:
    """Look up a named (aggregation, influence) pair."""
    try:
        agg_kind, inf_kind, polarity, _ = _REGISTRY[name]
    except KeyError:
        raise UnknownName(f"unknown semantics {name!r}; "
                          f"known: {', '.join(sorted(_REGISTRY))}") from None
    if inf_kind in ("linear", "sigmoid"):
        if delta is None:
            raise ValueError(f"semantics {name!r} needs a damping factor delta")
        influence = Influence(inf_kind, delta)
    else:
        influence = Influence(inf_kind)
    return Semantics(Aggregator(agg_kind), influence, name=name, polarity=polarity)
