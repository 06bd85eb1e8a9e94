"""Engine: iteration outcomes, solvers, certificates, witnesses, registry."""

import math
import random

import numpy as np
import pytest

from bwag.engine import (
    BIPOLAR_SEMANTICS,
    BudgetExhausted,
    COMPARISON_SEMANTICS,
    Converged,
    IterationConfig,
    Oscillating,
    build_divergence_witness,
    constructive_divergence_params,
    divergence_inequality_holds,
    divergence_params,
    divergence_semantics,
    gauss_solve,
    guarantee,
    iterate,
    matrix_exponential_degrees,
    registry,
    solve_direct,
    solve_sigmoid_direct,
)
from bwag.errors import (
    DomainViolation,
    NonFiniteIteration,
    PolarityViolation,
    SingularSystem,
    UnknownName,
)
from bwag.axioms import random_acyclic_wasa
from bwag.graph import (
    Permutation,
    ValueDomain,
    Wasa,
    apply_isomorphism,
    builtin,
    disjoint_union,
    indegree,
    with_domain,
)
from bwag.influences import Influence

COMPARISON_TABLE = {
    "euler": (0.8, 0.894, 0.000, 0.604),
    "max-euler": (0.8, 0.801, 0.000, 0.612),
    "direct": (0.8, 1.161, -1.039, 0.120),
    "damped-max": (0.8, 1.400, -0.699, 0.000),
    "positive-direct": (0.8, 2.200, -1.499, -0.400),
    "sigmoid-direct": (0.8, 0.902, -0.875, 0.126),
    "sigmoid-damped-max": (0.8, 0.940, -0.699, 0.000),
}


def _sem(name, delta=2.0):
    return registry(name, delta) if name not in ("euler", "max-euler",
                                                 "quadratic-energy") \
        else registry(name)


def test_published_comparison_values():
    ex2 = builtin("ex2")
    for name, expected in COMPARISON_TABLE.items():
        out = iterate(ex2, _sem(name))
        assert isinstance(out, Converged), name
        assert out.degrees == pytest.approx(expected, abs=5e-4), name
        assert out.residual < 1e-8


def test_converged_satisfies_fixpoint_equation():
    ex2 = builtin("ex2")
    cfg = IterationConfig(tolerance=1e-9)
    for name in COMPARISON_TABLE:
        out = iterate(ex2, _sem(name), cfg)
        assert out.residual < 10 * cfg.tolerance


def test_oscillation_detected_on_two_node_cycle():
    wasa = build_divergence_witness(1, 0.75, 0.25, ValueDomain.unit())
    out = iterate(wasa, registry("combined-h-categorizer"))
    assert isinstance(out, Oscillating)
    assert out.period == 2
    assert out.detected_at <= 10
    cycle = sorted(tuple(v) for v in out.cycle)
    assert cycle[0] == pytest.approx((0.5, 0.5), abs=1e-9)
    assert cycle[1] == pytest.approx((0.75, 0.25), abs=1e-9)


def test_acyclic_graphs_stabilize_exactly():
    rng = random.Random(21)
    for _ in range(40):
        wasa = random_acyclic_wasa(rng, n_max=7)
        for name in BIPOLAR_SEMANTICS:
            out = iterate(wasa, _sem(name, delta=3.0))
            assert isinstance(out, Converged), (name, wasa.g)
            assert out.iterations <= wasa.n
            assert out.residual == 0.0


def test_trace_records_every_iterate():
    wasa = builtin("exp-counter")
    cfg = IterationConfig(record_trace=True)
    out = iterate(with_domain(wasa, ValueDomain.reals()),
                  registry("direct", 2.0), cfg)
    assert isinstance(out, Converged)
    assert len(out.trace) == out.iterations + 1
    assert out.trace[0] == pytest.approx(wasa.w)
    assert out.trace[-1] == pytest.approx(out.degrees)


def test_iterate_rejects_bad_inputs():
    bad = Wasa(("a",), [[0]], [1.5], ValueDomain.reals())
    with pytest.raises(DomainViolation):
        iterate(bad, registry("euler"))
    mixed = builtin("ex2")
    with pytest.raises(PolarityViolation):
        iterate(mixed, registry("aggregation-based"))
    with pytest.raises(PolarityViolation):
        iterate(mixed, registry("reward-based"))


def test_budget_exhaustion_reported():
    wasa = build_divergence_witness(3, 0.5, 0.4, ValueDomain.unit_half_open())
    cfg = IterationConfig(tolerance=1e-12, max_iterations=50, detect_cycles=False)
    out = iterate(wasa, registry("euler"), cfg)
    assert isinstance(out, BudgetExhausted)
    assert out.residual > 1e-6


def test_slow_alternating_convergence_is_not_misreported_as_cycle():
    # Mutual attackers under linear damping barely above the indegree give a
    # Jacobian eigenvalue near -1: consecutive iterates flip sides for
    # thousands of steps while genuinely converging.  The cycle detector's
    # relative guard must keep its hands off.
    wasa = Wasa(("a", "b"), [[0, -1], [-1, 0]], [0.9, -0.3],
                ValueDomain.reals())
    for delta in (1.02, 1.002):
        out = iterate(wasa, registry("direct", delta),
                      IterationConfig(tolerance=1e-12, max_iterations=200_000))
        assert isinstance(out, Converged), delta
        assert out.degrees == pytest.approx(solve_direct(wasa, delta), abs=1e-9)


def test_isomorphism_equivariance_of_degrees():
    ex2 = builtin("ex2")
    p = Permutation.swap(4, 2, 3)
    moved = apply_isomorphism(ex2, p)
    for name in ("euler", "direct"):
        base = iterate(ex2, _sem(name)).degrees
        perm = iterate(moved, _sem(name)).degrees
        for i in range(4):
            assert perm[p(i)] == pytest.approx(base[i], abs=1e-8)


def test_union_evaluates_componentwise():
    left = with_domain(builtin("ex1"), ValueDomain.reals())
    right = builtin("ex2")
    union = disjoint_union(left, right)
    sem = registry("direct", 4.0)
    got = iterate(union, sem).degrees
    expect = np.concatenate([iterate(left, sem).degrees,
                             iterate(right, sem).degrees])
    assert got == pytest.approx(expect, abs=1e-8)


# -- closed-form solvers ----------------------------------------------------

def test_solve_direct_published_row():
    deg = solve_direct(builtin("ex2"), 2.0)
    assert deg == pytest.approx((0.8, 1.161, -1.039, 0.120), abs=5e-4)


def test_solve_direct_trivia():
    edgeless = Wasa(("a", "b"), np.zeros((2, 2), dtype=int), [0.3, -0.4],
                    ValueDomain.reals())
    assert solve_direct(edgeless, 3.0) == pytest.approx([0.3, -0.4])
    loop = Wasa(("a",), [[1]], [1.0], ValueDomain.reals())
    assert solve_direct(loop, 2.0) == pytest.approx([2.0])
    singular = Wasa(("a",), [[1]], [1.0], ValueDomain.reals())
    with pytest.raises(SingularSystem):
        solve_direct(singular, 1.0)


def test_solve_sigmoid_direct_trivia():
    edgeless = Wasa(("a",), [[0]], [0.4], ValueDomain.open_signed_unit())
    assert solve_sigmoid_direct(edgeless, 2.0) == pytest.approx([0.4])
    loop = Wasa(("a",), [[1]], [math.tanh(1.0)], ValueDomain.open_signed_unit())
    assert solve_sigmoid_direct(loop, 2.0) == pytest.approx([math.tanh(2.0)])
    with pytest.raises(DomainViolation):
        solve_sigmoid_direct(Wasa(("a",), [[0]], [1.0], ValueDomain.reals()), 2.0)


def test_gauss_solve_matches_numpy():
    rng = np.random.default_rng(3)
    for _ in range(30):
        n = int(rng.integers(1, 8))
        a = rng.normal(size=(n, n)) + np.eye(n) * 3
        b = rng.normal(size=n)
        assert gauss_solve(a, b) == pytest.approx(np.linalg.solve(a, b))


def test_solvers_agree_with_iteration_on_random_graphs():
    rng = random.Random(17)
    for _ in range(40):
        n = rng.randint(1, 7)
        g = [[rng.choice((-1, 0, 0, 1)) for _ in range(n)] for _ in range(n)]
        w = [rng.uniform(-0.9, 0.9) for _ in range(n)]
        wasa = Wasa(tuple(f"v{i}" for i in range(n)), g, w, ValueDomain.reals())
        delta = indegree(wasa) + 1.0
        cfg = IterationConfig(tolerance=1e-12, max_iterations=100_000)
        direct = solve_direct(wasa, delta)
        lin = iterate(wasa, registry("direct", delta), cfg)
        assert isinstance(lin, Converged)
        assert direct == pytest.approx(lin.degrees, abs=1e-8)

        sig_wasa = with_domain(wasa, ValueDomain.open_signed_unit())
        sig = iterate(sig_wasa, registry("sigmoid-direct", delta), cfg)
        assert isinstance(sig, Converged)
        closed = solve_sigmoid_direct(sig_wasa, delta)
        assert closed == pytest.approx(sig.degrees, abs=1e-8)
        # sigma transport of the linear solve
        assert closed == pytest.approx(
            np.tanh(solve_direct(with_domain(
                Wasa(wasa.labels, wasa.g, np.arctanh(wasa.w)),
                ValueDomain.reals()), delta)), abs=1e-12)


# -- matrix exponential ------------------------------------------------------

def test_matrix_exponential_fixture():
    deg = matrix_exponential_degrees(builtin("exp-counter"))
    assert deg == pytest.approx((1.0, 2.0, 2.5, 2.0, 3.0), abs=1e-9)
    # equivalence violation: equal weight and parent degree, different result
    assert abs(deg[2] - deg[4]) > 0.4


def test_matrix_exponential_edgeless_identity():
    edgeless = Wasa(("a", "b"), np.zeros((2, 2), dtype=int), [0.7, -1.5],
                    ValueDomain.reals())
    assert matrix_exponential_degrees(edgeless) == pytest.approx([0.7, -1.5])


def test_matrix_exponential_matches_scipy_style_series():
    rng = np.random.default_rng(8)
    for _ in range(10):
        n = int(rng.integers(1, 6))
        g = rng.integers(-1, 2, size=(n, n))
        w = rng.normal(size=n)
        wasa = Wasa(tuple(f"v{i}" for i in range(n)), g, w, ValueDomain.reals())
        # independent oracle: dense matrix exponential via eigen-free scaling
        acc = np.zeros((n, n))
        term = np.eye(n)
        acc += term
        for k in range(1, 60):
            term = term @ g.astype(float) / k
            acc += term
        assert matrix_exponential_degrees(wasa, 1e-14) == pytest.approx(
            acc @ w, abs=1e-9)


# -- certificates -------------------------------------------------------------

def test_guarantee_published_cases():
    ex2 = builtin("ex2")
    rep = guarantee(ex2, registry("euler"))
    assert rep.guaranteed and rep.theorem == "convergence-euler"
    assert rep.details["indegree"] == 3

    witness = build_divergence_witness(3, 0.5, 0.4, ValueDomain.unit_half_open())
    assert not guarantee(witness, registry("euler")).guaranteed

    rep = guarantee(witness, registry("max-euler"))
    assert rep.guaranteed and rep.theorem == "max-euler-convergence"

    chain = Wasa(("a", "b"), [[0, 0], [-1, 0]], [0.5, 0.5], ValueDomain.unit())
    rep = guarantee(chain, registry("quadratic-energy"))
    assert rep.guaranteed and rep.theorem == "convergence-quadratic"
    two = build_divergence_witness(1, 0.6, 0.5, ValueDomain.unit())
    assert not guarantee(two, registry("quadratic-energy")).guaranteed


def test_guarantee_direct_aggregation_boundary():
    ex2 = builtin("ex2")  # indegree 3
    assert guarantee(ex2, registry("direct", 3.5)).guaranteed
    # equality left open by the theory: report no guarantee
    assert not guarantee(ex2, registry("direct", 3.0)).guaranteed
    assert guarantee(ex2, registry("sigmoid-direct", 3.5)).theorem == \
        "sigmoid-direct-aggregation-convergence"


def test_guarantee_top_and_acyclic_fallback():
    ex2 = builtin("ex2")
    assert guarantee(ex2, registry("damped-max", 2.5)).theorem == \
        "conv-max-based-aggr"
    assert not guarantee(ex2, registry("damped-max", 2.0)).guaranteed
    assert guarantee(ex2, registry("sigmoid-damped-max", 2.5)).theorem == \
        "sigmoid-conv-max-based-aggr"
    acyclic = builtin("exp-counter")
    rep = guarantee(with_domain(acyclic, ValueDomain.reals()),
                    registry("direct", 0.5))
    assert rep.guaranteed and rep.theorem == "limit-acyclic"


def test_guarantee_euler_ignores_pinned_zero_weights():
    # Five zero-weight attackers of one argument are pinned at 0 and must not
    # count toward the effective indegree.
    n = 6
    g = np.zeros((n, n), dtype=int)
    g[0, 1:] = -1
    w = np.array([0.5, 0.0, 0.0, 0.0, 0.0, 0.0])
    wasa = Wasa(tuple(f"v{i}" for i in range(n)), g, w,
                ValueDomain.unit_half_open())
    rep = guarantee(wasa, registry("euler"))
    assert rep.guaranteed
    assert rep.details["effective_indegree"] == 0
    out = iterate(wasa, registry("euler"))
    assert isinstance(out, Converged)


def test_certified_convergence_realized_on_random_graphs():
    rng = random.Random(33)
    cfg = IterationConfig(tolerance=1e-10, max_iterations=100_000)
    for _ in range(50):
        wasa = random_acyclic_wasa(rng, n_max=6, w_lo=0.05, w_hi=0.9)
        # densify with a few cyclic edges while keeping indegree <= 4
        g = wasa.g.copy()
        n = wasa.n
        for _ in range(n):
            i, j = rng.randrange(n), rng.randrange(n)
            if g[i, j] == 0 and int(np.abs(g[i]).sum()) < 4:
                g[i, j] = rng.choice((-1, 1))
        for i in range(n):
            while int(np.abs(g[i]).sum()) > 4:
                nz = np.nonzero(g[i])[0]
                g[i, int(rng.choice(nz.tolist()))] = 0
        cyclic = Wasa(wasa.labels, g, wasa.w, ValueDomain.unit_half_open())
        rep = guarantee(cyclic, registry("euler"))
        assert rep.guaranteed
        assert isinstance(iterate(cyclic, registry("euler"), cfg), Converged)


# -- divergence ---------------------------------------------------------------

def test_witness_shape_and_first_iterate():
    wit = build_divergence_witness(2, 0.5, 0.4, ValueDomain.unit())
    assert wit.n == 4
    assert indegree(wit) == 4
    assert wit.g.tolist() == [[-1, -1, 1, 1], [-1, -1, 1, 1],
                              [1, 1, -1, -1], [1, 1, -1, -1]]
    inf = Influence("combined_fractional")
    sem = divergence_semantics(inf)
    out = iterate(wit, sem, IterationConfig(max_iterations=1, detect_cycles=False,
                                            record_trace=True))
    f1 = out.trace[1]
    assert f1[0] == pytest.approx(inf.evaluate(2 * (0.4 - 0.5), 0.5))
    assert f1[2] == pytest.approx(inf.evaluate(2 * (0.5 - 0.4), 0.4))


def test_witness_parameter_validation():
    with pytest.raises(ValueError):
        build_divergence_witness(0, 0.5, 0.4, ValueDomain.unit())
    with pytest.raises(ValueError):
        build_divergence_witness(1, 0.4, 0.5, ValueDomain.unit())
    with pytest.raises(DomainViolation):
        build_divergence_witness(1, 1.5, 0.4, ValueDomain.unit())


def _params_tuple(inf):
    p = divergence_params(inf)
    return (p.k, p.v, p.w)


def test_divergence_params_table():
    assert _params_tuple(Influence("euler")) == (3, 0.5, 0.4)
    assert _params_tuple(Influence("multilinear")) == (1, 0.5, 0.4)
    assert _params_tuple(Influence("qmax")) == (1, 1.0, 0.0)
    assert _params_tuple(Influence("combined_fractional")) == (2, 0.5, 0.4)
    # delta': +2 when even, +1 when odd
    assert divergence_params(Influence("linear", 2)).k == 2
    assert divergence_params(Influence("linear", 3)).k == 2
    assert divergence_params(Influence("linear", 4)).k == 3
    assert divergence_params(Influence("sigmoid", 3)).k == 2
    p = divergence_params(Influence("linear", 3))
    assert (p.v, p.w) == (pytest.approx(2 / 3), pytest.approx(3 / 5))


def test_divergence_inequality_on_tabulated_rows():
    for inf in (Influence("multilinear"), Influence("qmax"),
                Influence("combined_fractional"), Influence("euler"),
                Influence("linear", 2), Influence("linear", 3),
                Influence("sigmoid", 2), Influence("sigmoid", 3)):
        assert divergence_inequality_holds(inf, divergence_params(inf)), inf.kind


def test_constructive_params_satisfy_predicate():
    for inf in (Influence("multilinear"), Influence("qmax"),
                Influence("combined_fractional"), Influence("euler"),
                Influence("linear", 2.5), Influence("sigmoid", 4.0)):
        p = constructive_divergence_params(inf)
        assert p.v > p.w
        assert inf.evaluate(p.k * (p.v - p.w), p.w) >= \
            inf.evaluate(p.k * (p.w - p.v), p.v) - 1e-12


def test_witnesses_never_converge():
    cfg = IterationConfig(tolerance=1e-10, max_iterations=100_000)
    for inf in (Influence("multilinear"), Influence("qmax"),
                Influence("combined_fractional"), Influence("euler"),
                Influence("linear", 3), Influence("sigmoid", 2)):
        p = divergence_params(inf)
        wit = build_divergence_witness(p.k, p.v, p.w, inf.value_domain)
        try:
            out = iterate(wit, divergence_semantics(inf), cfg)
        except NonFiniteIteration as exc:
            assert exc.iteration >= 1
            continue
        assert not isinstance(out, Converged), inf.kind


# -- registry -----------------------------------------------------------------

def test_registry_pairs():
    sem = registry("euler")
    assert (sem.aggregator.kind, sem.influence.kind) == ("sum", "euler")
    sem = registry("damped-max", 2.0)
    assert (sem.aggregator.kind, sem.influence.kind) == ("top", "linear")
    assert sem.influence.delta == 2.0
    sem = registry("quadratic-energy")
    assert (sem.aggregator.kind, sem.influence.kind) == ("sum", "qmax")
    assert registry("aggregation-based").polarity == "supports"
    assert registry("card-based").polarity == "attacks"
    with pytest.raises(UnknownName):
        registry("nope")
    with pytest.raises(ValueError):
        registry("direct")


def test_comparison_set_is_the_published_seven():
    assert COMPARISON_SEMANTICS == ("euler", "max-euler", "direct",
                                    "damped-max", "positive-direct",
                                    "sigmoid-direct", "sigmoid-damped-max")
    assert set(BIPOLAR_SEMANTICS) == set(COMPARISON_SEMANTICS) | {"quadratic-energy"}


def test_unipolar_certificates_are_sound_on_cyclic_graphs():
    rng = random.Random(99)
    cfg = IterationConfig(tolerance=1e-10, max_iterations=100_000)
    guaranteed = 0
    for name, sign in [("aggregation-based", 1), ("h-categorizer", -1),
                       ("top-based", 1), ("weighted-max-based", -1),
                       ("reward-based", 1), ("card-based", -1),
                       ("combined-h-categorizer", 1), ("combined-h-categorizer", -1)]:
        for _ in range(40):
            n = rng.randint(1, 6)
            g = np.zeros((n, n), dtype=int)
            for i in range(n):
                for j in range(n):
                    if rng.random() < 0.35:
                        g[i, j] = sign
            w = np.array([rng.uniform(0.05, 0.9) for _ in range(n)])
            wasa = Wasa(tuple(f"v{i}" for i in range(n)), g, w,
                        ValueDomain.unit())
            sem = registry(name)
            rep = guarantee(wasa, sem)
            if rep.guaranteed:
                guaranteed += 1
                out = iterate(wasa, sem, cfg)
                assert isinstance(out, Converged), (name, rep.theorem)
    assert guaranteed > 50


def test_unipolar_semantics_run_on_their_graphs():
    rng = random.Random(2)
    for name, sign in [("aggregation-based", 1), ("h-categorizer", -1),
                       ("top-based", 1), ("weighted-max-based", -1),
                       ("reward-based", 1), ("card-based", -1)]:
        for _ in range(10):
            n = rng.randint(1, 6)
            g = np.zeros((n, n), dtype=int)
            for i in range(1, n):
                for j in range(i):
                    if rng.random() < 0.5:
                        g[i, j] = sign
            w = [rng.uniform(0, 1) for _ in range(n)]
            wasa = Wasa(tuple(f"v{i}" for i in range(n)), g, w,
                        ValueDomain.unit())
            out = iterate(wasa, registry(name))
            assert isinstance(out, Converged), name
