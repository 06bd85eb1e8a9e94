"""Aggregation functions: published examples, restrictions, invariants."""

import math
import random

import numpy as np
import pytest

from bwag.aggregators import (
    Aggregator,
    agg_card,
    agg_reward,
    agg_sum,
    agg_sum_pos,
    agg_sum_sigma,
    agg_top,
    agg_top_sigma,
    aggregate_all,
    sigma,
    sigma_inv,
)
from bwag.errors import DomainViolation, LengthMismatch, PolarityViolation
from bwag.graph import builtin


def test_sum_examples():
    assert agg_sum([0, 0, 0], [0.3, -0.2, 0.9]) == 0.0
    assert agg_sum([1, 1, -1], [0.5, 0.2, 0.3]) == pytest.approx(0.4)
    with pytest.raises(LengthMismatch):
        agg_sum([1, 1], [0.5])


def test_sum_reproduces_direct_aggregation_fixpoint_row():
    # Row of a_2 at the delta=2 fixpoint, then one linear influence step.
    s = agg_sum([1, 1, 1, 0], [0.8, 1.161, -1.039, 0.120])
    assert s == pytest.approx(0.922, abs=1e-12)
    assert s / 2 + 0.7 == pytest.approx(1.161, abs=1e-9)


def test_sum_pos_ignores_negative_parents():
    assert agg_sum_pos([1, -1], [0.5, -0.3]) == pytest.approx(0.5)
    rng = random.Random(3)
    for _ in range(50):
        n = rng.randint(1, 6)
        g = [rng.choice((-1, 0, 1)) for _ in range(n)]
        d = [rng.uniform(0, 1) for _ in range(n)]
        assert agg_sum_pos(g, d) == pytest.approx(agg_sum(g, d))


def test_sum_pos_positive_direct_row():
    s = agg_sum_pos([1, 1, 1, 0], [0.8, 2.2, -1.499, -0.4])
    assert s == pytest.approx(3.0)
    assert s / 2 + 0.7 == pytest.approx(2.2)


def test_sum_sigma_examples():
    assert agg_sum_sigma([1], [0.0]) == 0.0
    assert agg_sum_sigma([1, -1], [0.7, 0.7]) == pytest.approx(0.0)
    assert agg_sum_sigma([1], [math.tanh(2.0)]) == pytest.approx(2.0, abs=1e-12)
    with pytest.raises(DomainViolation):
        agg_sum_sigma([1], [1.0])
    with pytest.raises(DomainViolation):
        agg_sum_sigma([1], [1.0 - 1e-13])


def test_top_examples():
    assert agg_top([1, 1, -1, -1], [0.3, 0.7, 0.5, 0.2]) == pytest.approx(0.2)
    assert agg_top([1, -1], [-0.4, -0.9]) == 0.0
    # damped max-based fixpoint row for a_2 at delta=2
    s = agg_top([1, 1, 1, 0], [0.8, 1.4, -0.699, 0.0])
    assert s == pytest.approx(1.4)
    assert s / 2 + 0.7 == pytest.approx(1.4)


def test_top_sigma_examples():
    assert agg_top_sigma([1], [0.0]) == 0.0
    assert agg_top_sigma([1], [math.tanh(1.5)]) == pytest.approx(1.5, abs=1e-12)


def test_top_sigma_monotone_in_supporters():
    # Brute-force comparison: raising any supporter degree never lowers the value.
    rng = random.Random(11)
    for _ in range(200):
        n = rng.randint(1, 6)
        g = [rng.choice((-1, 0, 1)) for _ in range(n)]
        d = [rng.uniform(-0.9, 0.9) for _ in range(n)]
        base = agg_top_sigma(g, d)
        sups = [i for i in range(n) if g[i] == 1]
        if not sups:
            continue
        i = rng.choice(sups)
        d2 = list(d)
        d2[i] = rng.uniform(d[i], 0.95)
        assert agg_top_sigma(g, d2) >= base - 1e-12


def test_reward_examples():
    assert agg_reward([1, 1], [0.0, 0.0]) == 0.0
    assert agg_reward([1], [0.5]) == pytest.approx(0.25)
    assert agg_reward([1, 1], [0.5, 0.5]) == pytest.approx(0.625)
    with pytest.raises(PolarityViolation):
        agg_reward([-1], [0.5])
    with pytest.raises(DomainViolation):
        agg_reward([1], [1.5])


def test_card_examples():
    assert agg_card([-1], [0.0]) == 0.0
    assert agg_card([-1], [0.5]) == pytest.approx(-1.5)
    assert agg_card([-1, -1], [1.0, 1.0]) == pytest.approx(-3.0)
    with pytest.raises(PolarityViolation):
        agg_card([1], [0.5])


def test_aggregate_all_matches_row_functions():
    ex2 = builtin("ex2")
    d = np.array([0.8, 1.4, -0.699, 0.0])
    top_all = aggregate_all(Aggregator("top"), ex2.g, d)
    assert top_all[2] == pytest.approx(-1.4)
    for kind in ("sum", "sum_pos", "top"):
        agg = Aggregator(kind)
        rows = [agg.evaluate_row(ex2.g[i], d) for i in range(4)]
        assert aggregate_all(agg, ex2.g, d) == pytest.approx(rows)
    zeros = aggregate_all(Aggregator("sum"), np.zeros((3, 3)), np.ones(3))
    assert not zeros.any()


def test_aggregate_all_sum_is_matrix_product():
    rng = random.Random(1)
    for _ in range(20):
        n = rng.randint(1, 6)
        G = np.array([[rng.choice((-1, 0, 1)) for _ in range(n)] for _ in range(n)])
        d = np.array([rng.uniform(-1, 1) for _ in range(n)])
        assert aggregate_all(Aggregator("sum"), G, d) == pytest.approx(G @ d)


def test_aggregate_all_sigma_kinds_match_rows():
    rng = random.Random(2)
    for _ in range(20):
        n = rng.randint(1, 6)
        G = np.array([[rng.choice((-1, 0, 1)) for _ in range(n)] for _ in range(n)])
        d = np.array([rng.uniform(-0.95, 0.95) for _ in range(n)])
        for kind in ("sum_sigma", "top_sigma"):
            agg = Aggregator(kind)
            rows = [agg.evaluate_row(G[i], d) for i in range(n)]
            assert aggregate_all(agg, G, d) == pytest.approx(rows)


def test_sigma_roundtrip():
    assert sigma(0.0) == 0.0
    assert sigma_inv(0.0) == 0.0
    assert sigma(sigma_inv(0.9)) == pytest.approx(0.9, abs=1e-12)
    # Binary64 caps the invertible range: tanh saturates to 1.0 just above
    # x = 18.7, and the roundtrip error grows like cosh^2(x) before that.
    for x in (-5.0, -3.5, 0.1, 2.0, 5.0):
        assert sigma_inv(sigma(x)) == pytest.approx(x, abs=1e-12)
    for x in (-12.0, 9.0, 14.0):
        assert sigma_inv(sigma(x)) == pytest.approx(
            x, abs=1e-12 + 6e-17 * math.exp(2 * abs(x)))
    with pytest.raises(DomainViolation):
        sigma_inv(1.0)
    with pytest.raises(DomainViolation):
        sigma_inv(sigma(20.0))


def test_stability_for_every_kind():
    rng = random.Random(4)
    for kind in ("sum", "sum_pos", "sum_sigma", "top", "top_sigma", "reward", "card"):
        agg = Aggregator(kind)
        for _ in range(30):
            n = rng.randint(1, 6)
            hi = 0.95 if kind in ("sum_sigma", "top_sigma") else 1.0
            lo = 0.0 if kind in ("reward", "card") else -hi
            d = [rng.uniform(lo, hi) for _ in range(n)]
            assert agg.evaluate_row([0] * n, d) == pytest.approx(0.0, abs=1e-12)


def test_norm_factors():
    assert Aggregator("sum").norm_factor(5) == 5.0
    assert Aggregator("top").norm_factor(100) == 2.0
    assert Aggregator("top_sigma").norm_factor(3) == 2.0
