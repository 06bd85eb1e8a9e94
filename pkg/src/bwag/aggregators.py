"""Aggregation functions: combine a parent row with the degree vector.

Each function takes one row g of the incidence matrix (entries in
{-1, 0, 1}) and the full degree vector d, and returns one real number
summarising the net influence of the parents.  aggregate_all applies a
function row-wise to the whole matrix.

Polarity/domain restrictions (reward: supports only, card: attacks only,
both over [0, 1]; the sigma variants need degrees strictly inside
(-1, 1)) are enforced here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainViolation, LengthMismatch, PolarityViolation

AGGREGATOR_KINDS = ("sum", "sum_pos", "sum_sigma", "top", "top_sigma", "reward", "card")

# Degrees this close to +-1 are rejected by atanh-based code instead of
# silently saturating.
SIGMA_EDGE = 1e-12


def sigma(x: float) -> float:
    """The fixed sigmoid: hyperbolic tangent."""
    return math.tanh(x)


def sigma_inv(y: float) -> float:
    if abs(y) >= 1.0:
        raise DomainViolation(f"value {y} outside (-1, 1)")
    return math.atanh(y)


def _sigma_inv_vec(d: np.ndarray) -> np.ndarray:
    if np.abs(d).max(initial=0.0) >= 1.0 - SIGMA_EDGE:
        bad = int(np.argmax(np.abs(d)))
        raise DomainViolation(f"degree {d[bad]} at index {bad} outside (-1, 1)")
    return np.arctanh(d)


def _check_lengths(g: np.ndarray, d: np.ndarray) -> None:
    if g.shape != d.shape:
        raise LengthMismatch(f"row length {g.shape} != degree length {d.shape}")


def _row(g) -> np.ndarray:
    return np.asarray(g, dtype=float)


def agg_sum(g, d) -> float:
    g, d = _row(g), _row(d)
    _check_lengths(g, d)
    return float(g @ d)


def agg_sum_pos(g, d) -> float:
    """Like sum, but parents with negative degrees are ignored."""
    g, d = _row(g), _row(d)
    _check_lengths(g, d)
    return float(g @ np.where(d >= 0.0, d, 0.0))


def agg_sum_sigma(g, d) -> float:
    g, d = _row(g), _row(d)
    _check_lengths(g, d)
    return float(g @ _sigma_inv_vec(d))


def _top_value(g: np.ndarray, d: np.ndarray) -> float:
    """Strongest nonnegative supporter minus strongest nonnegative attacker.

    Equals top(g, d) . d from the printed definition: the retained entry per
    sign class is the first index attaining the maximum among parents with
    d_i >= 0, and only the attained value is observable here.
    """
    sup = d[(g == 1) & (d >= 0.0)]
    att = d[(g == -1) & (d >= 0.0)]
    s = float(sup.max()) if sup.size else 0.0
    a = float(att.max()) if att.size else 0.0
    return s - a


def agg_top(g, d) -> float:
    g, d = _row(g), _row(d)
    _check_lengths(g, d)
    return _top_value(g, d)


def agg_top_sigma(g, d) -> float:
    g, d = _row(g), _row(d)
    _check_lengths(g, d)
    return _top_value(g, _sigma_inv_vec(d))


def _founded_count_and_mass(g: np.ndarray, d: np.ndarray) -> tuple[float, float]:
    n = float(g @ np.abs(np.sign(d)))
    s = float(g @ d)
    return n, s


def agg_reward(g, d, *, enforce: bool = True) -> float:
    """Count-first aggregation: s/(|n| 2^|n|) + sgn(n) * sum_{j<|n|} 2^-j.

    Admissible only on support rows with degrees in [0, 1]; pass
    enforce=False to evaluate the bare formula outside that region.
    """
    g, d = _row(g), _row(d)
    _check_lengths(g, d)
    if enforce:
        if (g == -1).any():
            raise PolarityViolation("reward aggregation admits support rows only")
        if d.size and (d.min() < 0.0 or d.max() > 1.0):
            raise DomainViolation("reward aggregation requires degrees in [0, 1]")
    n, s = _founded_count_and_mass(g, d)
    if n == 0:
        return 0.0
    an = abs(n)
    series = (1.0 - 0.5 ** (an - 1.0)) * math.copysign(1.0, n)
    return s / (an * 2.0 ** an) + series


def agg_card(g, d, *, enforce: bool = True) -> float:
    """Count-first aggregation for attackers: n + s/|n|."""
    g, d = _row(g), _row(d)
    _check_lengths(g, d)
    if enforce:
        if (g == 1).any():
            raise PolarityViolation("card aggregation admits attack rows only")
        if d.size and (d.min() < 0.0 or d.max() > 1.0):
            raise DomainViolation("card aggregation requires degrees in [0, 1]")
    n, s = _founded_count_and_mass(g, d)
    if n == 0:
        return 0.0
    return n + s / abs(n)


_ROW_FUNCTIONS = {
    "sum": agg_sum,
    "sum_pos": agg_sum_pos,
    "sum_sigma": agg_sum_sigma,
    "top": agg_top,
    "top_sigma": agg_top_sigma,
    "reward": agg_reward,
    "card": agg_card,
}

# Polarity of rows each kind admits, and the factor by which the kind
# amplifies a degree perturbation in one iteration step (used by the
# convergence certificates: sum-like kinds scale with the indegree, the
# top kinds are bounded by the constant 2).
_POLARITY = {"reward": "supports", "card": "attacks"}
_SIGMA_KINDS = frozenset({"sum_sigma", "top_sigma"})


@dataclass(frozen=True)
class Aggregator:
    """One of the closed set of aggregation functions, with metadata."""

    kind: str

    def __post_init__(self):
        if self.kind not in AGGREGATOR_KINDS:
            raise ValueError(f"unknown aggregator kind {self.kind!r}")

    @property
    def polarity(self) -> str:
        return _POLARITY.get(self.kind, "any")

    @property
    def needs_open_unit_degrees(self) -> bool:
        return self.kind in _SIGMA_KINDS

    @property
    def unit_degrees_only(self) -> bool:
        return self.kind in ("reward", "card")

    def norm_factor(self, graph_indegree: int) -> float:
        """Row-wise perturbation gain entering the contraction estimate."""
        if self.kind in ("top", "top_sigma"):
            return 2.0
        return float(graph_indegree)

    def evaluate_row(self, g, d) -> float:
        return _ROW_FUNCTIONS[self.kind](g, d)

    def evaluate_row_unchecked(self, g, d) -> float:
        """Evaluate the bare formula, skipping reward/card admissibility."""
        if self.kind in ("reward", "card"):
            return _ROW_FUNCTIONS[self.kind](g, d, enforce=False)
        return _ROW_FUNCTIONS[self.kind](g, d)


def aggregate_all(agg: Aggregator, G, d) -> np.ndarray:
    """Row-wise aggregation of the whole incidence matrix."""
    G = np.asarray(G, dtype=float)
    d = np.asarray(d, dtype=float)
    if G.ndim != 2 or G.shape[1] != d.shape[0]:
        raise LengthMismatch(f"matrix shape {G.shape} incompatible with degrees {d.shape}")
    kind = agg.kind
    if kind == "sum":
        return G @ d
    if kind == "sum_pos":
        return G @ np.where(d >= 0.0, d, 0.0)
    if kind == "sum_sigma":
        return G @ _sigma_inv_vec(d)
    if kind in ("top", "top_sigma"):
        x = d if kind == "top" else _sigma_inv_vec(d)
        row = np.broadcast_to(x, G.shape)
        eligible = row >= 0.0
        sup = np.where((G == 1) & eligible, row, -np.inf).max(axis=1, initial=-np.inf)
        att = np.where((G == -1) & eligible, row, -np.inf).max(axis=1, initial=-np.inf)
        sup = np.where(np.isfinite(sup), sup, 0.0)
        att = np.where(np.isfinite(att), att, 0.0)
        return sup - att
    return np.array([agg.evaluate_row(G[i], d) for i in range(G.shape[0])])
