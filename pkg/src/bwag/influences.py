"""Influence functions: fold an aggregate into an initial weight.

Every function maps (aggregate s, initial weight w) to a degree inside
its value domain.  Alongside the formula, each kind carries the domain,
the admissible aggregate range, and a sound upper bound on the partial
derivative in s, which is what the convergence certificates consume.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .aggregators import sigma, sigma_inv
from .errors import DomainViolation, RangeViolation
from .graph import ValueDomain

INFLUENCE_KINDS = (
    "multilinear",
    "pos_fractional",
    "neg_fractional",
    "combined_fractional",
    "euler",
    "linear",
    "sigmoid",
    "qmax",
)

_NEEDS_DELTA = frozenset({"linear", "sigmoid"})

# Above this aggregate the Euler formula is evaluated as its limit; the
# direct exponential would overflow without changing the value.
_EULER_CUTOFF = 700.0

# Sound bound for the QMax slope: sup of 2s/(1+s^2)^2 is ~0.6495.
_QMAX_SLOPE = 0.65


def _euler_scalar(s: float, w: float) -> float:
    if s > _EULER_CUTOFF:
        return 1.0 if w > 0.0 else w * w
    return 1.0 - (1.0 - w * w) / (1.0 + w * math.exp(s))


def _qmax_scalar(s: float, w: float) -> float:
    q = s * s / (1.0 + s * s)
    if s < 0.0:
        return w - w * q
    return w + (1.0 - w) * q


def _combined_scalar(s: float, w: float) -> float:
    if s < 0.0:
        return w / (1.0 - s)
    return (w + s) / (1.0 + s)


@dataclass(frozen=True)
class Influence:
    """One of the closed set of influence functions, with parameters."""

    kind: str
    delta: float | None = None

    def __post_init__(self):
        if self.kind not in INFLUENCE_KINDS:
            raise ValueError(f"unknown influence kind {self.kind!r}")
        if self.kind in _NEEDS_DELTA:
            if self.delta is None or not self.delta > 0:
                raise ValueError(f"{self.kind} needs a positive damping factor delta")
        elif self.delta is not None:
            raise ValueError(f"{self.kind} takes no damping factor")

    # -- metadata ----------------------------------------------------------

    @property
    def value_domain(self) -> ValueDomain:
        if self.kind == "euler":
            return ValueDomain.unit_half_open()
        if self.kind == "linear":
            return ValueDomain.reals()
        if self.kind == "sigmoid":
            return ValueDomain.open_signed_unit()
        return ValueDomain.unit()

    @property
    def s_range(self) -> str:
        """Admissible aggregate sign: 'any', 's>=0' or 's<=0'."""
        if self.kind == "pos_fractional":
            return "s>=0"
        if self.kind == "neg_fractional":
            return "s<=0"
        return "any"

    def admissible_s_box(self) -> tuple[float, float]:
        """Aggregate interval used by randomized trials.

        The multilinear box is [0, 1] (outside it the function leaves the
        unit interval and loses initial monotonicity); evaluation itself
        stays tolerant so divergence constructions can feed it any sum.
        """
        if self.kind == "multilinear":
            return (0.0, 1.0)
        if self.kind == "pos_fractional":
            return (0.0, 3.0)
        if self.kind == "neg_fractional":
            return (-3.0, 0.0)
        return (-3.0, 3.0)

    def slope_bound(self) -> float:
        """Global bound on |d iota / d s| over the admissible region."""
        if self.kind == "linear" or self.kind == "sigmoid":
            return 1.0 / self.delta
        if self.kind == "euler":
            return 0.25
        if self.kind == "qmax":
            return _QMAX_SLOPE
        return 1.0

    def describe(self) -> str:
        return f"{self.kind}({self.delta:g})" if self.delta is not None else self.kind

    # -- evaluation --------------------------------------------------------

    def _check_weight(self, w: float) -> None:
        if not self.value_domain.contains(w):
            raise DomainViolation(f"weight {w} outside the {self.kind} value domain")
        if self.kind == "sigmoid" and abs(w) >= 1.0 - 1e-12:
            raise DomainViolation(f"weight {w} too close to +-1 for sigmoid")

    def _check_s(self, s: float) -> None:
        if not math.isfinite(s):
            raise RangeViolation(f"aggregate {s} is not finite")
        if self.kind == "pos_fractional" and s < 0.0:
            raise RangeViolation("pos_fractional rejects negative aggregates")
        if self.kind == "neg_fractional" and s > 0.0:
            raise RangeViolation("neg_fractional rejects positive aggregates")

    def evaluate(self, s: float, w: float) -> float:
        s, w = float(s), float(w)
        self._check_weight(w)
        self._check_s(s)
        kind = self.kind
        if kind == "multilinear":
            return w + (1.0 - w) * s
        if kind == "pos_fractional":
            return (w + s) / (1.0 + s)
        if kind == "neg_fractional":
            return w / (1.0 - s)
        if kind == "combined_fractional":
            return _combined_scalar(s, w)
        if kind == "euler":
            return _euler_scalar(s, w)
        if kind == "linear":
            return s / self.delta + w
        if kind == "qmax":
            return _qmax_scalar(s, w)
        return sigma(s / self.delta + sigma_inv(w))

    def evaluate_vec(self, s: np.ndarray, w: np.ndarray) -> np.ndarray:
        """Entrywise evaluation; inputs are assumed pre-checked."""
        kind = self.kind
        if kind == "multilinear":
            return w + (1.0 - w) * s
        if kind == "pos_fractional":
            if s.size and s.min() < 0.0:
                raise RangeViolation("pos_fractional rejects negative aggregates")
            return (w + s) / (1.0 + s)
        if kind == "neg_fractional":
            if s.size and s.max() > 0.0:
                raise RangeViolation("neg_fractional rejects positive aggregates")
            return w / (1.0 - s)
        if kind == "combined_fractional":
            return np.where(s < 0.0, w / (1.0 - s), (w + s) / (1.0 + s))
        if kind == "euler":
            es = np.exp(np.minimum(s, _EULER_CUTOFF))
            base = 1.0 - (1.0 - w * w) / (1.0 + w * es)
            return np.where(s > _EULER_CUTOFF, np.where(w > 0.0, 1.0, w * w), base)
        if kind == "linear":
            return s / self.delta + w
        if kind == "qmax":
            q = s * s / (1.0 + s * s)
            return np.where(s < 0.0, w - w * q, w + (1.0 - w) * q)
        return np.tanh(s / self.delta + np.arctanh(w))

    def derivative_sup(self, w_min: float, w_max: float) -> float:
        """Sound upper bound on sup_{s, w in [w_min, w_max]} d iota/d s."""
        if w_min > w_max:
            raise DomainViolation(f"empty weight interval [{w_min}, {w_max}]")
        kind = self.kind
        if kind in ("linear", "sigmoid"):
            return 1.0 / self.delta
        if kind == "euler":
            return (1.0 - w_min * w_min) / 4.0
        if kind == "qmax":
            return _QMAX_SLOPE
        if kind == "multilinear" or kind == "pos_fractional":
            # d/ds (w + (1-w)s) = 1-w;  d/ds (w+s)/(1+s) <= 1-w at s=0.
            return 1.0 - w_min
        if kind == "neg_fractional":
            # d/ds w/(1-s) = w/(1-s)^2 <= w over s <= 0.
            return min(w_max, 1.0)
        # combined_fractional: the two branch slopes at s=0 are w and 1-w.
        return min(max(w_max, 1.0 - w_min), 1.0)


def influence(inf: Influence, s: float, w: float) -> float:
    return inf.evaluate(s, w)


def derivative_sup(inf: Influence, w_min: float, w_max: float) -> float:
    return inf.derivative_sup(w_min, w_max)
