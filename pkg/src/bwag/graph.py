"""Weighted attack/support argumentation graphs in incidence-matrix form.

A graph holds n pairwise-distinct argument labels, a square incidence
matrix g over {-1, 0, 1} (g[i][j] = -1: argument j attacks argument i,
+1: j supports i), a vector of initial weights, and the value domain the
weights live in.  Everything here is immutable and pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DomainViolation, InvalidGraph, LengthMismatch, UnknownName


@dataclass(frozen=True)
class ValueDomain:
    """A connected real interval containing the neutral degree 0.

    An absent endpoint means the interval is unbounded on that side.
    min_s/max_s are defined only when the respective endpoint is closed.
    """

    lo: float | None = None
    hi: float | None = None
    lo_open: bool = False
    hi_open: bool = False

    def __post_init__(self):
        if self.lo is not None and self.hi is not None and not self.lo < self.hi:
            raise DomainViolation(f"empty interval: lo={self.lo} hi={self.hi}")
        if not self.contains(0.0):
            raise DomainViolation("value domain must contain the neutral degree 0")

    def contains(self, x: float) -> bool:
        if not math.isfinite(x):
            return False
        if self.lo is not None and (x < self.lo or (self.lo_open and x == self.lo)):
            return False
        if self.hi is not None and (x > self.hi or (self.hi_open and x == self.hi)):
            return False
        return True

    def min_s(self) -> float | None:
        return self.lo if (self.lo is not None and not self.lo_open) else None

    def max_s(self) -> float | None:
        return self.hi if (self.hi is not None and not self.hi_open) else None

    def precedes(self, v: float, w: float) -> bool:
        """Strict order relaxed at closed endpoints: v < w, or both sit at
        the minimum, or both sit at the maximum."""
        if v < w:
            return True
        if v == w:
            m = self.min_s()
            if m is not None and v == m:
                return True
            m = self.max_s()
            if m is not None and v == m:
                return True
        return False

    @staticmethod
    def reals() -> "ValueDomain":
        return ValueDomain(None, None)

    @staticmethod
    def unit() -> "ValueDomain":
        return ValueDomain(0.0, 1.0)

    @staticmethod
    def unit_half_open() -> "ValueDomain":
        return ValueDomain(0.0, 1.0, hi_open=True)

    @staticmethod
    def signed_unit() -> "ValueDomain":
        return ValueDomain(-1.0, 1.0)

    @staticmethod
    def open_signed_unit() -> "ValueDomain":
        return ValueDomain(-1.0, 1.0, lo_open=True, hi_open=True)


@dataclass(frozen=True)
class Permutation:
    """A bijection on {0, ..., n-1}; mapping[i] is the new position of i."""

    mapping: tuple[int, ...]

    def __post_init__(self):
        n = len(self.mapping)
        if sorted(self.mapping) != list(range(n)):
            raise InvalidGraph(f"not a bijection on 0..{n - 1}: {self.mapping}")

    def __len__(self) -> int:
        return len(self.mapping)

    def __call__(self, i: int) -> int:
        return self.mapping[i]

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.mapping)
        for i, j in enumerate(self.mapping):
            inv[j] = i
        return Permutation(tuple(inv))

    def compose(self, other: "Permutation") -> "Permutation":
        """self after other: (self.compose(other))(i) = self(other(i))."""
        return Permutation(tuple(self.mapping[j] for j in other.mapping))

    @staticmethod
    def identity(n: int) -> "Permutation":
        return Permutation(tuple(range(n)))

    @staticmethod
    def swap(n: int, i: int, j: int) -> "Permutation":
        m = list(range(n))
        m[i], m[j] = m[j], m[i]
        return Permutation(tuple(m))


def _as_matrix(g) -> np.ndarray:
    m = np.asarray(g, dtype=np.int64)
    if m.ndim == 0:
        m = m.reshape(0, 0)
    return m


@dataclass(frozen=True)
class Wasa:
    """A weighted attack/support argumentation graph."""

    labels: tuple[str, ...]
    g: np.ndarray = field(compare=False)
    w: np.ndarray = field(compare=False)
    domain: ValueDomain = field(default_factory=ValueDomain.reals)

    def __post_init__(self):
        object.__setattr__(self, "g", _as_matrix(self.g))
        object.__setattr__(self, "w", np.asarray(self.w, dtype=float))
        self.g.setflags(write=False)
        self.w.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.labels)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Wasa):
            return NotImplemented
        return (
            self.labels == other.labels
            and self.domain == other.domain
            and self.g.shape == other.g.shape
            and bool(np.array_equal(self.g, other.g))
            and bool(np.array_equal(self.w, other.w))
        )

    def parents_row(self, i: int) -> np.ndarray:
        return self.g[i]


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def validate(wasa: Wasa) -> ValidationReport:
    """Check every structural invariant and report all violations."""
    bad: list[str] = []
    n = wasa.n
    if n == 0:
        bad.append("graph must have at least one argument")
    if wasa.g.shape != (n, n):
        bad.append(f"incidence matrix shape {wasa.g.shape} is not ({n}, {n})")
    else:
        rows, cols = np.where((wasa.g != -1) & (wasa.g != 0) & (wasa.g != 1))
        for i, j in zip(rows.tolist(), cols.tolist()):
            bad.append(f"entry outside {{-1,0,1}} at ({i},{j})")
    if wasa.w.shape != (n,):
        bad.append(f"weight vector length {wasa.w.shape} is not {n}")
    else:
        for i, wi in enumerate(wasa.w.tolist()):
            if not wasa.domain.contains(wi):
                bad.append(f"weight {wi} at index {i} outside the value domain")
    if len(set(wasa.labels)) != len(wasa.labels):
        seen, dups = set(), set()
        for lab in wasa.labels:
            (dups if lab in seen else seen).add(lab)
        for lab in sorted(dups):
            bad.append(f"duplicate label {lab!r}")
    return ValidationReport(tuple(bad))


def require_valid(wasa: Wasa) -> None:
    report = validate(wasa)
    if not report.ok:
        raise InvalidGraph("; ".join(report.violations))


def indegree(wasa: Wasa) -> int:
    """Maximum number of parents of any argument (max row-sum norm of |g|)."""
    if wasa.n == 0:
        return 0
    return int(np.abs(wasa.g).sum(axis=1).max())


def is_acyclic(wasa: Wasa) -> bool:
    """True when the parent relation has no directed cycle."""
    n = wasa.n
    # Kahn's algorithm over edges parent -> child (g[i][j] != 0: j -> i).
    parents = [np.nonzero(wasa.g[i])[0].tolist() for i in range(n)]
    remaining = [len(p) for p in parents]
    children: list[list[int]] = [[] for _ in range(n)]
    for i in range(n):
        for j in parents[i]:
            children[j].append(i)
    queue = [i for i in range(n) if remaining[i] == 0]
    seen = 0
    while queue:
        j = queue.pop()
        seen += 1
        for i in children[j]:
            remaining[i] -= 1
            if remaining[i] == 0:
                queue.append(i)
    return seen == n


def longest_path_length(wasa: Wasa) -> int:
    """Length (in edges) of the longest path into any node; acyclic graphs only."""
    if not is_acyclic(wasa):
        raise InvalidGraph("longest path is defined for acyclic graphs only")
    n = wasa.n
    depth = [-1] * n

    def rec(i: int) -> int:
        if depth[i] >= 0:
            return depth[i]
        d = 0
        for j in np.nonzero(wasa.g[i])[0].tolist():
            d = max(d, rec(j) + 1)
        depth[i] = d
        return d

    return max((rec(i) for i in range(n)), default=0)


def apply_isomorphism(wasa: Wasa, p: Permutation) -> Wasa:
    """Relabel/reorder arguments: returns <PGP^-1, Pw> with permuted labels."""
    if len(p) != wasa.n:
        raise LengthMismatch(f"permutation size {len(p)} != {wasa.n} arguments")
    n = wasa.n
    g2 = np.zeros_like(wasa.g)
    w2 = np.zeros_like(wasa.w)
    labels2 = [""] * n
    for i in range(n):
        w2[p(i)] = wasa.w[i]
        labels2[p(i)] = wasa.labels[i]
        for j in range(n):
            g2[p(i), p(j)] = wasa.g[i, j]
    return Wasa(tuple(labels2), g2, w2, wasa.domain)


def disjoint_union(a: Wasa, b: Wasa) -> Wasa:
    """Block-diagonal union; right-operand labels get a '#2' suffix on clash."""
    if a.domain != b.domain:
        raise DomainViolation("disjoint union requires identical value domains")
    taken = set(a.labels)
    right = []
    for lab in b.labels:
        while lab in taken:
            lab = lab + "#2"
        taken.add(lab)
        right.append(lab)
    right = tuple(right)
    na, nb = a.n, b.n
    g = np.zeros((na + nb, na + nb), dtype=np.int64)
    g[:na, :na] = a.g
    g[na:, na:] = b.g
    w = np.concatenate([a.w, b.w])
    return Wasa(a.labels + right, g, w, a.domain)


# ---------------------------------------------------------------------------
# Builtin graphs
# ---------------------------------------------------------------------------

def _ex1() -> Wasa:
    g = [
        [0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0],
        [-1, 0, 0, 0, 0, 0],
        [0, -1, 0, 0, 0, 0],
        [0, 0, 0, 1, 0, -1],
        [0, 0, 0, 0, -1, 1],
    ]
    w = [0.0, 1.0, 0.4, 0.0, 0.5, 1.0]
    labels = tuple(f"a_{i}" for i in range(1, 7))
    return Wasa(labels, g, w, ValueDomain.signed_unit())


def _ex2() -> Wasa:
    g = [
        [0, 0, 0, 0],
        [1, 1, 1, 0],
        [-1, -1, 0, -1],
        [0, -1, 0, 0],
    ]
    w = [0.8, 0.7, 0.001, 0.7]
    labels = tuple(f"a_{i}" for i in range(1, 5))
    # The comparison graph is evaluated under semantics with different value
    # domains, so it is stored over R and restricted at evaluation time.
    return Wasa(labels, g, w, ValueDomain.reals())


def _exp_counter() -> Wasa:
    # Support chain a1 -> a2 -> a3 plus a4 -> a5; the two sinks a3 and a5
    # have equal weight and equally strong parents yet different series
    # degrees, which is the stored locality counterexample.
    g = np.zeros((5, 5), dtype=np.int64)
    g[1, 0] = 1
    g[2, 1] = 1
    g[4, 3] = 1
    w = [1.0, 1.0, 1.0, 2.0, 1.0]
    labels = tuple(f"a_{i}" for i in range(1, 6))
    return Wasa(labels, g, w, ValueDomain.reals())


_BUILTINS = {
    "ex1": _ex1,
    "ex2": _ex2,
    "exp-counter": _exp_counter,
}


def builtin(name: str) -> Wasa:
    """Return one of the named example graphs (ex1, ex2, exp-counter)."""
    try:
        factory = _BUILTINS[name]
    except KeyError:
        raise UnknownName(f"unknown builtin graph {name!r}; "
                          f"known: {', '.join(sorted(_BUILTINS))}") from None
    return factory()


def with_domain(wasa: Wasa, domain: ValueDomain) -> Wasa:
    """Copy of the graph with another value domain (weights re-checked lazily)."""
    return replace(wasa, domain=domain)
