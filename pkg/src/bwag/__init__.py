"""Acceptability semantics for bipolar weighted argumentation graphs."""

from .aggregators import Aggregator, sigma, sigma_inv
from .engine import (
    BIPOLAR_SEMANTICS,
    BudgetExhausted,
    COMPARISON_SEMANTICS,
    Converged,
    GuaranteeReport,
    IterationConfig,
    Oscillating,
    Semantics,
    build_divergence_witness,
    divergence_params,
    guarantee,
    iterate,
    matrix_exponential_degrees,
    registry,
    solve_direct,
    solve_sigmoid_direct,
)
from .graph import (
    Permutation,
    ValueDomain,
    Wasa,
    apply_isomorphism,
    builtin,
    disjoint_union,
    indegree,
    validate,
)
from .influences import Influence
from .io import dump, load, parse, serialize

__all__ = [
    "Aggregator",
    "BIPOLAR_SEMANTICS",
    "BudgetExhausted",
    "COMPARISON_SEMANTICS",
    "Converged",
    "GuaranteeReport",
    "Influence",
    "IterationConfig",
    "Oscillating",
    "Permutation",
    "Semantics",
    "ValueDomain",
    "Wasa",
    "apply_isomorphism",
    "build_divergence_witness",
    "builtin",
    "disjoint_union",
    "divergence_params",
    "dump",
    "guarantee",
    "indegree",
    "iterate",
    "load",
    "matrix_exponential_degrees",
    "parse",
    "registry",
    "serialize",
    "sigma",
    "sigma_inv",
    "solve_direct",
    "solve_sigmoid_direct",
    "validate",
]

__version__ = "0.1.0"
