"""Exact polynomial arithmetic, Groebner bases, and rational linear algebra."""

from .poly import (
    Monomial,
    Polynomial,
    VarSet,
    mono_degree,
    mono_div,
    mono_divides,
    mono_gcd,
    mono_lcm,
    mono_mul,
    parse_polynomial,
)
from .orders import (
    BlockOrder,
    DegRevLex,
    Lex,
    MonomialOrder,
    block_elimination,
    degrevlex,
    degrevlex_compare,
    lex,
)
from .groebner import (
    Budget,
    BudgetExceeded,
    DEFAULT_BUDGET,
    GroebnerBasis,
    buchberger,
    eliminate,
    is_binomial_basis,
    normal_form,
    s_polynomial,
)
from .linalg import IncrementalSpan, in_span, null_space, rank, rref, solve

__all__ = [
    "Monomial",
    "Polynomial",
    "VarSet",
    "parse_polynomial",
    "mono_degree",
    "mono_div",
    "mono_divides",
    "mono_gcd",
    "mono_lcm",
    "mono_mul",
    "MonomialOrder",
    "DegRevLex",
    "Lex",
    "BlockOrder",
    "degrevlex",
    "lex",
    "block_elimination",
    "degrevlex_compare",
    "Budget",
    "BudgetExceeded",
    "DEFAULT_BUDGET",
    "GroebnerBasis",
    "buchberger",
    "eliminate",
    "is_binomial_basis",
    "normal_form",
    "s_polynomial",
    "IncrementalSpan",
    "in_span",
    "null_space",
    "rank",
    "rref",
    "solve",
]
