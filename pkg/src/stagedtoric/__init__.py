"""Toric structure analysis for staged tree models.

Decide and certify, over exact rationals, whether the prime ideal of a
staged tree model becomes binomial after a linear change of variables:
balance tests and quadratic Groebner bases, subtree-inclusion changes of
variables, balanced-prefix hybrids, one-stage Veronese spans, randomized
stage-matrix searches, and an elimination-based kernel oracle.
"""

from .trees import LinearForm, Stage, StagedTree, TreeError
from .treedsl import ParseError, parse_tree, serialize_tree, to_dot
from .treeops import ResizeError, SwapError, resize, swap
from .balance import (
    colour_normal_form,
    degree_one_pairs,
    is_balanced,
    koszul_sufficient,
    quadratic_gb,
    quadratic_gb_reduced,
)
from .kernel import (
    OracleBudget,
    graded_kernel_piece,
    ideal_equal,
    kernel_ideal,
    minimal_generator_degrees,
)
from .minors import (
    ToricCertificate,
    ideal_of_minors,
    model_invariants,
    monomial_representative,
    random_search,
    row_col_transform,
    stage_matrix,
    verify_certificate,
)
from .sip import detect_sip, hybrid_certificate, hybrid_search, sip_change_of_variables, stratify
from .onestage import (
    algebra_equality,
    balanced_onestage,
    binary_onestage_certificate,
    classify_onestage,
    degree_d_span,
    enumerate_onestage,
    is_full_veronese,
    linear_relations,
)

__version__ = "0.1.0"

__all__ = [
    "LinearForm", "Stage", "StagedTree", "TreeError",
    "ParseError", "parse_tree", "serialize_tree", "to_dot",
    "ResizeError", "SwapError", "resize", "swap",
    "colour_normal_form", "degree_one_pairs", "is_balanced",
    "koszul_sufficient", "quadratic_gb", "quadratic_gb_reduced",
    "OracleBudget", "graded_kernel_piece", "ideal_equal", "kernel_ideal",
    "minimal_generator_degrees",
    "ToricCertificate", "ideal_of_minors", "model_invariants",
    "monomial_representative", "random_search", "row_col_transform",
    "stage_matrix", "verify_certificate",
    "detect_sip", "hybrid_certificate", "hybrid_search",
    "sip_change_of_variables", "stratify",
    "algebra_equality", "balanced_onestage", "binary_onestage_certificate",
    "classify_onestage", "degree_d_span", "enumerate_onestage",
    "is_full_veronese", "linear_relations",
    "__version__",
]
