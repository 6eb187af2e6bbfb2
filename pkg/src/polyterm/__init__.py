"""Polynomial interpretations, term encodings of polynomials and the
rewrite-system gadgets that reduce Diophantine questions to (linear)
polynomial termination."""

from .interp import (
    NAT,
    Domain,
    Interpretation,
    NotOriented,
    OrientationCert,
    Witness,
    always_terminating_interpretation,
    evaluate_term,
    extract_witness,
    is_monotone,
    minimal_h,
    orients,
    orients_all,
    qr_interpretation,
    theorem_lin_interpretation,
)
from .poly import NEG_INF, Polynomial, parse, sign_split
from .search import (
    SearchConfig,
    cross_check,
    hilbert_pipeline,
    linear_interp_search,
    witness_search,
)
from .trs import (
    FunSym,
    Rule,
    Trs,
    Var,
    build_qr_trs,
    build_single_rule_trs,
    encode_number,
    encode_poly,
    parse_json,
    serialize,
)

__all__ = [
    "NAT",
    "Domain",
    "Interpretation",
    "NotOriented",
    "OrientationCert",
    "Witness",
    "always_terminating_interpretation",
    "evaluate_term",
    "extract_witness",
    "is_monotone",
    "minimal_h",
    "orients",
    "orients_all",
    "qr_interpretation",
    "theorem_lin_interpretation",
    "NEG_INF",
    "Polynomial",
    "parse",
    "sign_split",
    "SearchConfig",
    "cross_check",
    "hilbert_pipeline",
    "linear_interp_search",
    "witness_search",
    "FunSym",
    "Rule",
    "Trs",
    "Var",
    "build_qr_trs",
    "build_single_rule_trs",
    "encode_number",
    "encode_poly",
    "parse_json",
    "serialize",
]

__version__ = "0.1.0"
