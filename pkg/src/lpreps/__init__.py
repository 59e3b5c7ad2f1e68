"""Query-oracle representations of continuous, Lp and Sobolev functions.

Functions are handed to algorithms as *names*: string functions answering
integral, point-value or step-function queries with a declared answer
length.  Every answer is checked against an exact piecewise-polynomial
model, and every query is logged so that running-time bounds can be
checked empirically.
"""

__version__ = "0.1.0"

from .corpus import CORPUS_KEYS, build_corpus
from .dyadic import Dyadic, decode_dyadic, encode_dyadic, format_literal, parse_literal
from .entropy import (
    CompactClass,
    NetRepresentation,
    aa_cover,
    aa_spanning,
    cauchy_rep_from_net,
    entropy_table,
    fk_spanning,
    greedy_code,
)
from .moduli import Modulus, search_modulus, validate_modulus
from .names import BudgetExceeded, InvariantViolation, Name, Trace, check_query_bound
from .operators import (
    cauchy_to_xp,
    differentiate,
    discontinuity_demo,
    evaluate,
    integrate,
    norm_xpd,
    sobolev_to_continuous,
    xp_to_cauchy,
)
from .representations import (
    make_cauchy_name,
    make_xc_name,
    make_xmp_name,
    make_xp_name,
    make_xpd_name,
    make_xr_name,
    make_xs_name,
    validate_name,
)
from .symbolic import FunctionSpec, load_function

__all__ = [
    "BudgetExceeded",
    "CORPUS_KEYS",
    "CompactClass",
    "Dyadic",
    "FunctionSpec",
    "InvariantViolation",
    "Modulus",
    "Name",
    "NetRepresentation",
    "Trace",
    "aa_cover",
    "aa_spanning",
    "build_corpus",
    "cauchy_rep_from_net",
    "cauchy_to_xp",
    "check_query_bound",
    "decode_dyadic",
    "differentiate",
    "discontinuity_demo",
    "encode_dyadic",
    "entropy_table",
    "evaluate",
    "fk_spanning",
    "format_literal",
    "greedy_code",
    "integrate",
    "load_function",
    "make_cauchy_name",
    "make_xc_name",
    "make_xmp_name",
    "make_xp_name",
    "make_xpd_name",
    "make_xr_name",
    "make_xs_name",
    "norm_xpd",
    "parse_literal",
    "search_modulus",
    "sobolev_to_continuous",
    "validate_modulus",
    "validate_name",
    "xp_to_cauchy",
]
