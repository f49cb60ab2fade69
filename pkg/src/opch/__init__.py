"""Exact computations with derivation-decorated nonassociative terms and the operations a > b = d(a)b, a < b = a d(b)."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .terms import (  # noqa: F401
    Expr,
    Generator,
    Node,
    derive,
    enumerate_multilinear,
    format_term,
    parse_monomial,
    parse_term,
    weight,
)
from .linalg import SpanBasis, echelonize, solve_preimage  # noqa: F401
from .varieties import (  # noqa: F401
    Component,
    VarietySpec,
    bicom_normal_form,
    catalog,
    component,
    consequences,
    dim_variety,
    quotient_normal_form,
)
from .derived import check_di_identities, check_weight_criterion, dim_dervar, tau  # noqa: F401
from .express import (  # noqa: F401
    OperatorWord,
    distribute_derivations_alt,
    express_alt,
    express_assos,
    express_bicom,
    express_solver,
    operator_form_alt,
    refocus_alt,
)
