"""Causal-effect identification over acyclic directed mixed graphs.

Given a graph and a query p(Y | do(a)), the engine emits either a symbolic
estimand over the observed joint distribution or a hedge certificate of
non-identifiability, and can verify emitted estimands against an exact
discrete SCM oracle.
"""

from .errors import (
    CycleError,
    EvaluationError,
    ExpressionParseError,
    GraphError,
    NotFixableError,
    QueryError,
    UnknownVertexError,
)
from .estimand import (
    Const,
    Evaluator,
    Factor,
    Marginal,
    Product,
    Quotient,
    Slot,
    Sum,
    Var,
    evaluate,
    free_vars,
    from_json,
    render_latex,
    render_text,
    simplify,
    substitute,
    to_json,
    well_formed,
)
from .fixing import (
    FixingSequence,
    NotReachable,
    find_valid_sequence,
    fix,
    fix_all,
    is_fixable,
    is_intrinsic,
    is_reachable,
    reachable_closure,
)
from .graph import MixedGraph
from .identify import (
    CForest,
    FailureReport,
    HedgeWitness,
    Identified,
    NotIdentified,
    Query,
    decompose,
    failure_characterizations,
    find_hedge,
    hedge_violation,
    identify,
    identify_district,
    is_hedge,
)
from .oracle import (
    DiscreteScm,
    VerificationReport,
    interventional,
    observed_joint,
    random_scm,
    verify,
)
from .tables import ProbTable

__version__ = "0.1.0"

__all__ = [
    "CForest",
    "Const",
    "CycleError",
    "DiscreteScm",
    "EvaluationError",
    "Evaluator",
    "ExpressionParseError",
    "Factor",
    "FailureReport",
    "FixingSequence",
    "GraphError",
    "HedgeWitness",
    "Identified",
    "Marginal",
    "MixedGraph",
    "NotFixableError",
    "NotIdentified",
    "NotReachable",
    "ProbTable",
    "Product",
    "Query",
    "QueryError",
    "Quotient",
    "Slot",
    "Sum",
    "UnknownVertexError",
    "Var",
    "VerificationReport",
    "decompose",
    "evaluate",
    "failure_characterizations",
    "find_hedge",
    "find_valid_sequence",
    "fix",
    "fix_all",
    "free_vars",
    "from_json",
    "hedge_violation",
    "identify",
    "identify_district",
    "interventional",
    "is_fixable",
    "is_hedge",
    "is_intrinsic",
    "is_reachable",
    "observed_joint",
    "random_scm",
    "reachable_closure",
    "render_latex",
    "render_text",
    "simplify",
    "substitute",
    "to_json",
    "verify",
    "well_formed",
]
