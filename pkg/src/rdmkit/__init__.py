from ._version import version as VERSION  # noqa

from .base import Node
from .context import NodeLimit, CancelToken, current_node_limit, DEFAULT_NODE_LIMIT
from .decorators import self_join_free, timed
from .qlang import (
    Term,
    Atom,
    Query,
    parse_query,
    load_query,
    format_query,
    is_self_join_free,
    atoms_of_variable,
)
from .instance import (
    Semantics,
    TupleRef,
    Instance,
    load_instance,
    save_instance,
    random_instance,
    delete_tuples,
    instance_to_dict,
    instance_from_dict,
    dumps_instance,
)
from .witness import Witness, ProvenanceDNF, enumerate_witnesses, provenance_dnf, absorb
from .lpcore import (
    Variable,
    Constraint,
    LinearModel,
    LinearSolution,
    SolveStats,
    solve_lp,
    solve_mip,
    is_integral,
    to_lp_format,
    format_rational,
    rational_to_dict,
)
from .interventions import (
    ResilienceResult,
    ResponsibilityResult,
    tuple_variable,
    build_resilience_model,
    solve_resilience,
    build_responsibility_model,
    solve_responsibility,
    result_to_dict,
)
from .factorize import (
    PlanNode,
    QueryPlan,
    OccurrenceKey,
    FactorExpr,
    MinFacResult,
    enumerate_plans,
    prune_dominated_plans,
    occurrence_keys,
    build_minfac_model,
    solve_minfac,
    extract_expression,
    expand_and_compare,
    read_once_factorize,
    EXPANSION_LIMIT,
)
from .classify import (
    Prediction,
    QueryClassification,
    is_hierarchical,
    is_linear,
    dominated_atoms,
    has_triad,
    predict_complexity,
    classification_to_dict,
    PROBLEMS,
    MAX_PLAN_VARIABLES,
)
from .oracle import (
    OracleBudget,
    DEFAULT_BUDGET,
    brute_resilience,
    brute_responsibility,
    brute_minfac,
    brute_minfac_check,
)
from .tests import test
from .errors import (
    RDMException,
    NodeConfigurationError,
    QueryError,
    QuerySyntaxError,
    QueryArityError,
    QueryHeadError,
    ExogenousQueryError,
    UnknownVariableError,
    UnsupportedQueryError,
    DataError,
    MissingRelationError,
    MalformedDataError,
    UnknownTupleError,
    ExogenousTargetError,
    ModelError,
    SolverError,
    UnboundedModelError,
    NodeLimitError,
    SolverAuditError,
    UndefinedResilienceError,
    FactorizationError,
    ExpansionLimitError,
    OracleError,
    BudgetExceededError,
    OracleCancelled,
)
from .warnings import (
    RDMWarning,
    DuplicateRowWarning,
    MultiplicityIgnoredWarning,
    DegenerateTargetWarning,
)


__version__ = VERSION

__all__ = (
    "Node",
    "NodeLimit",
    "CancelToken",
    "current_node_limit",
    "DEFAULT_NODE_LIMIT",
    "self_join_free",
    "timed",
    "Term",
    "Atom",
    "Query",
    "parse_query",
    "load_query",
    "format_query",
    "is_self_join_free",
    "atoms_of_variable",
    "Semantics",
    "TupleRef",
    "Instance",
    "load_instance",
    "save_instance",
    "random_instance",
    "delete_tuples",
    "instance_to_dict",
    "instance_from_dict",
    "dumps_instance",
    "Witness",
    "ProvenanceDNF",
    "enumerate_witnesses",
    "provenance_dnf",
    "absorb",
    "Variable",
    "Constraint",
    "LinearModel",
    "LinearSolution",
    "SolveStats",
    "solve_lp",
    "solve_mip",
    "is_integral",
    "to_lp_format",
    "format_rational",
    "rational_to_dict",
    "ResilienceResult",
    "ResponsibilityResult",
    "tuple_variable",
    "build_resilience_model",
    "solve_resilience",
    "build_responsibility_model",
    "solve_responsibility",
    "result_to_dict",
    "PlanNode",
    "QueryPlan",
    "OccurrenceKey",
    "FactorExpr",
    "MinFacResult",
    "enumerate_plans",
    "prune_dominated_plans",
    "occurrence_keys",
    "build_minfac_model",
    "solve_minfac",
    "extract_expression",
    "expand_and_compare",
    "read_once_factorize",
    "EXPANSION_LIMIT",
    "Prediction",
    "QueryClassification",
    "is_hierarchical",
    "is_linear",
    "dominated_atoms",
    "has_triad",
    "predict_complexity",
    "classification_to_dict",
    "PROBLEMS",
    "MAX_PLAN_VARIABLES",
    "OracleBudget",
    "DEFAULT_BUDGET",
    "brute_resilience",
    "brute_responsibility",
    "brute_minfac",
    "brute_minfac_check",
    "test",
    "RDMException",
    "NodeConfigurationError",
    "QueryError",
    "QuerySyntaxError",
    "QueryArityError",
    "QueryHeadError",
    "ExogenousQueryError",
    "UnknownVariableError",
    "UnsupportedQueryError",
    "DataError",
    "MissingRelationError",
    "MalformedDataError",
    "UnknownTupleError",
    "ExogenousTargetError",
    "ModelError",
    "SolverError",
    "UnboundedModelError",
    "NodeLimitError",
    "SolverAuditError",
    "UndefinedResilienceError",
    "FactorizationError",
    "ExpansionLimitError",
    "OracleError",
    "BudgetExceededError",
    "OracleCancelled",
    "RDMWarning",
    "DuplicateRowWarning",
    "MultiplicityIgnoredWarning",
    "DegenerateTargetWarning",
)
