from textwrap import dedent


class RDMException(Exception):
    """Base class for all exceptions in ``rdmkit``."""


class NodeConfigurationError(RDMException):
    """Class for tree node configuration exceptions in ``rdmkit``."""


class QueryError(RDMException):
    """Class for conjunctive query exceptions in ``rdmkit``."""


class QuerySyntaxError(QueryError):
    """Class for syntax errors raised while parsing a ``.dl`` query file."""

    def __init__(self, message, line, column, text=""):
        self.line = line
        self.column = column
        source = text.splitlines()[line - 1] if 0 < line <= len(text.splitlines()) else ""
        pointer = " " * max(column - 1, 0) + "^"
        super().__init__(
            dedent(
                f"""
                Syntax error at line {line}, column {column}: {message}
                    {source}
                    {pointer}"""
            )
        )


class QueryArityError(QueryError):
    """Class for relations used with inconsistent arities."""


class QueryHeadError(QueryError):
    """Class for queries whose head is not boolean."""


class ExogenousQueryError(QueryError):
    """Class for invalid exogenous declarations."""


class UnknownVariableError(QueryError):
    """Class for lookups of a variable the query does not use."""


class UnsupportedQueryError(QueryError):
    """Class for queries outside the supported fragment (e.g. self-joins)."""


class DataError(RDMException):
    """Class for database instance exceptions in ``rdmkit``."""


class MissingRelationError(DataError):
    """Class for relations missing from an instance or data directory."""


class MalformedDataError(DataError):
    """Class for CSV or JSON data that does not follow the instance schema."""


class UnknownTupleError(DataError):
    """Class for tuple ids that do not exist in an instance."""

    def __init__(self, ids):
        ids = sorted(ids)
        shown = ", ".join(ids[:10]) + (", ..." if len(ids) > 10 else "")
        super().__init__(f"Unknown tuple id(s): {shown}")


class ExogenousTargetError(DataError):
    """Class for responsibility targets that belong to an exogenous relation."""


class ModelError(RDMException):
    """Class for malformed linear models."""


class SolverError(RDMException):
    """Class for exceptions raised by the exact LP/MIP solver."""


class UnboundedModelError(SolverError):
    """Class for linear models with an unbounded objective."""


class NodeLimitError(SolverError):
    """Class for branch-and-bound searches that exceed the node limit."""

    def __init__(self, limit, nodes):
        self.limit = limit
        self.nodes = nodes
        super().__init__(
            dedent(
                f"""
                Branch-and-bound node limit exceeded ({nodes} nodes, limit {limit}).
                Raise the limit with RDM_NODE_LIMIT or rdmkit.NodeLimit."""
            )
        )


class SolverAuditError(SolverError):
    """Class for solutions that fail the exact feasibility audit."""


class UndefinedResilienceError(RDMException):
    """Class for instances where some witness has no endogenous tuple, so no
    deletion can make the query false."""

    def __init__(self, witness):
        self.witness = witness
        super().__init__(
            dedent(
                f"""
                Resilience is undefined (infinite): witness {witness} is supported
                only by exogenous tuples and can never be deleted."""
            )
        )


class FactorizationError(RDMException):
    """Class for provenance factorization exceptions."""


class ExpansionLimitError(FactorizationError):
    """Class for expressions whose expansion exceeds the product limit."""

    def __init__(self, limit):
        self.limit = limit
        super().__init__(f"Expansion exceeds {limit} products")


class OracleError(RDMException):
    """Class for brute-force oracle exceptions."""


class BudgetExceededError(OracleError):
    """Class for oracle inputs larger than the configured budget."""

    def __init__(self, what, size, limit):
        self.what = what
        self.size = size
        self.limit = limit
        super().__init__(f"Oracle budget exceeded: {size} {what} (limit {limit})")


class OracleCancelled(OracleError):
    """Class for oracle searches stopped through a ``CancelToken``."""
