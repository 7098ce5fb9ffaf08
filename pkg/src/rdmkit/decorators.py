import functools
import inspect
import time

from .errors import UnsupportedQueryError

__all__ = ("self_join_free", "timed")


def _query_argument(method):
    sig = inspect.signature(method)
    return next(iter(sig.parameters))


def self_join_free(method):
    """
    Decorator for operations only defined on self-join free queries.

    The first argument of the decorated function must be the ``Query``. A
    query that repeats a relation raises ``UnsupportedQueryError`` naming the
    operation, before the function body runs.

    Examples
    --------
    Standard usage of the decorator::

        @self_join_free
        def is_hierarchical(q):
            ...

        is_hierarchical(parse_query("q() :- E(x,y), E(y,z)."))
        # UnsupportedQueryError: is_hierarchical requires a self-join free query ...
    """
    argument = _query_argument(method)

    @functools.wraps(method)
    def wrapped(*args, **kwargs):
        q = args[0] if args else kwargs[argument]
        repeated = q.repeated_relations()
        if repeated:
            raise UnsupportedQueryError(
                f"{method.__name__} requires a self-join free query; "
                f"relation(s) {', '.join(repeated)} occur in several atoms"
            )
        return method(*args, **kwargs)

    return wrapped


def timed(method):
    """
    Decorator returning ``(result, milliseconds)`` instead of ``result``.
    Used by the command line to fill report timings.
    """

    @functools.wraps(method)
    def wrapped(*args, **kwargs):
        start = time.perf_counter()
        result = method(*args, **kwargs)
        return result, (time.perf_counter() - start) * 1000.0

    return wrapped
