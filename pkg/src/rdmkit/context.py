import os
import threading

from .errors import OracleCancelled

__all__ = ("NodeLimit", "CancelToken", "current_node_limit", "DEFAULT_NODE_LIMIT")

DEFAULT_NODE_LIMIT = 1_000_000
NODE_LIMIT_ENV = "RDM_NODE_LIMIT"

_state = threading.local()


def current_node_limit() -> int:
    """
    Return the branch-and-bound node cap in effect for the calling thread.

    An enclosing ``NodeLimit`` context wins, then the ``RDM_NODE_LIMIT``
    environment variable, then ``DEFAULT_NODE_LIMIT``.
    """
    stack = getattr(_state, "node_limits", None)
    if stack:
        return stack[-1]
    value = os.environ.get(NODE_LIMIT_ENV)
    if value is None or value.strip() == "":
        return DEFAULT_NODE_LIMIT
    try:
        limit = int(value)
    except ValueError:
        raise ValueError(f"{NODE_LIMIT_ENV} must be an integer, got {value!r}")
    if limit < 1:
        raise ValueError(f"{NODE_LIMIT_ENV} must be positive, got {limit}")
    return limit


class NodeLimit:
    """
    Context manager to override the branch-and-bound node cap. Only inside a
    NodeLimit will solves use the new cap; contexts nest and are per thread.
    """

    def __init__(self, limit: int):
        if limit < 1:
            raise ValueError(f"Node limit must be positive, got {limit}")
        self.limit = limit

    def __enter__(self):
        if not hasattr(_state, "node_limits"):
            _state.node_limits = []
        _state.node_limits.append(self.limit)
        return self

    def __exit__(self, exc_type, exc_value, traceback):
        _state.node_limits.pop()


class CancelToken:
    """
    Cooperative cancellation flag for long oracle searches. The caller keeps
    the token and calls ``cancel``; the search calls ``check`` between
    candidates and stops with ``OracleCancelled``.
    """

    def __init__(self):
        self._event = threading.Event()

    def cancel(self):
        self._event.set()

    @property
    def cancelled(self) -> bool:
        return self._event.is_set()

    def check(self):
        if self._event.is_set():
            raise OracleCancelled("Oracle search cancelled by caller")
