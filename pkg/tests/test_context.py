import threading

from rdmkit import (
    NodeLimit,
    CancelToken,
    current_node_limit,
    DEFAULT_NODE_LIMIT,
    self_join_free,
    timed,
    parse_query,
    solve_resilience,
    NodeLimitError,
    OracleCancelled,
    UnsupportedQueryError,
)

import pytest


def test_node_limit_default(monkeypatch):
    monkeypatch.delenv("RDM_NODE_LIMIT", raising=False)
    assert current_node_limit() == DEFAULT_NODE_LIMIT


def test_node_limit_env(monkeypatch):
    monkeypatch.setenv("RDM_NODE_LIMIT", "25")
    assert current_node_limit() == 25

    monkeypatch.setenv("RDM_NODE_LIMIT", " ")
    assert current_node_limit() == DEFAULT_NODE_LIMIT

    monkeypatch.setenv("RDM_NODE_LIMIT", "many")
    with pytest.raises(ValueError):
        current_node_limit()

    monkeypatch.setenv("RDM_NODE_LIMIT", "0")
    with pytest.raises(ValueError):
        current_node_limit()


def test_node_limit_env_solve(monkeypatch, ecycle):
    q, inst = ecycle
    monkeypatch.setenv("RDM_NODE_LIMIT", "1")
    with pytest.raises(NodeLimitError):
        solve_resilience(q, inst)
    # A context overrides the environment
    with NodeLimit(10):
        assert solve_resilience(q, inst).value == 2


def test_node_limit_nesting(monkeypatch):
    monkeypatch.delenv("RDM_NODE_LIMIT", raising=False)
    with NodeLimit(5) as outer:
        assert outer.limit == 5
        assert current_node_limit() == 5
        with NodeLimit(2):
            assert current_node_limit() == 2
        assert current_node_limit() == 5
    assert current_node_limit() == DEFAULT_NODE_LIMIT

    with pytest.raises(ValueError):
        NodeLimit(0)


def test_node_limit_per_thread(monkeypatch):
    monkeypatch.delenv("RDM_NODE_LIMIT", raising=False)
    seen = []
    with NodeLimit(3):
        worker = threading.Thread(target=lambda: seen.append(current_node_limit()))
        worker.start()
        worker.join()
    assert seen == [DEFAULT_NODE_LIMIT]


def test_cancel_token():
    token = CancelToken()
    assert not token.cancelled
    token.check()
    token.cancel()
    assert token.cancelled
    with pytest.raises(OracleCancelled):
        token.check()


def test_self_join_free():
    @self_join_free
    def count_atoms(q, offset=0):
        "Number of atoms."
        return len(q.atoms) + offset

    assert count_atoms.__name__ == "count_atoms"
    assert count_atoms.__doc__ == "Number of atoms."
    assert count_atoms(parse_query("q() :- R(x, y), S(y, z)."), offset=1) == 3
    assert count_atoms(q=parse_query("q() :- R(x).")) == 1

    with pytest.raises(UnsupportedQueryError) as error:
        count_atoms(parse_query("q() :- E(x, y), E(y, z)."))
    assert "count_atoms" in str(error.value)


def test_timed():
    @timed
    def double(x):
        return 2 * x

    result, ms = double(4)
    assert result == 8
    assert ms >= 0
    assert double.__name__ == "double"
