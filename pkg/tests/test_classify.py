from rdmkit import (
    parse_query,
    is_hierarchical,
    is_linear,
    dominated_atoms,
    has_triad,
    predict_complexity,
    classification_to_dict,
    PROBLEMS,
    UnsupportedQueryError,
)
from rdmkit.fixtures import load

import pytest

QA = "q() :- Oscar(a), ActsIn(a, m), DirectedBy(m, d), Spouse(a, d)."


def complexities(c):
    return {problem: p.complexity for problem, p in c.predictions.items()}


@pytest.mark.parametrize(
    "text, hierarchical, linear",
    [
        ("q() :- R(x, y), S(y, z).", True, True),
        ("q() :- R(x, y), S(x, z).", True, True),
        ("q() :- R(x, y), S(y, z), T(z, w).", False, True),
        ("q() :- R(x, y), S(y, z), T(z, x).", False, False),
        (QA, False, False),
        ("q() :- R(x), S(x, y), T(y).", False, True),
    ],
)
def test_structure(text, hierarchical, linear):
    q = parse_query(text)
    assert is_hierarchical(q) is hierarchical
    assert is_linear(q) is linear


def test_dominated_atoms():
    assert dominated_atoms(parse_query(QA)) == (1, 3)
    assert dominated_atoms(parse_query("q() :- R(x, y), S(y, z).")) == ()
    # Equal variable sets do not dominate
    assert dominated_atoms(parse_query("q() :- R(x, 'a'), S(x).")) == ()
    # Atoms without variables never dominate
    assert dominated_atoms(parse_query("q() :- R('a'), S(x).")) == ()


def test_has_triad():
    assert has_triad(parse_query("q() :- R(x, y), S(y, z), T(z, x).")) == (0, 1, 2)
    assert has_triad(parse_query(QA)) is None
    assert has_triad(parse_query("q() :- R(x, y), S(y, z), T(z, w).")) is None
    assert has_triad(parse_query("exogenous: T.\nq() :- R(x, y), S(y, z), T(z, x).")) is None


def test_self_join_structure():
    q = parse_query("q() :- E(x, y), E(y, z).")
    for operation in (is_hierarchical, is_linear, dominated_atoms, has_triad):
        with pytest.raises(UnsupportedQueryError):
            operation(q)


def test_predict_chain():
    q, _ = load("chain2")
    c = predict_complexity(q)
    assert c.self_join_free
    assert c.canonical_plan_count == 1
    assert complexities(c) == {problem: "PTIME" for problem in PROBLEMS}
    assert c.predictions["RES/bag"].reason == "linear query: bag resilience is easy"
    assert c.predictions["FACT"].reason == "1 plan(s) after pruning (2-MQP, heuristic count)"
    assert c.notes == ()
    assert c.target_notes == {"R": "PTIME at query level", "S": "PTIME at query level"}


def test_predict_triangle():
    q, _ = load("q_triangle")
    c = predict_complexity(q)
    assert c.triad == (0, 1, 2)
    assert c.canonical_plan_count == 3
    assert complexities(c) == {
        "RES/set": "NPC",
        "RES/bag": "NPC",
        "RSP/set": "OPEN",
        "RSP/bag": "NPC",
        "FACT": "OPEN",
    }
    assert c.predictions["RES/set"].reason == "triad (ActsIn, DirectedBy, Spouse)"
    assert c.target_notes["Spouse"] == "query-level class OPEN"


def test_predict_mcdormand():
    q, _ = load("qa_triangle")
    c = predict_complexity(q)
    assert not c.hierarchical
    assert not c.linear
    assert c.dominated_atoms == (1, 3)
    assert c.triad is None
    assert complexities(c) == {
        "RES/set": "PTIME",
        "RES/bag": "NPC",
        "RSP/set": "OPEN",
        "RSP/bag": "NPC",
        "FACT": "OPEN",
    }
    assert c.target_notes["Oscar"].startswith("atom dominates another atom")
    assert c.target_notes["ActsIn"] == "query-level class OPEN"


def test_predict_notes():
    c = predict_complexity(parse_query("exogenous: Oscar.\n" + QA))
    assert c.notes == (
        "ActsIn is dominated by exogenous atom(s) Oscar (exogenous atoms counted as dominators)",
        "Spouse is dominated by exogenous atom(s) Oscar (exogenous atoms counted as dominators)",
    )
    assert "Oscar" not in c.target_notes

    c = predict_complexity(parse_query("q() :- R(x, 'a'), S(x)."))
    assert c.notes == ("constants are treated as selections; only variables enter the criteria",)


def test_predict_self_join():
    q, _ = load("epath")
    c = predict_complexity(q)
    assert not c.self_join_free
    assert c.hierarchical is None and c.linear is None
    assert c.canonical_plan_count == "unknown"
    assert set(complexities(c).values()) == {"OPEN"}
    assert c.notes == ("self-join on E: complexity of queries with self-joins is open",)


def test_plan_count_limit():
    q = parse_query("q() :- R(a, b, c, d, e, f, g, h).")
    c = predict_complexity(q)
    assert c.canonical_plan_count == "unknown"
    assert c.predictions["FACT"].complexity == "OPEN"


def test_classification_to_dict():
    q, _ = load("q_triangle")
    data = classification_to_dict(predict_complexity(q))
    assert data["query"] == "q() :- ActsIn(a, m), DirectedBy(m, d), Spouse(a, d)."
    assert data["triad"] == [0, 1, 2]
    assert data["dominated_atoms"] == []
    assert data["predictions"]["RES/set"]["complexity"] == "NPC"
    assert list(data["predictions"]) == list(PROBLEMS)
