from fractions import Fraction

from rdmkit import (
    Instance,
    TupleRef,
    CancelToken,
    OracleBudget,
    parse_query,
    brute_resilience,
    brute_responsibility,
    brute_minfac,
    brute_minfac_check,
    solve_resilience,
    solve_responsibility,
    solve_minfac,
    BudgetExceededError,
    ExogenousTargetError,
    OracleCancelled,
    OracleError,
    UnsupportedQueryError,
)

import pytest


def test_brute_resilience(mcdormand, mcdormand_bag, ecycle):
    q, inst = mcdormand
    assert brute_resilience(q, inst) == 1
    assert isinstance(brute_resilience(q, inst), Fraction)

    q, inst = mcdormand_bag
    assert brute_resilience(q, inst) == 1
    assert brute_resilience(q, inst, "set") == 1

    q, inst = ecycle
    assert brute_resilience(q, inst) == 2
    assert brute_resilience(q, inst) == solve_resilience(q, inst).value


def test_brute_resilience_weights():
    q = parse_query("q() :- R(x), S(x).")
    inst = Instance(
        {"R": (TupleRef("R", 1, ("a",), 3),), "S": (TupleRef("S", 1, ("a",), 2),)},
        {"R": 1, "S": 1},
        "bag",
    )
    assert brute_resilience(q, inst) == 2
    assert brute_resilience(q, inst, "set") == 1
    assert solve_resilience(q, inst).value == 2


def test_brute_resilience_without_witnesses():
    q = parse_query("q() :- R(x), S(x).")
    inst = Instance(
        {"R": (TupleRef("R", 1, ("a",)),), "S": (TupleRef("S", 1, ("b",)),)}, {"R": 1, "S": 1}
    )
    assert brute_resilience(q, inst) == 0


def test_brute_responsibility(mcdormand, ecycle):
    q, inst = mcdormand
    assert brute_responsibility(q, inst, "Oscar:1") == 0
    assert brute_responsibility(q, inst, "ActsIn:1") == 1
    assert brute_responsibility(q, inst, inst.get("DirectedBy:2")) == 1

    q, inst = ecycle
    assert brute_responsibility(q, inst, "E:1") == 1
    assert solve_responsibility(q, inst, "E:1").cost == 1


def test_brute_responsibility_without_contingency(mcdormand):
    q = parse_query("q() :- E(x, y), E(y, z).")
    inst = Instance({"E": (TupleRef("E", 1, ("1", "1")), TupleRef("E", 2, ("1", "2")))}, {"E": 2})
    assert brute_responsibility(q, inst, "E:2") is None

    q, inst = mcdormand
    relations = dict(inst.relations)
    relations["Oscar"] += (TupleRef("Oscar", 2, ("Nobody",)),)
    inst = Instance(relations, inst.arities)
    assert brute_responsibility(q, inst, "Oscar:2") is None


def test_brute_responsibility_exogenous(mcdormand):
    _, inst = mcdormand
    q = parse_query(
        "exogenous: Oscar.\nq() :- Oscar(a), ActsIn(a, m), DirectedBy(m, d), Spouse(a, d)."
    )
    with pytest.raises(ExogenousTargetError):
        brute_responsibility(q, inst, "Oscar:1")
    assert brute_responsibility(q, inst, "Spouse:1") == 0


def test_brute_minfac(mcdormand):
    q, inst = mcdormand
    assert brute_minfac(q, inst) == 6
    assert brute_minfac(q, inst) == solve_minfac(q, inst).length
    assert brute_minfac_check(q, inst, 6)
    assert not brute_minfac_check(q, inst, 7)


def test_brute_minfac_self_join(ecycle):
    q, inst = ecycle
    with pytest.raises(UnsupportedQueryError):
        brute_minfac(q, inst)


def test_budget(mcdormand):
    q, inst = mcdormand
    with pytest.raises(BudgetExceededError) as error:
        brute_resilience(q, inst, budget=OracleBudget(max_endogenous_tuples=3))
    assert error.value.size == 6
    assert error.value.limit == 3

    with pytest.raises(BudgetExceededError):
        brute_responsibility(q, inst, "Oscar:1", budget=OracleBudget(max_witnesses=1))

    with pytest.raises(BudgetExceededError):
        brute_minfac(q, inst, budget=OracleBudget(max_assignments=1))

    with pytest.raises(OracleError):
        OracleBudget(max_witnesses=0)


def test_cancel(mcdormand):
    q, inst = mcdormand
    token = CancelToken()
    assert brute_resilience(q, inst, cancel=token) == 1
    token.cancel()
    assert token.cancelled
    with pytest.raises(OracleCancelled):
        brute_resilience(q, inst, cancel=token)
    with pytest.raises(OracleCancelled):
        brute_responsibility(q, inst, "ActsIn:1", cancel=token)
    with pytest.raises(OracleCancelled):
        brute_minfac(q, inst, cancel=token)
