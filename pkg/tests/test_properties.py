"""
Seeded randomized checks of the solvers against the brute-force oracles.
Instance sizes keep the oracles within their default budgets.
"""

from dataclasses import replace

import numpy as np

from rdmkit import (
    Instance,
    Query,
    TupleRef,
    random_instance,
    delete_tuples,
    enumerate_witnesses,
    provenance_dnf,
    absorb,
    is_self_join_free,
    solve_lp,
    is_integral,
    build_resilience_model,
    solve_resilience,
    solve_responsibility,
    solve_minfac,
    enumerate_plans,
    expand_and_compare,
    read_once_factorize,
    predict_complexity,
    brute_resilience,
    brute_responsibility,
    brute_minfac,
)
from rdmkit.fixtures import QUERIES, load

import pytest

SEEDS = range(6)
ORACLE_SEEDS = range(200)

# query, tuples per relation, domain size; at most 12 endogenous tuples each
ORACLE_CASES = [
    ("chain2", 6, 3),
    ("q_triangle", 4, 3),
    ("qa_triangle", 3, 3),
    ("epath", 10, 4),
]


def instance(name, tuples, domain, seed, semantics="set"):
    q, _ = load(name)
    return q, random_instance(q, tuples, domain, seed, semantics)


def witness_terms(q, inst):
    return provenance_dnf(enumerate_witnesses(q, inst)).terms


def check_resilience(q, inst):
    result = solve_resilience(q, inst)
    assert result.value == brute_resilience(q, inst)
    assert result.lp_bound <= result.value
    assert sum(inst.weight(t) for t in result.deleted) == result.value
    assert not enumerate_witnesses(q, delete_tuples(inst, result.deleted))
    return result


def check_responsibility(q, inst, tid, terms):
    result = solve_responsibility(q, inst, tid)
    expected = brute_responsibility(q, inst, tid)
    if expected is None:
        assert result.status in ("no_witness", "infeasible")
        assert result.responsibility == 0
        return result
    assert result.status == "ok"
    assert result.cost == expected
    assert result.responsibility == 1 / (1 + expected)
    assert result.lp_bound <= result.cost

    # The target is counterfactual once the contingency is removed
    survivors = [term for term in terms if not term & result.contingency]
    assert survivors
    assert all(tid in term for term in survivors)
    assert result.preserved_witness.tuple_set in survivors
    return result


@pytest.mark.parametrize("semantics", ["set", "bag"])
@pytest.mark.parametrize("name, tuples, domain", ORACLE_CASES)
def test_resilience_matches_oracle(name, tuples, domain, semantics):
    for seed in ORACLE_SEEDS:
        q, inst = instance(name, tuples, domain, seed, semantics)
        result = check_resilience(q, inst)

        relaxed = solve_resilience(q, inst, mode="lp")
        assert relaxed.value == result.lp_bound, f"seed {seed}"
        assert solve_resilience(q, inst, mode="ilp").value == result.value, f"seed {seed}"


@pytest.mark.filterwarnings("ignore::rdmkit.warnings.DegenerateTargetWarning")
@pytest.mark.parametrize("semantics", ["set", "bag"])
@pytest.mark.parametrize("name, tuples, domain", ORACLE_CASES)
def test_responsibility_matches_oracle(name, tuples, domain, semantics):
    for seed in ORACLE_SEEDS:
        q, inst = instance(name, tuples, domain, seed, semantics)
        terms = witness_terms(q, inst)
        for t in inst.endogenous_tuples(q):
            check_responsibility(q, inst, t.id, terms)


@pytest.mark.parametrize("semantics", ["set", "bag"])
def test_linear_resilience_relaxation_is_exact(semantics):
    q, _ = load("chain2")
    for seed in range(500):
        inst = random_instance(q, 1 + seed % 10, 3 + seed % 2, seed, semantics)
        result = solve_resilience(q, inst)
        assert result.lp_bound == result.value, f"seed {seed}"
        assert solve_resilience(q, inst, mode="ilp").value == result.value


def test_triad_free_resilience_relaxation_is_exact():
    q, _ = load("qa_triangle")
    for seed in range(200):
        inst = random_instance(q, 2 + seed % 5, 3, seed)
        assert solve_resilience(q, inst, mode="lp").value == solve_resilience(
            q, inst, mode="ilp"
        ).value, f"seed {seed}"


@pytest.mark.filterwarnings("ignore::rdmkit.warnings.DegenerateTargetWarning")
def test_linear_responsibility_relaxation_is_exact():
    q, _ = load("chain2")
    for seed in range(100):
        inst = random_instance(q, 4 + seed % 4, 3, seed, "bag")
        for tid in sorted(set().union(*witness_terms(q, inst))):
            milp = solve_responsibility(q, inst, tid)
            ilp = solve_responsibility(q, inst, tid, mode="ilp")
            assert milp.status == ilp.status
            assert isinstance(milp.milp_integral, bool)
            if milp.status != "ok":
                continue
            # The relaxed tuple variables already reach the integral optimum
            assert milp.lp_bound == ilp.cost, f"seed {seed}, target {tid}"
            assert milp.cost == ilp.cost


@pytest.mark.parametrize(
    "name, tuples, domain", [("qa_triangle", 3, 2), ("q_triangle", 3, 2), ("chain2", 3, 3)]
)
@pytest.mark.parametrize("seed", SEEDS)
def test_minfac_matches_oracle(name, tuples, domain, seed):
    q, inst = instance(name, tuples, domain, seed)
    result = solve_minfac(q, inst)
    assert result.length == brute_minfac(q, inst)
    assert expand_and_compare(result.expression, result.dnf)
    assert result.lp_bound <= result.length
    assert result.length >= len(result.dnf.tuples)

    for plan in enumerate_plans(q):
        assert result.length <= solve_minfac(q, inst, plans=[plan]).length


@pytest.mark.parametrize("name, tuples, domain", ORACLE_CASES[:3])
def test_minfac_expression_is_equivalent(name, tuples, domain):
    for seed in range(100):
        q, inst = instance(name, tuples, domain, seed)
        result = solve_minfac(q, inst)
        if not result.dnf:
            assert result.length == 0
            continue
        assert expand_and_compare(result.expression, result.dnf), f"seed {seed}"
        assert result.expression.length == result.length
        assert len(result.expression.leaves) == result.length


@pytest.mark.parametrize(
    "name, tuples, domain", [("chain2", 5, 3), ("q_triangle", 3, 3), ("qa_triangle", 3, 3)]
)
def test_read_once_instances_are_easy(name, tuples, domain):
    checked = 0
    for seed in range(200):
        q, inst = instance(name, tuples, domain, seed)
        dnf = provenance_dnf(enumerate_witnesses(q, inst))
        if not dnf:
            continue
        e = read_once_factorize(dnf)
        if e is None:
            assert name != "chain2", f"seed {seed}"
            continue
        checked += 1
        assert e.length == len(set().union(*absorb(dnf.terms)))
        assert expand_and_compare(e, dnf)
        assert is_integral(solve_lp(build_resilience_model(q, inst))), f"seed {seed}"
        assert solve_minfac(q, inst).length == e.length == len(dnf.tuples), f"seed {seed}"
    assert checked > 0


@pytest.mark.filterwarnings("ignore::rdmkit.warnings.DegenerateTargetWarning")
@pytest.mark.parametrize("name", [n for n in QUERIES if n != "epath"])
def test_ptime_predictions_hold(name):
    q, _ = load(name)
    predictions = predict_complexity(q).predictions
    for semantics in ("set", "bag"):
        resilience_easy = predictions[f"RES/{semantics}"].complexity == "PTIME"
        responsibility_easy = predictions[f"RSP/{semantics}"].complexity == "PTIME"
        for seed in range(40):
            inst = random_instance(q, 4, 3, seed, semantics)
            if resilience_easy:
                result = solve_resilience(q, inst)
                assert result.lp_bound == result.value, f"{semantics} seed {seed}"
            if responsibility_easy:
                for tid in sorted(set().union(*witness_terms(q, inst))):
                    milp = solve_responsibility(q, inst, tid)
                    if milp.status == "ok":
                        assert milp.lp_bound == milp.cost, f"{semantics} seed {seed} {tid}"


def with_tuple(inst, relation, values, multiplicity=1):
    rows = inst.relations[relation]
    if tuple(values) in {t.values for t in rows}:
        return inst
    row = max((t.row for t in rows), default=0) + 1
    relations = dict(inst.relations)
    relations[relation] = rows + (TupleRef(relation, row, values, multiplicity),)
    return Instance(relations, inst.arities, inst.semantics)


def with_multiplicity(inst, tid, multiplicity):
    target = inst.get(tid)
    relations = dict(inst.relations)
    relations[target.relation] = tuple(
        replace(t, multiplicity=multiplicity) if t.id == tid else t
        for t in inst.relations[target.relation]
    )
    return Instance(relations, inst.arities, inst.semantics)


@pytest.mark.parametrize("name, tuples, domain", ORACLE_CASES)
def test_resilience_is_monotone(name, tuples, domain):
    for seed in range(50):
        rng = np.random.default_rng(seed)
        q, inst = instance(name, tuples, domain, seed, "bag")
        before = solve_resilience(q, inst).value

        relation = q.relations[int(rng.integers(len(q.relations)))]
        values = tuple(f"c{int(v)}" for v in rng.integers(1, domain + 1, q.arity(relation)))
        grown = with_tuple(inst, relation, values, int(rng.integers(1, 4)))
        assert solve_resilience(q, grown).value >= before, f"seed {seed}"

        for t in inst.endogenous_tuples(q):
            heavier = with_multiplicity(inst, t.id, t.multiplicity + 1)
            assert solve_resilience(q, heavier).value >= before, f"seed {seed}, {t.id}"


@pytest.mark.parametrize("name", QUERIES)
def test_atom_order_is_irrelevant(name):
    q, _ = load(name)
    inst = random_instance(q, 4, 3, seed=0)
    value = solve_resilience(q, inst).value
    rng = np.random.default_rng(1)
    for _ in range(10):
        order = rng.permutation(len(q.atoms))
        shuffled = Query(tuple(q.atoms[int(i)] for i in order), q.exogenous, q.head)
        assert is_self_join_free(shuffled) == is_self_join_free(q)
        assert solve_resilience(shuffled, inst).value == value
        if is_self_join_free(q):
            assert {
                problem: p.complexity
                for problem, p in predict_complexity(shuffled).predictions.items()
            } == {problem: p.complexity for problem, p in predict_complexity(q).predictions.items()}


@pytest.mark.parametrize("seed", SEEDS)
def test_hierarchical_read_once(seed):
    q, inst = instance("chain2", 5, 3, seed)
    dnf = provenance_dnf(enumerate_witnesses(q, inst))
    if not dnf:
        return
    e = read_once_factorize(dnf)
    assert e is not None
    assert e.length == len(set().union(*absorb(dnf.terms)))
    assert expand_and_compare(e, dnf)
    assert solve_minfac(q, inst).length == e.length
