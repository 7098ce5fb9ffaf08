"""
Brute-force reference answers for small instances.

Nothing here uses the LP solver: the oracles enumerate deletion sets and
plan assignments directly, so they can check the solver-based modules.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .context import CancelToken
from .decorators import self_join_free
from .errors import BudgetExceededError, ExogenousTargetError, OracleError, UndefinedResilienceError
from .factorize import QueryPlan, enumerate_plans, occurrence_keys
from .instance import Instance, Semantics, TupleRef
from .qlang import Query
from .witness import enumerate_witnesses, provenance_dnf

__all__ = (
    "OracleBudget",
    "brute_resilience",
    "brute_responsibility",
    "brute_minfac",
    "brute_minfac_check",
)


@dataclass(frozen=True)
class OracleBudget:
    """
    Size limits of the brute-force searches.

    Parameters
    ----------
    max_endogenous_tuples: (int, optional)
        Deletable tuples that occur in some witness. Defaults to 14.
    max_witnesses: (int, optional)
        Distinct witness terms. Defaults to 64.
    max_assignments: (int, optional)
        Witness-to-plan assignments searched by ``brute_minfac``. Defaults
        to 1_000_000.
    """

    max_endogenous_tuples: int = 14
    max_witnesses: int = 64
    max_assignments: int = 1_000_000

    def __post_init__(self):
        for name in ("max_endogenous_tuples", "max_witnesses", "max_assignments"):
            if getattr(self, name) < 1:
                raise OracleError(f"{name} must be positive, got {getattr(self, name)}")


DEFAULT_BUDGET = OracleBudget()


def _terms(q: Query, inst: Instance, budget: OracleBudget):
    dnf = provenance_dnf(enumerate_witnesses(q, inst))
    if len(dnf.terms) > budget.max_witnesses:
        raise BudgetExceededError("witnesses", len(dnf.terms), budget.max_witnesses)
    endogenous = [
        frozenset(t for t in term if not q.is_exogenous(inst.get(t).relation)) for term in dnf.terms
    ]
    return dnf, endogenous


def _check_candidates(candidates, budget: OracleBudget):
    if len(candidates) > budget.max_endogenous_tuples:
        raise BudgetExceededError(
            "endogenous tuples", len(candidates), budget.max_endogenous_tuples
        )


def _subsets_by_weight(candidates, weights, accept, cancel: Optional[CancelToken]):
    """Smallest total weight of a subset of ``candidates`` passing ``accept``,
    or None. Subsets are visited by size; a size is skipped once its
    cheapest possible weight reaches the best weight found."""
    ordered = sorted(weights[t] for t in candidates)
    best = None
    for size in range(len(candidates) + 1):
        if best is not None and sum(ordered[:size]) >= best:
            break
        for subset in itertools.combinations(candidates, size):
            if cancel is not None:
                cancel.check()
            weight = sum(weights[t] for t in subset)
            if best is not None and weight >= best:
                continue
            if accept(frozenset(subset)):
                best = weight
    return best


def brute_resilience(
    q: Query,
    inst: Instance,
    semantics: Optional[Semantics] = None,
    budget: OracleBudget = DEFAULT_BUDGET,
    cancel: Optional[CancelToken] = None,
) -> Fraction:
    """Minimum weight of a deletion set that destroys every witness, by
    exhaustive search."""
    semantics = semantics or inst.semantics
    dnf, endogenous = _terms(q, inst, budget)
    for part, witness in zip(endogenous, dnf.witnesses):
        if not part:
            raise UndefinedResilienceError(witness)
    candidates = sorted(set().union(*endogenous)) if endogenous else []
    _check_candidates(candidates, budget)
    weights = {t: inst.weight(t, semantics) for t in candidates}
    best = _subsets_by_weight(
        candidates, weights, lambda deleted: all(part & deleted for part in endogenous), cancel
    )
    return Fraction(best)


def brute_responsibility(
    q: Query,
    inst: Instance,
    target: Union[str, TupleRef],
    semantics: Optional[Semantics] = None,
    budget: OracleBudget = DEFAULT_BUDGET,
    cancel: Optional[CancelToken] = None,
) -> Optional[Fraction]:
    """
    Minimum contingency weight for ``target``, by exhaustive search.

    Returns None when no contingency exists, including when the target
    occurs in no witness.
    """
    semantics = semantics or inst.semantics
    tid = target.id if isinstance(target, TupleRef) else target
    if q.is_exogenous(inst.get(tid).relation):
        raise ExogenousTargetError(f"Target {tid} belongs to an exogenous relation")
    dnf, endogenous = _terms(q, inst, budget)
    with_target = [part for term, part in zip(dnf.terms, endogenous) if tid in term]
    without_target = [part for term, part in zip(dnf.terms, endogenous) if tid not in term]
    if not with_target or any(not part for part in without_target):
        return None
    candidates = sorted(set().union(*endogenous) - {tid})
    _check_candidates(candidates, budget)
    weights = {t: inst.weight(t, semantics) for t in candidates}

    def counterfactual(deleted):
        return all(part & deleted for part in without_target) and any(
            not part & deleted for part in with_target
        )

    best = _subsets_by_weight(candidates, weights, counterfactual, cancel)
    return None if best is None else Fraction(best)


@self_join_free
def brute_minfac(
    q: Query,
    inst: Instance,
    plans: Optional[Sequence[QueryPlan]] = None,
    budget: OracleBudget = DEFAULT_BUDGET,
    cancel: Optional[CancelToken] = None,
) -> int:
    """
    Fewest occurrence keys over all witness-to-plan assignments.

    Parameters
    ----------
    plans: (Optional[Sequence[QueryPlan]], optional)
        Plans to search. Defaults to every plan of ``q``, unpruned.
    """
    dnf, _ = _terms(q, inst, budget)
    if not dnf.terms:
        return 0
    plans = list(plans) if plans is not None else enumerate_plans(q)
    total = len(plans) ** len(dnf.terms)
    if total > budget.max_assignments:
        raise BudgetExceededError("plan assignments", total, budget.max_assignments)
    keys = [
        [frozenset(occurrence_keys(q, plan, witness)) for plan in plans]
        for witness in dnf.witnesses
    ]
    best = sum(len(options[0]) for options in keys)

    def search(i: int, used: frozenset):
        nonlocal best
        if cancel is not None:
            cancel.check()
        if len(used) >= best:
            return
        if i == len(keys):
            best = len(used)
            return
        for option in keys[i]:
            search(i + 1, used | option)

    search(0, frozenset())
    return best


def brute_minfac_check(
    q: Query,
    inst: Instance,
    claimed_length: int,
    budget: OracleBudget = DEFAULT_BUDGET,
    cancel: Optional[CancelToken] = None,
) -> bool:
    """True iff ``claimed_length`` is the minimum found by ``brute_minfac``."""
    return brute_minfac(q, inst, budget=budget, cancel=cancel) == claimed_length
