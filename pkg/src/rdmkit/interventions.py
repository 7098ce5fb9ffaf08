"""
Resilience and causal responsibility as (mixed) integer linear programs.

Both problems share one encoding: a variable ``x[t]`` per endogenous tuple,
set to 1 when the tuple is deleted, and one covering constraint per witness.
Resilience asks to destroy every witness. Responsibility fixes the target
tuple, destroys the witnesses without it and keeps at least one witness that
contains it. Solvers try the LP relaxation first and only branch when the
relaxation is fractional.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, Optional, Union
from warnings import warn

from .errors import DataError, ExogenousTargetError, SolverAuditError, UndefinedResilienceError
from .instance import Instance, Semantics, TupleRef
from .lpcore import (
    LinearModel,
    LinearSolution,
    SolveStats,
    is_integral,
    rational_to_dict,
    solve_lp,
    solve_mip,
)
from .qlang import Query
from .warnings import DegenerateTargetWarning
from .witness import ProvenanceDNF, Witness, enumerate_witnesses, provenance_dnf

__all__ = (
    "ResilienceResult",
    "ResponsibilityResult",
    "tuple_variable",
    "build_resilience_model",
    "solve_resilience",
    "build_responsibility_model",
    "solve_responsibility",
    "result_to_dict",
)

logger = logging.getLogger(__name__)

ResilienceMode = Literal["lp", "ilp", "auto"]
ResponsibilityMode = Literal["milp", "ilp"]


def tuple_variable(tid: str) -> str:
    """Model variable deciding the deletion of tuple ``tid``."""
    return f"x[{tid}]"


def _witness_variable(index: int) -> str:
    return f"y[w{index}]"


@dataclass(frozen=True)
class ResilienceResult:
    """
    Outcome of ``solve_resilience``.

    ``deleted`` is None only in ``lp`` mode when the relaxation is fractional.
    """

    value: Fraction
    deleted: Optional[frozenset[str]]
    lp_bound: Fraction
    lp_integral: bool
    semantics: Semantics
    mode: ResilienceMode
    stats: SolveStats = SolveStats()


@dataclass(frozen=True)
class ResponsibilityResult:
    """
    Outcome of ``solve_responsibility``.

    ``status`` is ``ok`` when a contingency exists, ``no_witness`` when the
    target occurs in no witness and ``infeasible`` when no deletion makes the
    target counterfactual. The last two report responsibility 0.
    """

    target: str
    status: Literal["ok", "no_witness", "infeasible"]
    contingency: frozenset[str]
    cost: Optional[Fraction]
    responsibility: Fraction
    preserved_witness: Optional[Witness]
    lp_bound: Optional[Fraction]
    milp_integral: bool
    semantics: Semantics
    mode: ResponsibilityMode
    stats: SolveStats = SolveStats()


def _semantics(inst: Instance, semantics: Optional[Semantics]) -> Semantics:
    semantics = semantics or inst.semantics
    if semantics not in ("set", "bag"):
        raise DataError(f"Semantics must be 'set' or 'bag', got {semantics!r}")
    return semantics


def _provenance(q: Query, inst: Instance) -> ProvenanceDNF:
    return provenance_dnf(enumerate_witnesses(q, inst))


def _endogenous_part(q: Query, term: frozenset[str], inst: Instance) -> list[str]:
    return sorted(tid for tid in term if not q.is_exogenous(inst.get(tid).relation))


def _add_tuple_variables(m: LinearModel, q: Query, inst: Instance, semantics: Semantics):
    for t in inst.endogenous_tuples(q):
        m.add_variable(
            tuple_variable(t.id), 0, 1, integral=True, objective=inst.weight(t.id, semantics)
        )


def build_resilience_model(
    q: Query, inst: Instance, semantics: Optional[Semantics] = None
) -> LinearModel:
    """
    Integer program whose optimum is the resilience of ``q`` on ``inst``.

    Parameters
    ----------
    q: (Query)
        Boolean conjunctive query, self-joins allowed.
    inst: (Instance)
        Database instance.
    semantics: ({"set", "bag"}, optional)
        Objective weights: 1 per tuple under set semantics, the multiplicity
        under bag semantics. Defaults to the instance's semantics.

    Returns
    -------
    LinearModel
        One integral ``x[Relation:row]`` in [0, 1] per endogenous tuple and
        one constraint ``sum x >= 1`` per distinct endogenous witness support.
        Only the objective depends on ``semantics``.
    """
    semantics = _semantics(inst, semantics)
    dnf = _provenance(q, inst)
    m = LinearModel(f"resilience-{semantics}")
    _add_tuple_variables(m, q, inst, semantics)
    seen = set()
    for term, witness in zip(dnf.terms, dnf.witnesses):
        endogenous = _endogenous_part(q, term, inst)
        if not endogenous:
            raise UndefinedResilienceError(witness)
        key = tuple(endogenous)
        if key in seen:
            continue
        seen.add(key)
        m.add_constraint({tuple_variable(tid): 1 for tid in endogenous}, ">=", 1, f"w{len(seen)}")
    return m


def _deleted(solution: LinearSolution, prefix="x[") -> frozenset[str]:
    return frozenset(
        name[len(prefix) : -1]
        for name, value in solution.values.items()
        if name.startswith(prefix) and value == 1
    )


def solve_resilience(
    q: Query,
    inst: Instance,
    semantics: Optional[Semantics] = None,
    mode: ResilienceMode = "auto",
) -> ResilienceResult:
    """
    Minimum deletion cost that makes ``q`` false on ``inst``.

    ``auto`` returns the LP relaxation when its basic solution is integral and
    branches otherwise; ``ilp`` always goes through branch-and-bound; ``lp``
    stops at the relaxation and reports no deletion set when it is
    fractional.
    """
    if mode not in ("lp", "ilp", "auto"):
        raise ValueError(f"Resilience mode must be lp, ilp or auto, got {mode!r}")
    semantics = _semantics(inst, semantics)
    m = build_resilience_model(q, inst, semantics)
    relaxation = solve_lp(m)
    lp_integral = is_integral(relaxation)
    if mode == "lp":
        deleted = _deleted(relaxation) if lp_integral else None
        if deleted is not None:
            _audit_resilience(m, q, inst, deleted)
        return ResilienceResult(
            relaxation.objective,
            deleted,
            relaxation.objective,
            lp_integral,
            semantics,
            mode,
            relaxation.stats,
        )
    if mode == "auto" and lp_integral:
        solution = relaxation
    else:
        logger.debug("Resilience LP is %s; branching", "integral" if lp_integral else "fractional")
        solution = solve_mip(m)
    deleted = _deleted(solution)
    _audit_resilience(m, q, inst, deleted)
    return ResilienceResult(
        solution.objective,
        deleted,
        relaxation.objective,
        lp_integral,
        semantics,
        mode,
        solution.stats,
    )


def _audit_resilience(m, q, inst, deleted):
    for term in _provenance(q, inst).terms:
        if not term & deleted:
            raise SolverAuditError(
                f"Deleting {sorted(deleted)} leaves the witness {sorted(term)} of {m.name}"
            )


def _target_id(inst: Instance, q: Query, target: Union[str, TupleRef]) -> str:
    tid = target.id if isinstance(target, TupleRef) else target
    t = inst.get(tid)
    if t.relation in q.exogenous:
        raise ExogenousTargetError(f"Target {tid} belongs to exogenous relation {t.relation}")
    return tid


def build_responsibility_model(
    q: Query,
    inst: Instance,
    target: Union[str, TupleRef],
    semantics: Optional[Semantics] = None,
) -> LinearModel:
    """
    Mixed integer program for the responsibility of ``target``.

    The tuple variables of the resilience model are relaxed and
    ``x[target]`` is fixed to 0. Witnesses without the target must be
    destroyed. Each witness with the target gets an integral ``y[w]`` that
    must be 1 once any of its tuples is deleted, and ``sum y`` stays below
    the number of such witnesses so that one survives.

    A target that occurs in no witness yields the infeasible row
    ``0 <= -1`` and the note ``degenerate: ...`` in ``m.notes``.
    """
    semantics = _semantics(inst, semantics)
    tid = _target_id(inst, q, target)
    dnf = _provenance(q, inst)
    m = LinearModel(f"responsibility-{semantics}")
    _add_tuple_variables(m, q, inst, semantics)
    target_var = tuple_variable(tid)
    if target_var not in m:
        m.add_variable(target_var, 0, 0)
    m = m.relaxed().with_bounds({target_var: (0, 0)})

    preserving = []
    for index, (term, witness) in enumerate(zip(dnf.terms, dnf.witnesses), start=1):
        endogenous = _endogenous_part(q, term, inst)
        if tid not in term:
            if not endogenous:
                m.notes.append(f"witness {witness} cannot be destroyed")
            m.add_constraint({tuple_variable(t): 1 for t in endogenous}, ">=", 1, f"destroy{index}")
            continue
        y = m.add_variable(_witness_variable(index), 0, 1, integral=True)
        preserving.append(y)
        for t in endogenous:
            if t != tid:
                m.add_constraint({tuple_variable(t): 1, y: -1}, "<=", 0, f"track{index}_{t}")
    if not preserving:
        m.notes.append(f"degenerate: target {tid} occurs in no witness")
    m.add_constraint({y: 1 for y in preserving}, "<=", len(preserving) - 1, "preserve")
    return m


def _surviving(dnf: ProvenanceDNF, deleted: frozenset[str]):
    return [(term, w) for term, w in zip(dnf.terms, dnf.witnesses) if not term & deleted]


def solve_responsibility(
    q: Query,
    inst: Instance,
    target: Union[str, TupleRef],
    semantics: Optional[Semantics] = None,
    mode: ResponsibilityMode = "milp",
) -> ResponsibilityResult:
    """
    Responsibility ``1 / (1 + cost)`` of ``target`` for ``q`` being true.

    Parameters
    ----------
    q: (Query)
        Boolean conjunctive query.
    inst: (Instance)
        Database instance on which ``q`` is evaluated.
    target: (Union[str, TupleRef])
        Endogenous tuple, e.g. ``"Oscar:1"``.
    semantics: ({"set", "bag"}, optional)
        Deletion weights; the target's own multiplicity never counts.
        Defaults to the instance's semantics.
    mode: ({"milp", "ilp"}, optional)
        ``milp`` solves the model with only the witness variables integral
        and escalates to the all-integral model if a tuple variable stays
        fractional. ``ilp`` solves the all-integral model directly.
        Defaults to "milp".

    Returns
    -------
    ResponsibilityResult
        ``lp_bound`` is the optimum of the relaxation the mode starts from:
        the mixed model in ``milp`` mode, the plain LP in ``ilp`` mode.
    """
    if mode not in ("milp", "ilp"):
        raise ValueError(f"Responsibility mode must be milp or ilp, got {mode!r}")
    semantics = _semantics(inst, semantics)
    m = build_responsibility_model(q, inst, target, semantics)
    tid = _target_id(inst, q, target)
    dnf = _provenance(q, inst)

    if not any(tid in term for term in dnf.terms):
        warn(DegenerateTargetWarning(tid))
        return ResponsibilityResult(
            tid, "no_witness", frozenset(), None, Fraction(0), None, None, False, semantics, mode
        )

    if mode == "milp":
        first = solve_mip(m)
    else:
        first = solve_lp(m)
    if not first.optimal:
        return ResponsibilityResult(
            tid, "infeasible", frozenset(), None, Fraction(0), None, None, False, semantics, mode,
            first.stats,
        )
    tuple_names = [name for name in m.names if name.startswith("x[")]
    milp_integral = mode == "milp" and is_integral(first, tuple_names)
    if milp_integral:
        solution = first
    else:
        logger.debug("Responsibility of %s: solving the all-integral model", tid)
        solution = solve_mip(m.all_integral())
        stats = SolveStats(
            first.stats.iterations + solution.stats.iterations,
            first.stats.nodes + solution.stats.nodes,
        )
        if not solution.optimal:
            return ResponsibilityResult(
                tid, "infeasible", frozenset(), None, Fraction(0), None, first.objective, False,
                semantics, mode, stats,
            )
        solution = LinearSolution(
            solution.status, solution.objective, solution.values, solution.basic, stats
        )

    contingency = _deleted(solution) - {tid}
    survivors = _surviving(dnf, contingency)
    if not survivors or any(tid not in term for term, _ in survivors):
        raise SolverAuditError(
            f"Contingency {sorted(contingency)} does not make {tid} counterfactual"
        )
    preserved = next(w for term, w in survivors if tid in term)
    cost = solution.objective
    return ResponsibilityResult(
        tid,
        "ok",
        contingency,
        cost,
        Fraction(1) / (1 + cost),
        preserved,
        first.objective,
        milp_integral,
        semantics,
        mode,
        solution.stats,
    )


def _witness_to_dict(witness: Optional[Witness]) -> Optional[dict]:
    if witness is None:
        return None
    return {"assignment": dict(witness.assignment), "support": list(witness.support)}


def result_to_dict(result: Union[ResilienceResult, ResponsibilityResult]) -> dict:
    """JSON payload of a resilience or responsibility result."""
    stats = {"iterations": result.stats.iterations, "nodes": result.stats.nodes}
    if isinstance(result, ResilienceResult):
        return {
            "problem": "resilience",
            "semantics": result.semantics,
            "mode": result.mode,
            "value": rational_to_dict(result.value),
            "lp_bound": rational_to_dict(result.lp_bound),
            "lp_integral": result.lp_integral,
            "deleted": None if result.deleted is None else sorted(result.deleted),
            "stats": stats,
        }
    return {
        "problem": "responsibility",
        "semantics": result.semantics,
        "mode": result.mode,
        "target": result.target,
        "status": result.status,
        "value": rational_to_dict(result.cost),
        "responsibility": rational_to_dict(result.responsibility),
        "lp_bound": rational_to_dict(result.lp_bound),
        "lp_integral": result.milp_integral,
        "contingency": sorted(result.contingency),
        "preserved_witness": _witness_to_dict(result.preserved_witness),
        "stats": stats,
    }
