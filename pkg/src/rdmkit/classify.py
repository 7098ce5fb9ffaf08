"""
Structural analysis of queries and complexity predictions for resilience,
responsibility and minimal factorization.
"""

import itertools
from dataclasses import dataclass, field
from typing import Literal, Optional, Union

import networkx as nx

from .decorators import self_join_free
from .factorize import enumerate_plans, prune_dominated_plans
from .qlang import Query, atoms_of_variable

__all__ = (
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
)

PROBLEMS = ("RES/set", "RES/bag", "RSP/set", "RSP/bag", "FACT")
MAX_PLAN_VARIABLES = 7

Complexity = Literal["PTIME", "NPC", "OPEN"]


@dataclass(frozen=True)
class Prediction:
    complexity: Complexity
    reason: str


@dataclass(frozen=True)
class QueryClassification:
    """
    Structural properties of a query and the predicted complexity of each
    problem. ``hierarchical`` and ``linear`` are None for queries with
    self-joins, where no prediction is made.
    """

    query: str
    self_join_free: bool
    hierarchical: Optional[bool]
    linear: Optional[bool]
    dominated_atoms: tuple[int, ...]
    triad: Optional[tuple[int, int, int]]
    canonical_plan_count: Union[int, Literal["unknown"]]
    predictions: dict[str, Prediction]
    notes: tuple[str, ...] = ()
    target_notes: dict[str, str] = field(default_factory=dict)


@self_join_free
def is_hierarchical(q: Query) -> bool:
    """True iff the atom sets of any two variables are nested or disjoint."""
    atom_sets = [atoms_of_variable(q, v) for v in q.variables]
    for a, b in itertools.combinations(atom_sets, 2):
        if not (a <= b or b <= a or not a & b):
            return False
    return True


@self_join_free
def is_linear(q: Query) -> bool:
    """
    True iff the atoms can be ordered so that the atoms of every variable
    are consecutive.

    Atoms are appended one at a time; an atom may reuse a variable seen
    before only if the previous atom contains it.
    """
    atom_vars = [frozenset(atom.variables) for atom in q.atoms]
    n = len(atom_vars)

    def extend(used: frozenset, seen: frozenset, previous: Optional[frozenset]) -> bool:
        if len(used) == n:
            return True
        for i in range(n):
            if i in used:
                continue
            shared = atom_vars[i] & seen
            if previous is not None and not shared <= previous:
                continue
            if extend(used | {i}, seen | atom_vars[i], atom_vars[i]):
                return True
        return False

    return extend(frozenset(), frozenset(), None)


def _dominators(q: Query) -> dict[int, list[int]]:
    atom_vars = [frozenset(atom.variables) for atom in q.atoms]
    found = {}
    for i in q.endogenous_atoms:
        by = [j for j, vs in enumerate(atom_vars) if vs and j != i and vs < atom_vars[i]]
        if by:
            found[i] = by
    return found


@self_join_free
def dominated_atoms(q: Query) -> tuple[int, ...]:
    """Endogenous atoms whose variable set strictly contains the (nonempty)
    variable set of another atom, exogenous atoms included."""
    return tuple(sorted(_dominators(q)))


@self_join_free
def has_triad(q: Query) -> Optional[tuple[int, int, int]]:
    """
    First triad of ``q`` in lexicographic order of atom indices, or None.

    A triad is three non-dominated endogenous atoms such that every two of
    them are joined by a path of atoms sharing variables, without using any
    variable of the third.

    Examples
    --------
    The triangle query has a triad::

        has_triad(parse_query("q() :- R(x,y), S(y,z), T(z,x)."))  # (0, 1, 2)
    """
    dominated = set(_dominators(q))
    candidates = [i for i in q.endogenous_atoms if i not in dominated]
    atom_vars = [frozenset(atom.variables) for atom in q.atoms]

    def avoiding(k: int) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(len(atom_vars)))
        for a, b in itertools.combinations(range(len(atom_vars)), 2):
            if (atom_vars[a] & atom_vars[b]) - atom_vars[k]:
                graph.add_edge(a, b)
        return graph

    graphs = {}
    for triple in itertools.combinations(candidates, 3):
        connected = True
        for k in triple:
            if k not in graphs:
                graphs[k] = avoiding(k)
            i, j = (a for a in triple if a != k)
            if not nx.has_path(graphs[k], i, j):
                connected = False
                break
        if connected:
            return triple
    return None


def _canonical_plan_count(q: Query) -> Union[int, Literal["unknown"]]:
    if len(q.variables) > MAX_PLAN_VARIABLES:
        return "unknown"
    return len(prune_dominated_plans(q, enumerate_plans(q)))


def _atom_names(q: Query, indices) -> str:
    return ", ".join(q.atoms[i].relation for i in indices)


def predict_complexity(q: Query) -> QueryClassification:
    """
    Classify ``q`` and predict PTIME, NPC or OPEN for each problem.

    Self-join free queries follow these rules: resilience and responsibility
    under bag semantics are easy iff the query is linear; resilience under
    set semantics is easy iff there is no triad; responsibility under set
    semantics is only claimed easy for triad-free linear queries;
    factorization is claimed easy when at most two plans survive pruning.
    Everything else, and every query with self-joins, is OPEN.
    """
    notes = []
    repeated = q.repeated_relations()
    if repeated:
        notes.append(
            f"self-join on {', '.join(repeated)}: complexity of queries with self-joins is open"
        )
        reason = "query has self-joins"
        return QueryClassification(
            str(q),
            False,
            None,
            None,
            (),
            None,
            "unknown",
            {problem: Prediction("OPEN", reason) for problem in PROBLEMS},
            tuple(notes),
            {},
        )

    hierarchical = is_hierarchical(q)
    linear = is_linear(q)
    dominators = _dominators(q)
    triad = has_triad(q)
    plan_count = _canonical_plan_count(q)

    if q.has_constants:
        notes.append("constants are treated as selections; only variables enter the criteria")
    for i, by in sorted(dominators.items()):
        exogenous = [j for j in by if q.is_exogenous(q.atoms[j].relation)]
        if exogenous:
            notes.append(
                f"{q.atoms[i].relation} is dominated by exogenous atom(s) "
                f"{_atom_names(q, exogenous)} (exogenous atoms counted as dominators)"
            )

    predictions = {}
    for problem, noun in (("RES/bag", "resilience"), ("RSP/bag", "responsibility")):
        if linear:
            predictions[problem] = Prediction("PTIME", f"linear query: bag {noun} is easy")
        else:
            predictions[problem] = Prediction("NPC", f"non-linear query: bag {noun} is hard")
    if triad is None:
        predictions["RES/set"] = Prediction("PTIME", "no triad among non-dominated endogenous atoms")
    else:
        predictions["RES/set"] = Prediction("NPC", f"triad ({_atom_names(q, triad)})")
    if triad is None and linear:
        predictions["RSP/set"] = Prediction("PTIME", "triad-free and linear query")
    else:
        predictions["RSP/set"] = Prediction("OPEN", "outside the triad-free linear region")
    if plan_count != "unknown" and plan_count <= 2:
        predictions["FACT"] = Prediction(
            "PTIME", f"{plan_count} plan(s) after pruning (2-MQP, heuristic count)"
        )
    else:
        predictions["FACT"] = Prediction(
            "OPEN", f"{plan_count} plans after pruning (2-MQP, heuristic count)"
        )

    target_notes = {}
    atom_vars = [frozenset(atom.variables) for atom in q.atoms]
    for i in q.endogenous_atoms:
        relation = q.atoms[i].relation
        if predictions["RSP/set"].complexity == "PTIME":
            target_notes[relation] = "PTIME at query level"
        elif any(atom_vars[i] and atom_vars[i] < vs for vs in atom_vars):
            target_notes[relation] = (
                "atom dominates another atom; responsibility of its tuples may be easier "
                "than the query-level class (not decided here)"
            )
        else:
            target_notes[relation] = f"query-level class {predictions['RSP/set'].complexity}"

    return QueryClassification(
        str(q),
        True,
        hierarchical,
        linear,
        tuple(sorted(dominators)),
        triad,
        plan_count,
        {problem: predictions[problem] for problem in PROBLEMS},
        tuple(notes),
        target_notes,
    )


def classification_to_dict(c: QueryClassification) -> dict:
    """JSON payload of a classification."""
    return {
        "query": c.query,
        "self_join_free": c.self_join_free,
        "hierarchical": c.hierarchical,
        "linear": c.linear,
        "dominated_atoms": list(c.dominated_atoms),
        "triad": list(c.triad) if c.triad is not None else None,
        "canonical_plan_count": c.canonical_plan_count,
        "predictions": {
            problem: {"complexity": p.complexity, "reason": p.reason}
            for problem, p in c.predictions.items()
        },
        "notes": list(c.notes),
        "target_notes": dict(c.target_notes),
    }
