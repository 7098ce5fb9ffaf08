"""
Minimal factorization of query provenance.

A query plan is a rooted forest over the query variables in which every
atom's variables lie on one root-to-node path; the atom is placed at its
deepest variable. Assigning a plan to each witness groups witnesses that
agree on a path prefix, and each distinct (plan, atom, prefix) triple costs
one tuple occurrence in the factorized expression. The ILP of
``build_minfac_model`` picks the assignment with the fewest occurrences.
"""

import functools
import itertools
import logging
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Optional, Sequence

import networkx as nx

from .base import Node
from .decorators import self_join_free
from .errors import ExpansionLimitError, FactorizationError, SolverAuditError
from .instance import Instance
from .lpcore import LinearModel, SolveStats, is_integral, solve_lp, solve_mip
from .qlang import Query
from .witness import ProvenanceDNF, Witness, absorb, enumerate_witnesses, provenance_dnf

__all__ = (
    "PlanNode",
    "QueryPlan",
    "OccurrenceKey",
    "FactorExpr",
    "MinFacResult",
    "enumerate_plans",
    "prune_dominated_plans",
    "occurrence_keys",
    "build_minfac_model",
    "solve_minfac",
    "extract_expression",
    "expand_and_compare",
    "read_once_factorize",
    "EXPANSION_LIMIT",
)

logger = logging.getLogger(__name__)

EXPANSION_LIMIT = 1_000_000


class PlanNode(Node):
    """A variable of a query plan forest."""

    graphviz_types = {
        "variable": {"style": "solid", "color": "black", "shape": "ellipse"},
        "root": {"style": "dashed", "color": "gray", "shape": "point"},
    }

    def __init__(self, name: str, children: Sequence["PlanNode"] = (), root: bool = False):
        super().__init__(name, children)
        self._type = "root" if root else "variable"

    def label(self) -> str:
        return self.name


@dataclass(frozen=True)
class QueryPlan:
    """
    A query plan for a self-join free query.

    Parameters
    ----------
    id: (str)
        Canonical serialization, e.g. ``"y(x,z)"``; roots and siblings sorted.
    parents: (tuple[tuple[str, Optional[str]], ...])
        ``(variable, parent)`` pairs in the query's variable order.
    placement: (tuple[Optional[str], ...])
        Deepest variable of each atom, None for atoms without variables.
    """

    id: str
    parents: tuple[tuple[str, Optional[str]], ...]
    placement: tuple[Optional[str], ...]

    @functools.cached_property
    def _parent(self) -> dict[str, Optional[str]]:
        return dict(self.parents)

    def parent(self, variable: str) -> Optional[str]:
        return self._parent[variable]

    def children(self, variable: Optional[str]) -> tuple[str, ...]:
        """Children of ``variable`` sorted by name; None gives the roots."""
        return tuple(sorted(v for v, p in self.parents if p == variable))

    @property
    def roots(self) -> tuple[str, ...]:
        return self.children(None)

    def path(self, variable: Optional[str]) -> tuple[str, ...]:
        """Variables from the root down to ``variable`` inclusive."""
        path = []
        while variable is not None:
            path.append(variable)
            variable = self._parent[variable]
        return tuple(reversed(path))

    def atom_path(self, atom: int) -> tuple[str, ...]:
        return self.path(self.placement[atom])

    def atoms_at(self, variable: Optional[str]) -> tuple[int, ...]:
        return tuple(i for i, v in enumerate(self.placement) if v == variable)

    def tree(self) -> PlanNode:
        def build(variable):
            return PlanNode(variable, [build(child) for child in self.children(variable)])

        return PlanNode(self.id, [build(root) for root in self.roots], root=True)

    def graphviz(self, top_down=True) -> "graphviz.Digraph":
        return self.tree().graphviz(top_down)

    def __str__(self) -> str:
        return self.id


@dataclass(frozen=True, order=True)
class OccurrenceKey:
    """One tuple occurrence of a factorization: atom ``atom`` reached in plan
    ``plan`` through the variable values ``prefix``."""

    plan: str
    atom: int
    prefix: tuple[str, ...]

    def __str__(self) -> str:
        return f"{self.plan}|{self.atom}|{','.join(self.prefix)}"


def _plan_id(parents: Mapping[str, Optional[str]]) -> str:
    children = defaultdict(list)
    for v, p in parents.items():
        children[p].append(v)

    def text(v):
        kids = sorted(children.get(v, ()))
        return v if not kids else f"{v}({','.join(text(k) for k in kids)})"

    return ",".join(text(root) for root in sorted(children.get(None, ())))


def _depths(parents: Mapping[str, Optional[str]]) -> Optional[dict[str, int]]:
    """Depth of each variable, or None when the parent map has a cycle."""
    depths = {}
    for start in parents:
        chain, v = [], start
        while v is not None and v not in depths:
            if v in chain:
                return None
            chain.append(v)
            v = parents[v]
        base = 0 if v is None else depths[v] + 1
        for offset, u in enumerate(reversed(chain)):
            depths[u] = base + offset
    return depths


def _is_ancestor(parents, u, v) -> bool:
    while v is not None:
        if v == u:
            return True
        v = parents[v]
    return False


@functools.lru_cache(maxsize=128)
def _plans(q: Query) -> tuple[QueryPlan, ...]:
    variables = q.variables
    atom_vars = [atom.variables for atom in q.atoms]
    cooccur = {v: set() for v in variables}
    for vs in atom_vars:
        for u, v in itertools.permutations(vs, 2):
            cooccur[u].add(v)
    choices = [[None] + sorted(cooccur[v]) for v in variables]
    plans = {}
    for combo in itertools.product(*choices):
        parents = dict(zip(variables, combo))
        depths = _depths(parents)
        if depths is None:
            continue
        placement = []
        for vs in atom_vars:
            if not vs:
                placement.append(None)
                continue
            deepest = max(vs, key=lambda v: depths[v])
            if not all(_is_ancestor(parents, v, deepest) for v in vs):
                break
            placement.append(deepest)
        else:
            plan_id = _plan_id(parents)
            plans[plan_id] = QueryPlan(plan_id, tuple(parents.items()), tuple(placement))
    return tuple(plans[k] for k in sorted(plans))


@self_join_free
def enumerate_plans(q: Query) -> list[QueryPlan]:
    """
    All query plans of ``q``, sorted by id.

    Every parent/child pair of a plan co-occurs in some atom and the
    variables of each atom lie on a single root-to-node path.

    Examples
    --------
    The 2-chain has three plans::

        [p.id for p in enumerate_plans(parse_query("q() :- R(x,y), S(y,z)."))]
        # ['x(y(z))', 'y(x,z)', 'z(y(x))']
    """
    return list(_plans(q))


def _signature(plan: QueryPlan) -> tuple[frozenset[str], ...]:
    return tuple(frozenset(plan.atom_path(i)) for i in range(len(plan.placement)))


@self_join_free
def prune_dominated_plans(q: Query, plans: Iterable[QueryPlan]) -> list[QueryPlan]:
    """
    Drop every plan whose atom paths are all supersets of another plan's.

    A plan ``p`` is dominated by ``p2`` when, for every atom, the variables
    on ``p2``'s path to the atom are a subset of those on ``p``'s path; its
    occurrence keys are then never fewer. Among plans with identical paths
    the first one is kept. This only shrinks the model, it never changes the
    optimum.
    """
    plans = list(plans)
    signatures = [_signature(p) for p in plans]
    kept = []
    for i, sig in enumerate(signatures):
        dominated = False
        for j, other in enumerate(signatures):
            if i == j:
                continue
            if all(a <= b for a, b in zip(other, sig)) and (other != sig or j < i):
                dominated = True
                break
        if not dominated:
            kept.append(plans[i])
    return kept


def occurrence_keys(q: Query, plan: QueryPlan, witness: Witness) -> tuple[OccurrenceKey, ...]:
    """Keys activated when ``witness`` is factorized with ``plan``, one per atom."""
    values = witness.values
    return tuple(
        OccurrenceKey(plan.id, i, tuple(values[v] for v in plan.atom_path(i)))
        for i in range(len(q.atoms))
    )


def _plan_variable(term: int, plan: QueryPlan) -> str:
    return f"q[w{term},{plan.id}]"


@self_join_free
def build_minfac_model(q: Query, dnf: ProvenanceDNF, plans: Sequence[QueryPlan]) -> LinearModel:
    """
    Plan-assignment ILP for the minimal factorization of ``dnf``.

    Parameters
    ----------
    q: (Query)
        Self-join free query the provenance comes from.
    dnf: (ProvenanceDNF)
        Provenance of ``q`` on some instance.
    plans: (Sequence[QueryPlan])
        Candidate plans, e.g. ``enumerate_plans(q)``.

    Returns
    -------
    LinearModel
        Integral ``q[w,p]`` per witness term and plan with ``sum_p q[w,p] >= 1``,
        integral ``o[key]`` per occurrence key with ``o[key] >= q[w,p]`` for
        each pair that activates the key, and objective ``min sum o``.
    """
    if not plans:
        raise FactorizationError("At least one query plan is required")
    m = LinearModel("minfac")
    for i, _ in enumerate(dnf.terms):
        for plan in plans:
            m.add_variable(_plan_variable(i, plan), 0, 1, integral=True)
    occurrences: dict[OccurrenceKey, str] = {}
    for i, witness in enumerate(dnf.witnesses):
        m.add_constraint({_plan_variable(i, p): 1 for p in plans}, ">=", 1, f"cover{i}")
        for plan in plans:
            for key in occurrence_keys(q, plan, witness):
                if key not in occurrences:
                    occurrences[key] = m.add_variable(f"o[{key}]", 0, 1, integral=True, objective=1)
                m.add_constraint(
                    {occurrences[key]: 1, _plan_variable(i, plan): -1}, ">=", 0
                )
    return m


class FactorExpr(Node):
    """
    Sum-product expression over tuple ids.

    Build expressions with ``FactorExpr.leaf``, ``FactorExpr.sum`` and
    ``FactorExpr.product``; they flatten nested operators of the same kind,
    collapse single children and sort children (leaves first, then by text).
    The length of an expression is its number of leaves.
    """

    graphviz_types = {
        "sum": {"style": "solid", "color": "black", "shape": "circle"},
        "product": {"style": "solid", "color": "black", "shape": "square"},
        "leaf": {"style": "filled", "color": "lightgray", "shape": "box"},
    }

    def __init__(self, kind: str, name: str, children: Sequence["FactorExpr"] = ()):
        super().__init__(name, children)
        self._type = kind

    @classmethod
    def leaf(cls, tid: str) -> "FactorExpr":
        return cls("leaf", tid)

    @classmethod
    def _combine(cls, kind: str, items: Iterable["FactorExpr"]) -> "FactorExpr":
        flat = []
        for item in items:
            flat.extend(item.children if item.kind == kind else (item,))
        if not flat:
            raise FactorizationError(f"Empty {kind}")
        if len(flat) == 1:
            return flat[0]
        flat.sort(key=lambda e: (e.kind != "leaf", e.to_text()))
        return cls(kind, kind, flat)

    @classmethod
    def sum(cls, items: Iterable["FactorExpr"]) -> "FactorExpr":
        return cls._combine("sum", items)

    @classmethod
    def product(cls, items: Iterable["FactorExpr"]) -> "FactorExpr":
        return cls._combine("product", items)

    @property
    def kind(self) -> str:
        return self._type

    @functools.cached_property
    def leaves(self) -> tuple[str, ...]:
        """Tuple ids of the leaves, left to right."""
        if self.kind == "leaf":
            return (self.name,)
        return tuple(tid for child in self.children for tid in child.leaves)

    @property
    def length(self) -> int:
        return len(self.leaves)

    def to_text(self, label: Optional[Callable[[str], str]] = None) -> str:
        """Infix text such as ``o1*s1*(a1*d1 + a2*d2)``; ``label`` maps tuple
        ids to the printed names."""
        if self.kind == "leaf":
            return label(self.name) if label else self.name
        if self.kind == "sum":
            return " + ".join(child.to_text(label) for child in self.children)
        return "*".join(
            f"({child.to_text(label)})" if child.kind == "sum" else child.to_text(label)
            for child in self.children
        )

    def to_dict(self) -> dict:
        if self.kind == "leaf":
            return {"leaf": self.name}
        return {self.kind: [child.to_dict() for child in self.children]}

    def label(self) -> str:
        return {"sum": "+", "product": "*"}.get(self.kind, self.name)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FactorExpr):
            return NotImplemented
        return (self.kind, self.name, self.children) == (other.kind, other.name, other.children)

    def __hash__(self) -> int:
        return hash((self.kind, self.name, self.children))

    def __repr__(self) -> str:
        return f"FactorExpr({self.to_text()})"


def _grouped(plan: QueryPlan, variable: str, dnf: ProvenanceDNF, members: list[int]) -> FactorExpr:
    groups = defaultdict(list)
    for i in members:
        groups[dnf.witnesses[i].value(variable)].append(i)
    summands = []
    for value in sorted(groups):
        group = groups[value]
        first = dnf.witnesses[group[0]]
        factors = [FactorExpr.leaf(first.support[a]) for a in plan.atoms_at(variable)]
        factors.extend(_grouped(plan, child, dnf, group) for child in plan.children(variable))
        summands.append(FactorExpr.product(factors))
    return FactorExpr.sum(summands)


def extract_expression(
    dnf: ProvenanceDNF, plans: Sequence[QueryPlan], assignment: Sequence[str]
) -> Optional[FactorExpr]:
    """
    Factorized expression for a witness-to-plan assignment.

    Parameters
    ----------
    dnf: (ProvenanceDNF)
        The provenance.
    plans: (Sequence[QueryPlan])
        The candidate plans.
    assignment: (Sequence[str])
        Plan id for each term of ``dnf``, in term order.

    Returns
    -------
    Optional[FactorExpr]
        The sum over plans of the grouped expression of the witnesses
        assigned to each plan: at every plan variable witnesses are grouped
        by value, atoms placed at the variable become leaf factors and child
        subtrees multiply. One leaf per activated occurrence key. None for
        empty provenance.
    """
    if len(assignment) != len(dnf.terms):
        raise FactorizationError(
            f"Assignment covers {len(assignment)} of {len(dnf.terms)} witness terms"
        )
    by_id = {p.id: p for p in plans}
    members = defaultdict(list)
    for i, plan_id in enumerate(assignment):
        if plan_id not in by_id:
            raise FactorizationError(f"Witness {i} is assigned to unknown plan {plan_id!r}")
        members[plan_id].append(i)
    summands = []
    for plan in plans:
        group = members.get(plan.id)
        if not group:
            continue
        first = dnf.witnesses[group[0]]
        factors = [FactorExpr.leaf(first.support[a]) for a in plan.atoms_at(None)]
        factors.extend(_grouped(plan, root, dnf, group) for root in plan.roots)
        summands.append(FactorExpr.product(factors))
    if not summands:
        return None
    return FactorExpr.sum(summands)


@dataclass(frozen=True)
class MinFacResult:
    """
    Outcome of ``solve_minfac``.

    ``assignment[i]`` is the plan id chosen for ``dnf.terms[i]``.
    """

    length: int
    expression: Optional[FactorExpr]
    assignment: tuple[str, ...]
    lp_bound: Fraction
    lp_integral: bool
    plans: tuple[str, ...]
    dnf: ProvenanceDNF
    stats: SolveStats = SolveStats()


@self_join_free
def solve_minfac(
    q: Query,
    inst: Instance,
    plans: Optional[Sequence[QueryPlan]] = None,
    prune: bool = True,
) -> MinFacResult:
    """
    Minimal factorization of the provenance of ``q`` on ``inst``.

    Parameters
    ----------
    q: (Query)
        Self-join free query.
    inst: (Instance)
        Database instance.
    plans: (Optional[Sequence[QueryPlan]], optional)
        Candidate plans. Defaults to ``enumerate_plans(q)``.
    prune: (bool, optional)
        Drop dominated plans first, see ``prune_dominated_plans``. Defaults
        to True.
    """
    dnf = provenance_dnf(enumerate_witnesses(q, inst))
    plans = list(plans) if plans is not None else enumerate_plans(q)
    if prune:
        plans = prune_dominated_plans(q, plans)
    m = build_minfac_model(q, dnf, plans)
    relaxation = solve_lp(m)
    lp_integral = is_integral(relaxation)
    solution = relaxation if lp_integral else solve_mip(m)
    if not lp_integral:
        logger.debug("Minimal factorization LP is fractional (%s)", relaxation.objective)

    assignment = []
    for i, _ in enumerate(dnf.terms):
        chosen = next(p.id for p in plans if solution.values[_plan_variable(i, p)] == 1)
        assignment.append(chosen)
    expression = extract_expression(dnf, plans, assignment)
    length = expression.length if expression is not None else 0
    if length != solution.objective:
        raise SolverAuditError(
            f"Factorization length {length} differs from the model optimum {solution.objective}"
        )
    return MinFacResult(
        length,
        expression,
        tuple(assignment),
        relaxation.objective,
        lp_integral,
        tuple(p.id for p in plans),
        dnf,
        solution.stats,
    )


def _expand(e: FactorExpr, limit: int) -> set[frozenset[str]]:
    if e.kind == "leaf":
        return {frozenset((e.name,))}
    parts = [_expand(child, limit) for child in e.children]
    if e.kind == "sum":
        out = set().union(*parts)
        if len(out) > limit:
            raise ExpansionLimitError(limit)
        return out
    out = {frozenset()}
    for part in parts:
        if len(out) * len(part) > limit:
            raise ExpansionLimitError(limit)
        out = {a | b for a in out for b in part}
    return out


def expand_and_compare(
    e: Optional[FactorExpr], dnf: ProvenanceDNF, limit: int = EXPANSION_LIMIT
) -> bool:
    """True iff ``e`` expands to the same monotone formula as ``dnf`` after
    absorption. ``None`` stands for the empty expression."""
    expanded = _expand(e, limit) if e is not None else set()
    return absorb(expanded) == absorb(dnf.terms)


def _read_once(terms: frozenset[frozenset[str]]) -> Optional[FactorExpr]:
    tuples = sorted(set().union(*terms))
    if len(terms) == 1:
        return FactorExpr.product(FactorExpr.leaf(t) for t in tuples)

    overlap = nx.Graph()
    overlap.add_nodes_from(tuples)
    for term in terms:
        ordered = sorted(term)
        overlap.add_edges_from(zip(ordered, ordered[1:]))
    components = list(nx.connected_components(overlap))
    if len(components) > 1:
        parts = []
        for component in components:
            part = _read_once(frozenset(t for t in terms if t <= component))
            if part is None:
                return None
            parts.append(part)
        return FactorExpr.sum(parts)

    cooccurrence = nx.Graph()
    cooccurrence.add_nodes_from(tuples)
    for term in terms:
        cooccurrence.add_edges_from(itertools.combinations(sorted(term), 2))
    components = list(nx.connected_components(nx.complement(cooccurrence)))
    if len(components) < 2:
        return None
    projections = []
    size = 1
    for component in components:
        projection = frozenset(t & component for t in terms)
        if frozenset() in projection:
            return None
        projections.append(projection)
        size *= len(projection)
    if size != len(terms):
        return None
    parts = []
    for projection in projections:
        part = _read_once(projection)
        if part is None:
            return None
        parts.append(part)
    return FactorExpr.product(parts)


def read_once_factorize(dnf: ProvenanceDNF) -> Optional[FactorExpr]:
    """
    Read-once form of ``dnf``: an expression using every tuple exactly once,
    or None when no such form exists.

    The formula is first put in absorption normal form. Disconnected parts
    of the term-overlap graph are summed; otherwise, when the complement of
    the tuple co-occurrence graph splits and the terms are exactly the
    Cartesian product of the component projections, the parts are
    multiplied.
    """
    if not dnf.terms:
        raise FactorizationError("Read-once factorization needs a nonempty provenance")
    return _read_once(absorb(dnf.terms))
