"""
Query matches (witnesses) and the boolean provenance they induce.
"""

from collections import defaultdict
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Optional

from .instance import Instance, TupleRef
from .qlang import Query

__all__ = ("Witness", "ProvenanceDNF", "enumerate_witnesses", "provenance_dnf", "absorb")


@dataclass(frozen=True)
class Witness:
    """
    One satisfying assignment of a query.

    Parameters
    ----------
    assignment: (tuple[tuple[str, str], ...])
        ``(variable, value)`` pairs in the query's variable order.
    support: (tuple[str, ...])
        Tuple id used by each atom, indexed by atom position.
    """

    assignment: tuple[tuple[str, str], ...]
    support: tuple[str, ...]

    @property
    def values(self) -> dict[str, str]:
        return dict(self.assignment)

    def value(self, variable: str) -> str:
        for name, value in self.assignment:
            if name == variable:
                return value
        raise KeyError(variable)

    @property
    def tuple_set(self) -> frozenset[str]:
        return frozenset(self.support)

    def __str__(self) -> str:
        body = ", ".join(f"{k}={v}" for k, v in self.assignment)
        return f"{{{body}}}"


@dataclass(frozen=True)
class ProvenanceDNF:
    """
    Monotone DNF over tuple ids: one term per distinct witness tuple set.

    ``witnesses[i]`` is the representative witness of ``terms[i]``; its
    ``support`` is the per-atom map kept for factorization.
    """

    terms: tuple[frozenset[str], ...]
    witnesses: tuple[Witness, ...]

    @property
    def atom_support(self) -> tuple[tuple[str, ...], ...]:
        return tuple(w.support for w in self.witnesses)

    @property
    def tuples(self) -> tuple[str, ...]:
        """Distinct tuple ids of the formula, sorted."""
        return tuple(sorted(set().union(*self.terms))) if self.terms else ()

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def to_text(self, label: Optional[Callable[[str], str]] = None) -> str:
        """Sum-of-products text, e.g. ``o1*s1*a1*d1 + o1*s1*a2*d2``."""
        label = label or str
        if not self.terms:
            return "0"
        return " + ".join(
            "*".join(label(tid) for tid in dict.fromkeys(witness.support))
            for witness in self.witnesses
        )


def _atom_plan(q: Query):
    """For each atom in textual order: positions checked through the hash index
    (constants and variables bound earlier), positions that bind new
    variables, and positions repeating a variable bound in the same atom."""
    bound = set()
    plans = []
    for atom in q.atoms:
        keyed, binds, repeats = [], [], []
        local = {}
        for pos, term in enumerate(atom.terms):
            if not term.is_variable:
                keyed.append((pos, term.text, None))
            elif term.name in bound:
                keyed.append((pos, None, term.name))
            elif term.name in local:
                repeats.append((pos, local[term.name]))
            else:
                local[term.name] = pos
                binds.append((pos, term.name))
        bound.update(local)
        plans.append((tuple(keyed), tuple(binds), tuple(repeats)))
    return plans


def _index(rows: Iterable[TupleRef], keyed) -> Mapping[tuple, list[TupleRef]]:
    index = defaultdict(list)
    for t in rows:
        index[tuple(t.values[pos] for pos, _, _ in keyed)].append(t)
    return index


def enumerate_witnesses(q: Query, inst: Instance) -> list[Witness]:
    """
    All assignments of ``q`` satisfied by ``inst``, each with its support.

    Backtracking over atoms in textual order; each atom is probed through a
    hash index on its bound positions. The result is sorted by assignment
    values in the query's variable order.
    """
    plans = _atom_plan(q)
    indexes = [_index(inst.relation(atom.relation), plan[0]) for atom, plan in zip(q.atoms, plans)]
    variables = q.variables
    found = []

    def search(i: int, binding: dict, support: list):
        if i == len(q.atoms):
            found.append(
                Witness(tuple((v, binding[v]) for v in variables), tuple(support))
            )
            return
        keyed, binds, repeats = plans[i]
        key = tuple(const if var is None else binding[var] for _, const, var in keyed)
        for t in indexes[i].get(key, ()):
            if any(t.values[pos] != t.values[first] for pos, first in repeats):
                continue
            for pos, var in binds:
                binding[var] = t.values[pos]
            support.append(t.id)
            search(i + 1, binding, support)
            support.pop()
        for _, var in binds:
            binding.pop(var, None)

    search(0, {}, [])
    found.sort(key=lambda w: (tuple(v for _, v in w.assignment), w.support))
    return found


def provenance_dnf(witnesses: Iterable[Witness]) -> ProvenanceDNF:
    """Provenance of a boolean query: witnesses with equal tuple sets merge
    into one term, the first witness of each term is kept as representative."""
    terms, representatives, seen = [], [], set()
    for w in witnesses:
        term = w.tuple_set
        if term in seen:
            continue
        seen.add(term)
        terms.append(term)
        representatives.append(w)
    return ProvenanceDNF(tuple(terms), tuple(representatives))


def absorb(terms: Iterable[frozenset]) -> frozenset[frozenset]:
    """Absorption normal form of a monotone DNF: drop duplicate terms and every
    term that strictly contains another term."""
    unique = sorted(set(terms), key=len)
    kept = []
    for term in unique:
        if not any(other < term for other in kept):
            kept.append(term)
    return frozenset(kept)
