"""
Database instances under set or bag semantics.

Every relation is stored in ``<Relation>.csv`` with a header ``c1,...,ck``
and, under bag semantics, a trailing ``_mult`` column. Tuples are identified
by ``Relation:row`` where ``row`` is the 1-based data row of the file.
"""

import csv
import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Iterator, Literal, Mapping, Optional, Union
from warnings import warn

import numpy as np

from .errors import DataError, MalformedDataError, MissingRelationError, UnknownTupleError
from .qlang import Query
from .warnings import DuplicateRowWarning, MultiplicityIgnoredWarning

__all__ = (
    "Semantics",
    "TupleRef",
    "Instance",
    "load_instance",
    "save_instance",
    "random_instance",
    "delete_tuples",
    "instance_to_dict",
    "instance_from_dict",
    "dumps_instance",
)

Semantics = Literal["set", "bag"]
MULT_COLUMN = "_mult"


def _check_semantics(semantics):
    if semantics not in ("set", "bag"):
        raise DataError(f"Semantics must be 'set' or 'bag', got {semantics!r}")


@dataclass(frozen=True)
class TupleRef:
    """One physical tuple. Bag copies share a single ``TupleRef`` whose
    ``multiplicity`` counts them."""

    relation: str
    row: int
    values: tuple[str, ...]
    multiplicity: int = 1

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(str(v) for v in self.values))
        if self.row < 1:
            raise DataError(f"Row numbers start at 1, got {self.row} in {self.relation}")
        if self.multiplicity < 1:
            raise DataError(f"Multiplicity of {self.id} must be positive, got {self.multiplicity}")

    @property
    def id(self) -> str:
        return f"{self.relation}:{self.row}"

    def __str__(self) -> str:
        return self.id


@dataclass(frozen=True)
class Instance:
    """
    A database instance: named relations of ``TupleRef`` values.

    Parameters
    ----------
    relations: (Mapping[str, tuple[TupleRef, ...]])
        Tuples of each relation ordered by row.
    arities: (Mapping[str, int])
        Arity of each relation, needed for empty relations.
    semantics: ({"set", "bag"}, optional)
        Under set semantics every multiplicity is 1. Defaults to "set".
    """

    relations: Mapping[str, tuple[TupleRef, ...]]
    arities: Mapping[str, int]
    semantics: Semantics = "set"

    def __post_init__(self):
        _check_semantics(self.semantics)
        relations = {name: tuple(rows) for name, rows in self.relations.items()}
        object.__setattr__(self, "relations", MappingProxyType(relations))
        object.__setattr__(self, "arities", MappingProxyType(dict(self.arities)))
        for name, rows in relations.items():
            if name not in self.arities:
                raise DataError(f"Missing arity for relation {name}")
            seen_rows, seen_values = set(), set()
            for t in rows:
                if t.relation != name:
                    raise DataError(f"Tuple {t.id} stored under relation {name}")
                if len(t.values) != self.arities[name]:
                    raise DataError(
                        f"Tuple {t.id} has {len(t.values)} values, arity is {self.arities[name]}"
                    )
                if self.semantics == "set" and t.multiplicity != 1:
                    raise DataError(f"Tuple {t.id} has multiplicity {t.multiplicity} under set semantics")
                if t.row in seen_rows:
                    raise DataError(f"Duplicate tuple id {t.id}")
                if t.values in seen_values:
                    raise DataError(f"Relation {name} repeats values {t.values}")
                seen_rows.add(t.row)
                seen_values.add(t.values)

    @cached_property
    def _by_id(self) -> dict[str, TupleRef]:
        return {t.id: t for rows in self.relations.values() for t in rows}

    def __contains__(self, tid: str) -> bool:
        return tid in self._by_id

    def get(self, tid: str) -> TupleRef:
        try:
            return self._by_id[tid]
        except KeyError:
            raise UnknownTupleError([tid])

    def relation(self, name: str) -> tuple[TupleRef, ...]:
        try:
            return self.relations[name]
        except KeyError:
            raise MissingRelationError(f"Relation {name} is not part of the instance")

    def tuples(self, relation: Optional[str] = None) -> Iterator[TupleRef]:
        if relation is not None:
            yield from self.relation(relation)
            return
        for rows in self.relations.values():
            yield from rows

    def endogenous_tuples(self, q: Query) -> tuple[TupleRef, ...]:
        """Tuples that may be deleted: the relations of ``q`` that are not
        exogenous, in query order then row order."""
        return tuple(
            t for name in q.relations if not q.is_exogenous(name) for t in self.relation(name)
        )

    def weight(self, tid: str, semantics: Optional[Semantics] = None) -> int:
        """Deletion cost of a tuple: 1 under set semantics, its multiplicity
        under bag semantics."""
        semantics = semantics or self.semantics
        return self.get(tid).multiplicity if semantics == "bag" else 1

    def __len__(self) -> int:
        return len(self._by_id)


def _collapse(relation, rows, semantics):
    """Merge duplicate value rows: first row number wins, bag multiplicities add up."""
    merged: dict[tuple, list] = {}
    for row, values, mult in rows:
        if values in merged:
            merged[values][2].append(row)
            merged[values][1] += mult
        else:
            merged[values] = [row, mult, [row]]
    out = []
    for values, (row, mult, all_rows) in merged.items():
        if len(all_rows) > 1:
            warn(DuplicateRowWarning(relation, values, all_rows, semantics))
        out.append(TupleRef(relation, row, values, mult if semantics == "bag" else 1))
    return tuple(sorted(out, key=lambda t: t.row))


def _read_relation(path: Path, relation: str, semantics: Semantics):
    try:
        with path.open(newline="", encoding="utf-8") as handle:
            records = list(csv.reader(handle))
    except (OSError, UnicodeDecodeError, csv.Error) as error:
        raise MalformedDataError(f"Cannot read {path}: {error}")
    if not records:
        raise MalformedDataError(f"{path} has no header row")
    header = [h.strip() for h in records[0]]
    has_mult = bool(header) and header[-1] == MULT_COLUMN
    columns = header[:-1] if has_mult else header
    expected = [f"c{i}" for i in range(1, len(columns) + 1)]
    if not columns or columns != expected:
        raise MalformedDataError(f"{path}: header must be {','.join(expected or ['c1'])}[,_mult]")
    if has_mult and semantics == "set":
        warn(MultiplicityIgnoredWarning(relation))
    rows = []
    for number, record in enumerate(records[1:], start=1):
        if len(record) != len(header):
            raise MalformedDataError(
                f"{path}: row {number} has {len(record)} fields, expected {len(header)}"
            )
        values = tuple(record[: len(columns)])
        mult = 1
        if has_mult:
            try:
                mult = int(record[-1])
            except ValueError:
                raise MalformedDataError(f"{path}: row {number} has non-integer _mult {record[-1]!r}")
            if mult < 1:
                raise MalformedDataError(f"{path}: row {number} has non-positive _mult {mult}")
        rows.append((number, values, mult))
    return len(columns), _collapse(relation, rows, semantics)


def load_instance(
    directory: Union[str, Path], semantics: Semantics = "set", query: Optional[Query] = None
) -> Instance:
    """
    Load ``<Relation>.csv`` files from ``directory``.

    Parameters
    ----------
    directory: (Union[str, Path])
        Directory holding one CSV file per relation.
    semantics: ({"set", "bag"}, optional)
        Under bag semantics the optional ``_mult`` column gives multiplicities
        (default 1). Defaults to "set".
    query: (Optional[Query], optional)
        When given, exactly the relations of the query are loaded and each
        must exist with the query's arity. Otherwise every ``*.csv`` file is
        loaded.
    """
    _check_semantics(semantics)
    directory = Path(directory)
    if not directory.is_dir():
        raise MissingRelationError(f"Data directory {directory} does not exist")
    if query is None:
        names = sorted(p.stem for p in directory.glob("*.csv"))
    else:
        names = list(query.relations)
    relations, arities = {}, {}
    for name in names:
        path = directory / f"{name}.csv"
        if not path.is_file():
            raise MissingRelationError(f"Missing relation file {path}")
        arity, rows = _read_relation(path, name, semantics)
        if query is not None and arity != query.arity(name):
            raise MalformedDataError(
                f"{path} has arity {arity}, the query uses {name} with arity {query.arity(name)}"
            )
        relations[name] = rows
        arities[name] = arity
    return Instance(relations, arities, semantics)


def save_instance(inst: Instance, directory: Union[str, Path]):
    """Write ``inst`` as canonical CSV files (``_mult`` only under bag
    semantics). Row numbers are not stored: rows are written in order."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for name, rows in inst.relations.items():
        header = [f"c{i}" for i in range(1, inst.arities[name] + 1)]
        if inst.semantics == "bag":
            header.append(MULT_COLUMN)
        with (directory / f"{name}.csv").open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            for t in rows:
                record = list(t.values)
                if inst.semantics == "bag":
                    record.append(str(t.multiplicity))
                writer.writerow(record)


def instance_to_dict(inst: Instance) -> dict:
    """JSON-ready mapping mirroring the CSV schema."""
    return {
        "semantics": inst.semantics,
        "relations": {
            name: {
                "columns": [f"c{i}" for i in range(1, inst.arities[name] + 1)],
                "rows": [
                    {"id": t.id, "values": list(t.values), "multiplicity": t.multiplicity}
                    for t in rows
                ],
            }
            for name, rows in inst.relations.items()
        },
    }


def instance_from_dict(data: Mapping) -> Instance:
    """Inverse of ``instance_to_dict``."""
    try:
        semantics = data["semantics"]
        relations, arities = {}, {}
        for name, rel in data["relations"].items():
            arities[name] = len(rel["columns"])
            relations[name] = tuple(
                TupleRef(name, int(row["id"].rsplit(":", 1)[1]), tuple(row["values"]), int(row["multiplicity"]))
                for row in rel["rows"]
            )
    except (KeyError, TypeError, ValueError, IndexError, AttributeError) as error:
        raise MalformedDataError(f"Malformed instance JSON: {error}")
    return Instance(relations, arities, semantics)


def random_instance(
    q: Query,
    tuples_per_relation: int,
    domain_size: int,
    seed: int,
    semantics: Semantics = "set",
) -> Instance:
    """
    Seeded random instance for the relations of ``q``.

    Values are drawn uniformly from ``c1..c<domain_size>`` per position and
    bag multiplicities uniformly from 1..3. Duplicate draws keep their first
    occurrence, so a relation may hold fewer than ``tuples_per_relation``
    tuples. The result is a pure function of the arguments.
    """
    _check_semantics(semantics)
    if tuples_per_relation < 0:
        raise ValueError(f"tuples_per_relation must be non-negative, got {tuples_per_relation}")
    if domain_size < 1:
        raise ValueError(f"domain_size must be at least 1, got {domain_size}")
    rng = np.random.default_rng(seed)
    relations, arities = {}, {}
    for name in q.relations:
        arity = q.arity(name)
        draws = rng.integers(1, domain_size + 1, size=(tuples_per_relation, arity))
        mults = (
            rng.integers(1, 4, size=tuples_per_relation)
            if semantics == "bag"
            else np.ones(tuples_per_relation, dtype=int)
        )
        rows, seen = [], set()
        for draw, mult in zip(draws, mults):
            values = tuple(f"c{int(v)}" for v in draw)
            if values in seen:
                continue
            seen.add(values)
            rows.append(TupleRef(name, len(rows) + 1, values, int(mult)))
        relations[name] = tuple(rows)
        arities[name] = arity
    return Instance(relations, arities, semantics)


def delete_tuples(inst: Instance, ids: Iterable[Union[str, TupleRef]]) -> Instance:
    """Return a new instance without the named tuples (all copies). Tuple ids
    of the remaining tuples are unchanged."""
    ids = {t.id if isinstance(t, TupleRef) else t for t in ids}
    unknown = [tid for tid in ids if tid not in inst]
    if unknown:
        raise UnknownTupleError(unknown)
    if not ids:
        return inst
    relations = {
        name: tuple(t for t in rows if t.id not in ids) for name, rows in inst.relations.items()
    }
    return Instance(relations, inst.arities, inst.semantics)


def dumps_instance(inst: Instance) -> str:
    """JSON text of ``instance_to_dict``."""
    return json.dumps(instance_to_dict(inst), indent=2)
