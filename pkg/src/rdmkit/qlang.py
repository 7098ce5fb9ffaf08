"""
Conjunctive query data model and the ``.dl`` text format.

A query file holds one boolean rule and optional exogenous declarations::

    % Oscar-winning actors in movies directed by their spouse
    exogenous: DirectedBy.
    q() :- Oscar(a), ActsIn(a, m), DirectedBy(m, d), Spouse(a, d).

The grammar is documented in ``docs/source/formats.md``.
"""

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal, Union

from .errors import (
    ExogenousQueryError,
    QueryArityError,
    QueryError,
    QueryHeadError,
    QuerySyntaxError,
    UnknownVariableError,
)

__all__ = (
    "Term",
    "Atom",
    "Query",
    "parse_query",
    "load_query",
    "format_query",
    "is_self_join_free",
    "atoms_of_variable",
)

VARIABLE_PATTERN = re.compile(r"[a-z][a-zA-Z0-9_]*")


@dataclass(frozen=True)
class Term:
    """A variable or a constant in an atom. Constants are strings or integers
    and match instance values through their string form."""

    kind: Literal["variable", "constant"]
    name: Union[str, int]

    def __post_init__(self):
        if self.kind == "variable":
            if not isinstance(self.name, str) or not VARIABLE_PATTERN.fullmatch(self.name):
                raise QueryError(f"Invalid variable name {self.name!r}")
        elif self.kind == "constant":
            if isinstance(self.name, bool) or not isinstance(self.name, (str, int)):
                raise QueryError(f"Constants must be strings or integers, got {self.name!r}")
        else:
            raise QueryError(f"Unknown term kind {self.kind!r}")

    @classmethod
    def var(cls, name: str) -> "Term":
        return cls("variable", name)

    @classmethod
    def const(cls, value: Union[str, int]) -> "Term":
        return cls("constant", value)

    @property
    def is_variable(self) -> bool:
        return self.kind == "variable"

    @property
    def text(self) -> str:
        """Value compared against instance values (constants only)."""
        return str(self.name)

    def __str__(self) -> str:
        if self.is_variable or isinstance(self.name, int):
            return str(self.name)
        quote = '"' if "'" in self.name else "'"
        return f"{quote}{self.name}{quote}"


@dataclass(frozen=True)
class Atom:
    relation: str
    terms: tuple[Term, ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if len(self.terms) == 0:
            raise QueryArityError(f"Atom {self.relation} must have at least one term")

    @property
    def arity(self) -> int:
        return len(self.terms)

    @property
    def variables(self) -> tuple[str, ...]:
        """Distinct variable names of the atom in order of first occurrence."""
        return tuple(dict.fromkeys(t.name for t in self.terms if t.is_variable))

    def __str__(self) -> str:
        return f"{self.relation}({', '.join(str(t) for t in self.terms)})"


@dataclass(frozen=True)
class Query:
    """
    A boolean conjunctive query.

    Parameters
    ----------
    atoms: (tuple[Atom, ...])
        The body atoms in textual order.
    exogenous: (frozenset[str], optional)
        Relations whose tuples may not be deleted. Defaults to none.
    head: (str, optional)
        Name of the (nullary) head predicate. Defaults to ``"q"``.
    """

    atoms: tuple[Atom, ...]
    exogenous: frozenset = field(default_factory=frozenset)
    head: str = "q"

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))
        object.__setattr__(self, "exogenous", frozenset(self.exogenous))
        if not self.atoms:
            raise QueryError("A query needs at least one atom")
        arities = {}
        for atom in self.atoms:
            known = arities.setdefault(atom.relation, atom.arity)
            if known != atom.arity:
                raise QueryArityError(
                    f"Relation {atom.relation} used with arity {known} and {atom.arity}"
                )
        unknown = self.exogenous - set(arities)
        if unknown:
            raise ExogenousQueryError(
                f"Exogenous relation(s) {', '.join(sorted(unknown))} do not occur in the query"
            )
        if all(atom.relation in self.exogenous for atom in self.atoms):
            raise ExogenousQueryError("At least one atom of the query must be endogenous")

    @property
    def variables(self) -> tuple[str, ...]:
        """All variable names in order of first occurrence."""
        return tuple(dict.fromkeys(v for atom in self.atoms for v in atom.variables))

    @property
    def relations(self) -> tuple[str, ...]:
        """Relation names in order of first occurrence."""
        return tuple(dict.fromkeys(atom.relation for atom in self.atoms))

    @property
    def endogenous_atoms(self) -> tuple[int, ...]:
        return tuple(i for i, atom in enumerate(self.atoms) if atom.relation not in self.exogenous)

    @property
    def has_constants(self) -> bool:
        return any(not t.is_variable for atom in self.atoms for t in atom.terms)

    def arity(self, relation: str) -> int:
        for atom in self.atoms:
            if atom.relation == relation:
                return atom.arity
        raise QueryError(f"Relation {relation} does not occur in the query")

    def is_exogenous(self, relation: str) -> bool:
        return relation in self.exogenous

    def repeated_relations(self) -> tuple[str, ...]:
        """Relations that occur in more than one atom, sorted by name."""
        seen, repeated = set(), set()
        for atom in self.atoms:
            (repeated if atom.relation in seen else seen).add(atom.relation)
        return tuple(sorted(repeated))

    def __str__(self) -> str:
        return format_query(self).strip()


def is_self_join_free(q: Query) -> bool:
    """True iff no relation name occurs in two distinct atoms of ``q``."""
    return not q.repeated_relations()


def atoms_of_variable(q: Query, v: str) -> frozenset[int]:
    """Indices of the atoms of ``q`` whose terms contain variable ``v``."""
    if v not in q.variables:
        raise UnknownVariableError(f"Variable {v!r} does not occur in the query")
    return frozenset(i for i, atom in enumerate(q.atoms) if v in atom.variables)


def format_query(q: Query) -> str:
    """Canonical ``.dl`` text of ``q``; ``parse_query`` reads it back unchanged."""
    lines = []
    if q.exogenous:
        lines.append(f"exogenous: {', '.join(sorted(q.exogenous))}.")
    lines.append(f"{q.head}() :- {', '.join(str(atom) for atom in q.atoms)}.")
    return "\n".join(lines) + "\n"


def load_query(path: Union[str, Path]) -> Query:
    """Parse the ``.dl`` file at ``path``."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as error:
        raise QueryError(f"Cannot read query file {path}: {error}")
    return parse_query(text)


_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>%[^\n]*)
  | (?P<implies>:-)
  | (?P<colon>:)
  | (?P<lparen>\()
  | (?P<rparen>\))
  | (?P<comma>,)
  | (?P<period>\.)
  | (?P<int>-?[0-9]+)
  | (?P<string>'[^'\n]*'|"[^"\n]*")
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None:
            raise QuerySyntaxError(
                f"unexpected character {text[pos]!r}", line, pos - line_start + 1, text
            )
        kind = match.lastgroup
        if kind not in ("ws", "comment"):
            tokens.append(_Token(kind, match.group(), line, pos - line_start + 1))
        chunk = match.group()
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_start = pos + chunk.rindex("\n") + 1
        pos = match.end()
    tokens.append(_Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    @property
    def current(self) -> _Token:
        return self.tokens[self.pos]

    def error(self, message, token=None):
        token = token or self.current
        return QuerySyntaxError(message, token.line, token.column, self.text)

    def expect(self, kind, what=None) -> _Token:
        token = self.current
        if token.kind != kind:
            found = "end of input" if token.kind == "eof" else repr(token.text)
            raise self.error(f"expected {what or kind}, found {found}")
        self.pos += 1
        return token

    def parse(self) -> Query:
        exogenous = []
        rule = None
        while self.current.kind != "eof":
            token = self.current
            if (
                token.kind == "ident"
                and token.text == "exogenous"
                and self.tokens[self.pos + 1].kind == "colon"
            ):
                exogenous.extend(self.parse_exogenous())
            elif rule is None:
                rule = self.parse_rule()
            else:
                raise self.error("only one rule is allowed per query file")
        if rule is None:
            raise self.error("expected a rule of the form q() :- Atom, ... .")
        head, atoms = rule
        return Query(tuple(atoms), frozenset(exogenous), head)

    def parse_exogenous(self) -> list[str]:
        self.expect("ident")
        self.expect("colon", "':'")
        names = [self.expect("ident", "relation name").text]
        while self.current.kind == "comma":
            self.pos += 1
            names.append(self.expect("ident", "relation name").text)
        self.expect("period", "'.'")
        return names

    def parse_rule(self):
        head = self.expect("ident", "rule head")
        self.expect("lparen", "'('")
        if self.current.kind != "rparen":
            raise QueryHeadError(
                f"Only boolean queries are supported; head {head.text}(...) at line "
                f"{head.line} has arguments"
            )
        self.expect("rparen", "')'")
        self.expect("implies", "':-'")
        atoms = [self.parse_atom()]
        while self.current.kind == "comma":
            self.pos += 1
            atoms.append(self.parse_atom())
        self.expect("period", "'.' ending the rule")
        return head.text, atoms

    def parse_atom(self) -> Atom:
        relation = self.expect("ident", "relation name")
        self.expect("lparen", "'('")
        if self.current.kind == "rparen":
            raise self.error(f"atom {relation.text} needs at least one term")
        terms = [self.parse_term()]
        while self.current.kind == "comma":
            self.pos += 1
            terms.append(self.parse_term())
        self.expect("rparen", "')'")
        return Atom(relation.text, tuple(terms))

    def parse_term(self) -> Term:
        token = self.current
        if token.kind == "int":
            value = int(token.text)
            # Instance values match through str(value), so the literal must round-trip
            if str(value) != token.text:
                raise self.error(
                    f"integer constant {token.text} is not in canonical form; "
                    f"write {value} or quote it as '{token.text}'"
                )
            self.pos += 1
            return Term.const(value)
        if token.kind == "string":
            self.pos += 1
            return Term.const(token.text[1:-1])
        if token.kind == "ident":
            if not VARIABLE_PATTERN.fullmatch(token.text):
                raise self.error(
                    f"variable {token.text!r} must start with a lowercase letter; quote constants"
                )
            self.pos += 1
            return Term.var(token.text)
        raise self.error("expected a variable or a constant")


def parse_query(text: str) -> Query:
    """
    Parse the ``.dl`` text of a boolean conjunctive query.

    Parameters
    ----------
    text: (str)
        One rule ``q() :- Atom1, ..., AtomK.``, optional ``exogenous: R1, R2.``
        lines and ``%`` comments.

    Returns
    -------
    Query
        Atoms in textual order with the exogenous set populated.

    Examples
    --------
    Parsing the 2-chain::

        q = parse_query("q() :- R(x,y), S(y,z).")
        q.variables  # ('x', 'y', 'z')
    """
    return _Parser(text).parse()
