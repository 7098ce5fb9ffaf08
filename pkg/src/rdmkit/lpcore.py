"""
Exact rational linear programming.

``solve_lp`` is a two-phase primal simplex on a full tableau over
``fractions.Fraction`` with Bland's rule. ``solve_mip`` runs best-bound
branch-and-bound on top of it. Every returned solution is audited against
the model with exact arithmetic.
"""

import heapq
import logging
import math
import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Literal, Mapping, Optional, Union

from .context import current_node_limit
from .errors import ModelError, NodeLimitError, SolverAuditError, UnboundedModelError

__all__ = (
    "Variable",
    "Constraint",
    "LinearModel",
    "SolveStats",
    "LinearSolution",
    "solve_lp",
    "solve_mip",
    "is_integral",
    "to_lp_format",
    "format_rational",
    "rational_to_dict",
)

logger = logging.getLogger(__name__)

Sense = Literal[">=", "<=", "="]
Number = Union[int, Fraction, str]


def _rational(value: Number, what: str) -> Fraction:
    if isinstance(value, bool) or isinstance(value, float):
        raise ModelError(f"{what} must be an int, Fraction or str for exact arithmetic, got {value!r}")
    try:
        return Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError):
        raise ModelError(f"{what} is not a rational number: {value!r}")


@dataclass(frozen=True)
class Variable:
    name: str
    lower: Fraction = Fraction(0)
    upper: Fraction = Fraction(1)
    integral: bool = False
    objective: Fraction = Fraction(0)


@dataclass(frozen=True)
class Constraint:
    terms: tuple[tuple[str, Fraction], ...]
    sense: Sense
    rhs: Fraction
    name: str = ""

    def activity(self, values: Mapping[str, Fraction]) -> Fraction:
        return sum((coeff * values[name] for name, coeff in self.terms), Fraction(0))

    def satisfied(self, values: Mapping[str, Fraction]) -> bool:
        lhs = self.activity(values)
        if self.sense == ">=":
            return lhs >= self.rhs
        if self.sense == "<=":
            return lhs <= self.rhs
        return lhs == self.rhs


class LinearModel:
    """
    A minimization model over bounded rational variables.

    Variables keep their insertion order; that order is the "variable id"
    used for tie breaking in the solvers.

    Examples
    --------
    Pairwise cover of a triangle::

        m = LinearModel("triangle")
        for v in ("x1", "x2", "x3"):
            m.add_variable(v, 0, 1, integral=True, objective=1)
        m.add_constraint({"x1": 1, "x2": 1}, ">=", 1)
        m.add_constraint({"x2": 1, "x3": 1}, ">=", 1)
        m.add_constraint({"x1": 1, "x3": 1}, ">=", 1)
        solve_lp(m).objective   # Fraction(3, 2)
        solve_mip(m).objective  # Fraction(2, 1)
    """

    def __init__(self, name: str = "model"):
        self.name = name
        self._variables: dict[str, Variable] = {}
        self.constraints: list[Constraint] = []
        self.notes: list[str] = []

    @property
    def variables(self) -> tuple[Variable, ...]:
        return tuple(self._variables.values())

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self._variables)

    @property
    def integral_names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self._variables.values() if v.integral)

    def __contains__(self, name: str) -> bool:
        return name in self._variables

    def variable(self, name: str) -> Variable:
        try:
            return self._variables[name]
        except KeyError:
            raise ModelError(f"Unknown variable {name!r} in model {self.name}")

    def add_variable(
        self,
        name: str,
        lower: Number = 0,
        upper: Number = 1,
        integral: bool = False,
        objective: Number = 0,
    ) -> str:
        if name in self._variables:
            raise ModelError(f"Variable {name!r} already declared in model {self.name}")
        lower = _rational(lower, f"Lower bound of {name}")
        upper = _rational(upper, f"Upper bound of {name}")
        if lower > upper:
            raise ModelError(f"Variable {name!r} has lower bound {lower} above upper bound {upper}")
        self._variables[name] = Variable(
            name, lower, upper, bool(integral), _rational(objective, f"Objective of {name}")
        )
        return name

    def add_constraint(
        self,
        terms: Union[Mapping[str, Number], Iterable[tuple[str, Number]]],
        sense: Sense,
        rhs: Number,
        name: Optional[str] = None,
    ) -> Constraint:
        """Add ``sum(coeff * var) <sense> rhs``. Repeated variables are summed
        and zero coefficients dropped."""
        if sense not in (">=", "<=", "="):
            raise ModelError(f"Constraint sense must be '>=', '<=' or '=', got {sense!r}")
        items = terms.items() if isinstance(terms, Mapping) else terms
        merged: dict[str, Fraction] = {}
        for var, coeff in items:
            if var not in self._variables:
                raise ModelError(f"Constraint references undeclared variable {var!r}")
            merged[var] = merged.get(var, Fraction(0)) + _rational(coeff, f"Coefficient of {var}")
        constraint = Constraint(
            tuple((var, c) for var, c in merged.items() if c != 0),
            sense,
            _rational(rhs, "Right-hand side"),
            name or f"c{len(self.constraints) + 1}",
        )
        self.constraints.append(constraint)
        return constraint

    def _derive(self, variables: dict[str, Variable]) -> "LinearModel":
        model = LinearModel(self.name)
        model._variables = variables
        model.constraints = list(self.constraints)
        model.notes = list(self.notes)
        return model

    def copy(self) -> "LinearModel":
        return self._derive(dict(self._variables))

    def with_bounds(self, bounds: Mapping[str, tuple[Number, Number]]) -> "LinearModel":
        """Copy of the model with the given ``(lower, upper)`` bounds replaced."""
        variables = dict(self._variables)
        for name, (lower, upper) in bounds.items():
            var = self.variable(name)
            lower, upper = _rational(lower, "Lower bound"), _rational(upper, "Upper bound")
            if lower > upper:
                raise ModelError(f"Bounds [{lower}, {upper}] of {name!r} are empty")
            variables[name] = replace(var, lower=lower, upper=upper)
        return self._derive(variables)

    def relaxed(self) -> "LinearModel":
        """Copy with every integrality flag removed."""
        return self._derive({n: replace(v, integral=False) for n, v in self._variables.items()})

    def all_integral(self) -> "LinearModel":
        """Copy with every variable flagged integral."""
        return self._derive({n: replace(v, integral=True) for n, v in self._variables.items()})

    def objective_value(self, values: Mapping[str, Fraction]) -> Fraction:
        return sum((v.objective * values[v.name] for v in self._variables.values()), Fraction(0))

    def violations(self, values: Mapping[str, Fraction]) -> list[str]:
        """Exact feasibility audit: a description of every violated bound or
        constraint, empty when ``values`` is feasible."""
        problems = []
        for var in self._variables.values():
            if var.name not in values:
                problems.append(f"{var.name} has no value")
                continue
            value = values[var.name]
            if not var.lower <= value <= var.upper:
                problems.append(f"{var.name} = {value} outside [{var.lower}, {var.upper}]")
        if problems:
            return problems
        for c in self.constraints:
            if not c.satisfied(values):
                problems.append(f"{c.name}: {c.activity(values)} {c.sense} {c.rhs} violated")
        return problems

    def __repr__(self) -> str:
        return (
            f"LinearModel({self.name}, {len(self._variables)} variables, "
            f"{len(self.constraints)} constraints)"
        )


@dataclass(frozen=True)
class SolveStats:
    """Simplex pivots and LP relaxations solved (branch-and-bound nodes)."""

    iterations: int = 0
    nodes: int = 0


@dataclass(frozen=True)
class LinearSolution:
    status: Literal["optimal", "infeasible"]
    objective: Optional[Fraction]
    values: dict[str, Fraction] = field(default_factory=dict)
    basic: bool = False
    stats: SolveStats = SolveStats()

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"

    def __getitem__(self, name: str) -> Fraction:
        return self.values[name]


class _Tableau:
    """Full simplex tableau with sparse rows (column -> coefficient)."""

    def __init__(self, rows, rhs, basis):
        self.rows: list[dict[int, Fraction]] = rows
        self.rhs: list[Fraction] = rhs
        self.basis: list[int] = basis
        self.costs: dict[int, Fraction] = {}
        self.value = Fraction(0)
        self.iterations = 0

    def set_costs(self, costs: Mapping[int, Fraction]):
        """Install an objective and price out the basic columns."""
        reduced = {j: c for j, c in costs.items() if c != 0}
        value = Fraction(0)
        for row, rhs, basic in zip(self.rows, self.rhs, self.basis):
            cb = costs.get(basic, 0)
            if cb == 0:
                continue
            for j, a in row.items():
                reduced[j] = reduced.get(j, Fraction(0)) - cb * a
            value += cb * rhs
        self.costs = {j: d for j, d in reduced.items() if d != 0}
        self.value = value

    def pivot(self, r: int, s: int):
        row = self.rows[r]
        piv = row[s]
        if piv != 1:
            row = {j: a / piv for j, a in row.items()}
            self.rows[r] = row
            self.rhs[r] /= piv
        rhs_r = self.rhs[r]
        for i, other in enumerate(self.rows):
            if i == r:
                continue
            f = other.get(s)
            if not f:
                continue
            for j, a in row.items():
                updated = other.get(j, Fraction(0)) - f * a
                if updated:
                    other[j] = updated
                else:
                    other.pop(j, None)
            self.rhs[i] -= f * rhs_r
        f = self.costs.get(s)
        if f:
            for j, a in row.items():
                updated = self.costs.get(j, Fraction(0)) - f * a
                if updated:
                    self.costs[j] = updated
                else:
                    self.costs.pop(j, None)
            self.value += f * rhs_r
        self.basis[r] = s
        self.iterations += 1

    def run(self, allowed: int):
        """Bland's rule: lowest-index improving column enters, ties in the
        ratio test leave by lowest basic column index."""
        while True:
            entering = min((j for j, d in self.costs.items() if d < 0 and j < allowed), default=None)
            if entering is None:
                return
            best = None
            for i, row in enumerate(self.rows):
                a = row.get(entering)
                if a is None or a <= 0:
                    continue
                ratio = self.rhs[i] / a
                key = (ratio, self.basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
            if best is None:
                raise UnboundedModelError("Linear model is unbounded below")
            self.pivot(best[1], entering)


def _infeasible(iterations=0) -> LinearSolution:
    return LinearSolution("infeasible", None, {}, False, SolveStats(iterations, 1))


def solve_lp(m: LinearModel) -> LinearSolution:
    """
    Solve the LP relaxation of ``m`` exactly (integrality flags ignored).

    Returns
    -------
    LinearSolution
        An optimal basic solution with exact rational values, or status
        ``infeasible``. ``stats.iterations`` counts simplex pivots.
    """
    variables = m.variables
    fixed = {v.name: v.lower for v in variables if v.lower == v.upper}
    free = [v for v in variables if v.lower != v.upper]
    column = {v.name: j for j, v in enumerate(free)}
    n = len(free)

    # Rows in terms of shifted columns x' = x - lower >= 0.
    raw = []
    for c in m.constraints:
        coeffs, rhs = {}, c.rhs
        for name, a in c.terms:
            if name in fixed:
                rhs -= a * fixed[name]
            else:
                j = column[name]
                coeffs[j] = coeffs.get(j, Fraction(0)) + a
                rhs -= a * free[j].lower
        coeffs = {j: a for j, a in coeffs.items() if a != 0}
        if not coeffs:
            if not Constraint((), c.sense, rhs).satisfied({}):
                logger.debug("Constraint %s is infeasible after fixing variables", c.name)
                return _infeasible()
            continue
        raw.append((coeffs, c.sense, rhs))
    for j, v in enumerate(free):
        raw.append(({j: Fraction(1)}, "<=", v.upper - v.lower))

    # Standard form: slack columns n.., artificial columns after the slacks.
    n_slacks = sum(1 for _, sense, _ in raw if sense != "=")
    art_start = n + n_slacks
    rows, rhs_list, basis = [], [], []
    slack = n
    artificial = art_start
    for coeffs, sense, rhs in raw:
        row = dict(coeffs)
        slack_col = None
        if sense != "=":
            slack_col = slack
            row[slack] = Fraction(1) if sense == "<=" else Fraction(-1)
            slack += 1
        if rhs < 0:
            row = {j: -a for j, a in row.items()}
            rhs = -rhs
        if slack_col is not None and row[slack_col] == 1:
            basis.append(slack_col)
        else:
            row[artificial] = Fraction(1)
            basis.append(artificial)
            artificial += 1
        rows.append(row)
        rhs_list.append(rhs)

    tableau = _Tableau(rows, rhs_list, basis)
    if artificial > art_start:
        tableau.set_costs({j: Fraction(1) for j in range(art_start, artificial)})
        tableau.run(artificial)
        if tableau.value > 0:
            return _infeasible(tableau.iterations)
        # Drive zero-level artificials out of the basis; drop redundant rows.
        r = 0
        while r < len(tableau.rows):
            if tableau.basis[r] >= art_start:
                entering = min((j for j in tableau.rows[r] if j < art_start), default=None)
                if entering is None:
                    del tableau.rows[r], tableau.rhs[r], tableau.basis[r]
                    continue
                tableau.pivot(r, entering)
            r += 1
        for row in tableau.rows:
            for j in [j for j in row if j >= art_start]:
                del row[j]

    tableau.set_costs({j: v.objective for j, v in enumerate(free) if v.objective != 0})
    tableau.run(art_start)

    values = dict(fixed)
    for v in free:
        values[v.name] = v.lower
    for basic, rhs in zip(tableau.basis, tableau.rhs):
        if basic < n:
            values[free[basic].name] += rhs
    values = {v.name: values[v.name] for v in variables}
    solution = LinearSolution(
        "optimal", m.objective_value(values), values, True, SolveStats(tableau.iterations, 1)
    )
    _audit(m, solution)
    return solution


def _audit(m: LinearModel, solution: LinearSolution):
    problems = m.violations(solution.values)
    if problems:
        raise SolverAuditError(
            f"Solution of {m.name} fails the feasibility audit: " + "; ".join(problems[:5])
        )


def _branch_variable(solution: LinearSolution, names: Iterable[str]) -> Optional[str]:
    """Most fractional integral-flagged variable; ties go to the lowest id."""
    best, best_distance = None, None
    half = Fraction(1, 2)
    for name in names:
        value = solution.values[name]
        if value.denominator == 1:
            continue
        distance = abs(value - math.floor(value) - half)
        if best is None or distance < best_distance:
            best, best_distance = name, distance
    return best


def solve_mip(m: LinearModel, node_limit: Optional[int] = None) -> LinearSolution:
    """
    Solve ``m`` with its integrality flags by branch-and-bound.

    Nodes are explored best bound first; the branching variable is the most
    fractional integral variable (lowest id on ties). ``stats.nodes`` counts
    LP relaxations solved, so a model whose root LP is already integral
    returns the ``solve_lp`` solution with one node.

    Parameters
    ----------
    m: (LinearModel)
        Model with ``integral`` flags on the integer subset.
    node_limit: (Optional[int], optional)
        Maximum number of nodes. Defaults to ``current_node_limit()``.
    """
    limit = node_limit if node_limit is not None else current_node_limit()
    integral = m.integral_names
    root = solve_lp(m)
    nodes, iterations = 1, root.stats.iterations
    if not root.optimal:
        return root
    if _branch_variable(root, integral) is None:
        return root

    base = {v.name: (v.lower, v.upper) for v in m.variables}
    heap = [(root.objective, 0, {}, root)]
    counter = 1
    incumbent = None
    while heap:
        bound, _, bounds, solution = heapq.heappop(heap)
        if incumbent is not None and bound >= incumbent.objective:
            break
        name = _branch_variable(solution, integral)
        if name is None:
            incumbent = solution
            logger.debug("Incumbent %s after %d nodes", incumbent.objective, nodes)
            continue
        value = solution.values[name]
        lower, upper = bounds.get(name, base[name])
        for child_range in ((lower, Fraction(math.floor(value))), (Fraction(math.ceil(value)), upper)):
            if child_range[0] > child_range[1]:
                continue
            if nodes >= limit:
                raise NodeLimitError(limit, nodes)
            child_bounds = {**bounds, name: child_range}
            child = solve_lp(m.with_bounds(child_bounds))
            nodes += 1
            iterations += child.stats.iterations
            if not child.optimal:
                continue
            if incumbent is not None and child.objective >= incumbent.objective:
                continue
            heapq.heappush(heap, (child.objective, counter, child_bounds, child))
            counter += 1
    stats = SolveStats(iterations, nodes)
    logger.debug("Branch-and-bound on %s finished: %d nodes, %d pivots", m.name, nodes, iterations)
    if incumbent is None:
        return LinearSolution("infeasible", None, {}, False, stats)
    result = replace(incumbent, stats=stats)
    _audit(m, result)
    return result


def is_integral(s: LinearSolution, names: Optional[Iterable[str]] = None) -> bool:
    """True iff each listed variable has an integer value (all variables when
    ``names`` is None)."""
    if not s.optimal:
        raise ModelError("Integrality is only defined for optimal solutions")
    names = s.values if names is None else names
    return all(s.values[name].denominator == 1 for name in names)


def format_rational(x: Fraction) -> str:
    """Exact decimal text when the denominator divides a power of ten,
    ``p/q`` otherwise."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    den, twos, fives = x.denominator, 0, 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{x.numerator}/{x.denominator}"
    digits = max(twos, fives)
    scaled = abs(x.numerator) * 10**digits // x.denominator
    sign = "-" if x < 0 else ""
    whole, frac = divmod(scaled, 10**digits)
    return f"{sign}{whole}.{frac:0{digits}d}"


def _lp_names(m: LinearModel) -> dict[str, str]:
    names, used = {}, set()
    for var in m.names:
        base = re.sub(r"[^A-Za-z0-9_]", "_", var)
        if not base or not base[0].isalpha():
            base = f"v{base}"
        candidate, suffix = base, 2
        while candidate in used:
            candidate = f"{base}_{suffix}"
            suffix += 1
        used.add(candidate)
        names[var] = candidate
    return names


def _lp_terms(terms, names) -> str:
    parts = []
    for var, coeff in terms:
        sign = "-" if coeff < 0 else "+"
        parts.append(f"{sign} {format_rational(abs(coeff))} {names[var]}")
    return " ".join(parts)


def to_lp_format(m: LinearModel) -> str:
    """CPLEX LP text of ``m`` for cross-checking with external solvers.
    Variable names are sanitized; the original names follow in comments."""
    names = _lp_names(m)
    lines = [f"\\ Model: {m.name}"]
    for var, lp_name in names.items():
        if var != lp_name:
            lines.append(f"\\ {lp_name} = {var}")
    lines.append("Minimize")
    objective = [(v.name, v.objective) for v in m.variables if v.objective != 0]
    lines.append(f" obj: {_lp_terms(objective, names)}" if objective else " obj: 0")
    lines.append("Subject To")
    sense = {">=": ">=", "<=": "<=", "=": "="}
    for c in m.constraints:
        if c.terms:
            lines.append(f" {c.name}: {_lp_terms(c.terms, names)} {sense[c.sense]} {format_rational(c.rhs)}")
        else:
            lines.append(f"\\ {c.name}: 0 {sense[c.sense]} {format_rational(c.rhs)}")
    lines.append("Bounds")
    for v in m.variables:
        if v.lower == v.upper:
            lines.append(f" {names[v.name]} = {format_rational(v.lower)}")
        else:
            lines.append(f" {format_rational(v.lower)} <= {names[v.name]} <= {format_rational(v.upper)}")
    integral = [names[n] for n in m.integral_names]
    if integral:
        lines.append("General")
        lines.append(" " + " ".join(integral))
    lines.append("End")
    return "\n".join(lines) + "\n"


def rational_to_dict(x: Optional[Fraction], digits: int = 12) -> Optional[dict]:
    """JSON form ``{"num", "den", "decimal"}``. Non-terminating decimals are
    truncated to ``digits`` places and end in ``...``."""
    if x is None:
        return None
    x = Fraction(x)
    text = format_rational(x)
    if "/" in text:
        sign = "-" if x < 0 else ""
        whole, rest = divmod(abs(x.numerator) * 10**digits // x.denominator, 10**digits)
        text = f"{sign}{whole}.{rest:0{digits}d}..."
    return {"num": x.numerator, "den": x.denominator, "decimal": text}
