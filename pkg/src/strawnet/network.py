"""Annotated discrete Bayesian networks.

A network is a DAG of discrete variables. Every variable carries a role
(Target, Evidence or Other) and a conditional probability table.

CPT layout
----------
``Cpt.rows`` holds one probability vector over the child's states for every
configuration of the parents. Rows are ordered row-major with the first listed
parent varying slowest. For a child with parents ``(Gender, Age)`` where
``Gender = [male, female]`` and ``Age = [below 30, above 30]``::

    row 0: Gender=male,   Age=below 30
    row 1: Gender=male,   Age=above 30
    row 2: Gender=female, Age=below 30
    row 3: Gender=female, Age=above 30

All objects here are immutable once built.
"""

from __future__ import annotations

import enum
import math
from collections.abc import Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property

from .exceptions import EvidenceError, StructuralError

ROW_SUM_TOL = 1e-6


class Role(str, enum.Enum):
    TARGET = "Target"
    EVIDENCE = "Evidence"
    OTHER = "Other"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Variable:
    """A discrete variable with ordered, named states."""

    name: str
    states: tuple[str, ...]
    role: Role = Role.OTHER

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "role", Role(self.role))

    @property
    def cardinality(self) -> int:
        return len(self.states)

    def index(self, state: str) -> int:
        try:
            return self.states.index(state)
        except ValueError:
            raise EvidenceError(
                f"unknown state {state!r} for variable {self.name!r}; "
                f"expected one of {list(self.states)}"
            ) from None


@dataclass(frozen=True)
class Cpt:
    """Conditional probability table ``P(child | parents)``."""

    child: str
    parents: tuple[str, ...]
    rows: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "parents", tuple(self.parents))
        object.__setattr__(
            self, "rows", tuple(tuple(float(p) for p in row) for row in self.rows)
        )


@dataclass(frozen=True)
class Network:
    """A discrete Bayesian network with role annotations.

    Construction does not validate; call :func:`validate_network` (or
    :func:`check_network`) for a full structural and numeric check.
    ``warnings`` carries construction notes (e.g. undefined straw rows) and
    is ignored by equality.
    """

    name: str
    variables: tuple[Variable, ...]
    cpts: tuple[Cpt, ...]
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "cpts", tuple(self.cpts))
        object.__setattr__(self, "warnings", tuple(self.warnings))

    @cached_property
    def _by_name(self) -> dict[str, Variable]:
        return {v.name: v for v in self.variables}

    @cached_property
    def _cpt_by_child(self) -> dict[str, Cpt]:
        return {c.child: c for c in self.cpts}

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def variable(self, name: str) -> Variable:
        try:
            return self._by_name[name]
        except KeyError:
            raise EvidenceError(f"unknown variable {name!r}") from None

    def cpt(self, name: str) -> Cpt:
        try:
            return self._cpt_by_child[name]
        except KeyError:
            raise StructuralError(f"variable {name!r} has no CPT") from None

    def parents(self, name: str) -> tuple[str, ...]:
        return self.cpt(name).parents

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    def with_role(self, role: Role) -> tuple[Variable, ...]:
        return tuple(v for v in self.variables if v.role is Role(role))

    @property
    def targets(self) -> tuple[Variable, ...]:
        return self.with_role(Role.TARGET)

    @property
    def evidence_variables(self) -> tuple[Variable, ...]:
        return self.with_role(Role.EVIDENCE)

    @property
    def others(self) -> tuple[Variable, ...]:
        return self.with_role(Role.OTHER)

    def replace_cpts(self, cpts: Sequence[Cpt], name: str | None = None) -> Network:
        return Network(name or self.name, self.variables, tuple(cpts))

    def renormalized(self) -> Network:
        """Copy with every CPT row rescaled to sum to one."""
        cpts = []
        for cpt in self.cpts:
            rows = []
            for row in cpt.rows:
                total = math.fsum(row)
                rows.append(tuple(p / total for p in row) if total > 0 else row)
            cpts.append(Cpt(cpt.child, cpt.parents, tuple(rows)))
        return self.replace_cpts(cpts)

    def isclose(self, other: Network, atol: float = 1e-12) -> bool:
        """Structural equality with CPT entries compared to ``atol``."""
        if self.name != other.name or self.variables != other.variables:
            return False
        if len(self.cpts) != len(other.cpts):
            return False
        for a, b in zip(self.cpts, other.cpts):
            if a.child != b.child or a.parents != b.parents:
                return False
            if len(a.rows) != len(b.rows):
                return False
            for ra, rb in zip(a.rows, b.rows):
                if len(ra) != len(rb):
                    return False
                if any(abs(x - y) > atol for x, y in zip(ra, rb)):
                    return False
        return True


class Evidence(Mapping):
    """Immutable partial assignment ``variable name -> state name``."""

    def __init__(self, assignments: Mapping[str, str] | None = None, **kwargs: str):
        data = dict(assignments or {})
        data.update(kwargs)
        self._data = data

    def __getitem__(self, key: str) -> str:
        return self._data[key]

    def __iter__(self) -> Iterator[str]:
        return iter(self._data)

    def __len__(self) -> int:
        return len(self._data)

    def __hash__(self):
        return hash(frozenset(self._data.items()))

    def __repr__(self):
        inner = ", ".join(f"{k}={v}" for k, v in self._data.items())
        return f"Evidence({inner})"

    def merged(self, other: Mapping[str, str]) -> Evidence:
        data = dict(self._data)
        data.update(other)
        return Evidence(data)


def as_evidence(net: Network, findings: Mapping[str, str] | None) -> Evidence:
    """Validate ``findings`` against ``net`` and wrap them as :class:`Evidence`."""
    findings = Evidence(findings or {})
    for name, state in findings.items():
        net.variable(name).index(state)
    return findings


@dataclass(frozen=True)
class Violation:
    kind: str
    variable: str | None
    message: str

    def __str__(self):
        where = f"[{self.variable}] " if self.variable is not None else ""
        return f"{self.kind}: {where}{self.message}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __len__(self):
        return len(self.violations)

    def __iter__(self):
        return iter(self.violations)

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def __str__(self):
        if self.ok:
            return "network is well-formed"
        return "\n".join(str(v) for v in self.violations)


def validate_network(net: Network, tol: float = ROW_SUM_TOL) -> ValidationReport:
    """Collect every structural and numeric problem in ``net``.

    Violations are returned as data; the report is empty iff the network is
    well-formed.
    """
    out: list[Violation] = []

    def bad(kind, variable, message):
        out.append(Violation(kind, variable, message))

    seen: dict[str, Variable] = {}
    for var in net.variables:
        if var.name in seen:
            bad("duplicate-variable", var.name, "declared more than once")
            continue
        seen[var.name] = var
        if len(var.states) < 2:
            bad("states", var.name, "needs at least two states")
        if len(set(var.states)) != len(var.states):
            bad("states", var.name, "state names are not unique")

    cpts: dict[str, Cpt] = {}
    for cpt in net.cpts:
        if cpt.child not in seen:
            bad("dangling-child", cpt.child, "CPT for an undeclared variable")
        elif cpt.child in cpts:
            bad("duplicate-cpt", cpt.child, "more than one CPT")
        else:
            cpts[cpt.child] = cpt
    for name in seen:
        if name not in cpts:
            bad("missing-cpt", name, "no CPT")

    for name, cpt in cpts.items():
        if len(set(cpt.parents)) != len(cpt.parents):
            bad("duplicate-parent", name, "a parent is listed twice")
        dangling = [p for p in cpt.parents if p not in seen]
        for p in dangling:
            bad("dangling-parent", name, f"unknown parent {p!r}")
        if dangling:
            continue
        child = seen[name]
        n_rows = math.prod(seen[p].cardinality for p in cpt.parents)
        if len(cpt.rows) != n_rows:
            bad("dimensions", name, f"expected {n_rows} rows, found {len(cpt.rows)}")
        for r, row in enumerate(cpt.rows):
            if len(row) != child.cardinality:
                bad(
                    "dimensions",
                    name,
                    f"row {r} has {len(row)} entries, expected {child.cardinality}",
                )
                continue
            if any(not (0.0 <= p <= 1.0) for p in row):
                bad("range", name, f"row {r} has an entry outside [0, 1]")
            total = math.fsum(row)
            if not abs(total - 1.0) <= tol:
                bad("row-sum", name, f"row {r} sums to {total:.12g}")

    cycle = _find_cycle({n: [p for p in c.parents if p in seen] for n, c in cpts.items()})
    if cycle:
        bad("cycle", cycle[0], " -> ".join(cycle))
    return ValidationReport(tuple(out))


def check_network(net: Network) -> Network:
    """Return ``net`` unchanged or raise :class:`StructuralError` listing its violations."""
    report = validate_network(net)
    if not report.ok:
        raise StructuralError(f"invalid network {net.name!r}:\n{report}")
    return net


def _find_cycle(parents: Mapping[str, Sequence[str]]) -> list[str] | None:
    WHITE, GREY, BLACK = 0, 1, 2
    colour = dict.fromkeys(parents, WHITE)
    stack: list[str] = []

    def visit(node):
        colour[node] = GREY
        stack.append(node)
        for p in parents.get(node, ()):
            if colour.get(p) == GREY:
                return stack[stack.index(p):] + [p]
            if colour.get(p) == WHITE:
                found = visit(p)
                if found:
                    return found
        stack.pop()
        colour[node] = BLACK
        return None

    for node in parents:
        if colour[node] == WHITE:
            found = visit(node)
            if found:
                # reported in edge direction parent -> child
                return found[::-1]
    return None


def topological_order(net: Network) -> tuple[str, ...]:
    """Variables ordered so each follows all of its parents.

    Ties are broken by declaration order, so the result is deterministic.
    """
    remaining = list(net.names)
    placed: set[str] = set()
    order: list[str] = []
    while remaining:
        for i, name in enumerate(remaining):
            if all(p in placed for p in net.parents(name)):
                break
        else:
            raise StructuralError(
                f"cycle among variables {remaining} in network {net.name!r}"
            )
        order.append(name)
        placed.add(name)
        del remaining[i]
    return tuple(order)


def cpt_row_index(
    parents: Sequence[Variable], config: Sequence[str] | Mapping[str, str]
) -> int:
    """Row index of a parent configuration (first parent slowest)."""
    if isinstance(config, Mapping):
        config = [config[p.name] for p in parents]
    if len(config) != len(parents):
        raise EvidenceError(
            f"configuration has {len(config)} states for {len(parents)} parents"
        )
    index = 0
    for var, state in zip(parents, config):
        index = index * var.cardinality + var.index(state)
    return index


def row_config(parents: Sequence[Variable], index: int) -> tuple[str, ...]:
    """Inverse of :func:`cpt_row_index`."""
    n_rows = math.prod(p.cardinality for p in parents)
    if not 0 <= index < n_rows:
        raise IndexError(f"row {index} out of range for {n_rows} rows")
    states = []
    for var in reversed(parents):
        index, k = divmod(index, var.cardinality)
        states.append(var.states[k])
    return tuple(reversed(states))
