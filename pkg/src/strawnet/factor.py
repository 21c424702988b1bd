"""Discrete factors over named variables.

A factor stores its table as an ``ndarray`` with one axis per scope variable,
in scope order. Flattening in C order gives the same row-major layout as a CPT
(first variable slowest).
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from .exceptions import NetworkError
from .network import Cpt, Network, Variable


@dataclass(frozen=True, eq=False)
class Factor:
    scope: tuple[Variable, ...]
    values: np.ndarray

    def __post_init__(self):
        scope = tuple(self.scope)
        values = np.asarray(self.values, dtype=float)
        shape = tuple(v.cardinality for v in scope)
        if values.size != int(np.prod(shape, dtype=np.int64)):
            raise NetworkError(
                f"factor over {[v.name for v in scope]} needs "
                f"{int(np.prod(shape))} values, got {values.size}"
            )
        values = values.reshape(shape)
        if np.any(values < 0):
            raise NetworkError("factor values must be nonnegative")
        values.setflags(write=False)
        object.__setattr__(self, "scope", scope)
        object.__setattr__(self, "values", values)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.scope)

    def axis(self, name: str) -> int:
        for i, v in enumerate(self.scope):
            if v.name == name:
                return i
        raise NetworkError(f"variable {name!r} is not in factor scope {list(self.names)}")

    def scalar(self) -> float:
        if self.scope:
            raise NetworkError(f"factor over {list(self.names)} is not a scalar")
        return float(self.values)

    def total(self) -> float:
        return float(self.values.sum())

    def __mul__(self, other: Factor) -> Factor:
        return factor_product(self, other)

    def __repr__(self):
        return f"Factor({list(self.names)}, {self.values.ravel().tolist()})"


def cpt_factor(net: Network, cpt: Cpt) -> Factor:
    scope = tuple(net.variable(p) for p in cpt.parents) + (net.variable(cpt.child),)
    return Factor(scope, np.array(cpt.rows, dtype=float))


def unit_factor() -> Factor:
    return Factor((), np.array(1.0))


def _aligned(f: Factor, scope: Sequence[Variable]) -> np.ndarray:
    """View of ``f.values`` broadcastable against a table over ``scope``."""
    names = [v.name for v in scope]
    positions = [names.index(n) for n in f.names]
    order = np.argsort(positions)
    arr = np.transpose(f.values, order) if f.scope else f.values
    shape = [1] * len(scope)
    for pos in positions:
        shape[pos] = scope[pos].cardinality
    return arr.reshape(shape)


def factor_product(f: Factor, g: Factor) -> Factor:
    """Pointwise product over the union of both scopes (``f``'s variables first)."""
    scope = list(f.scope)
    known = {v.name: v for v in f.scope}
    for v in g.scope:
        mine = known.get(v.name)
        if mine is None:
            scope.append(v)
        elif mine.states != v.states:
            raise NetworkError(
                f"variable {v.name!r} has states {list(mine.states)} in one factor "
                f"and {list(v.states)} in the other"
            )
    return Factor(tuple(scope), _aligned(f, scope) * _aligned(g, scope))


def factor_marginalize(f: Factor, name: str) -> Factor:
    """Sum ``name`` out of ``f``."""
    ax = f.axis(name)
    scope = f.scope[:ax] + f.scope[ax + 1:]
    return Factor(scope, f.values.sum(axis=ax))


def factor_reduce(f: Factor, name: str, state: str) -> Factor:
    """Slice of ``f`` at ``name = state``; no renormalization."""
    ax = f.axis(name)
    k = f.scope[ax].index(state)
    scope = f.scope[:ax] + f.scope[ax + 1:]
    return Factor(scope, np.take(f.values, k, axis=ax))


def product_all(factors: Iterable[Factor]) -> Factor:
    result = unit_factor()
    for f in factors:
        result = factor_product(result, f)
    return result


def normalize(f: Factor) -> Factor:
    total = f.total()
    if total <= 0:
        raise NetworkError("cannot normalize a factor with zero mass")
    return Factor(f.scope, f.values / total)


def reorder(f: Factor, names: Sequence[str]) -> Factor:
    """Same factor with its axes permuted to ``names``."""
    if sorted(names) != sorted(f.names):
        raise NetworkError(f"{list(names)} is not a permutation of {list(f.names)}")
    axes = [f.axis(n) for n in names]
    return Factor(tuple(f.scope[a] for a in axes), np.transpose(f.values, axes))
