"""Exact inference by variable elimination, plus an enumeration oracle."""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterable, Mapping, Sequence

import numpy as np

from .exceptions import CapExceededError, ImpossibleEvidenceError
from .factor import (
    Factor,
    cpt_factor,
    factor_marginalize,
    factor_reduce,
    product_all,
    reorder,
)
from .network import Network, as_evidence, cpt_row_index

BRUTE_FORCE_CAP = 2**22


def _min_fill(
    adjacency: dict[str, set[str]], eliminate: Iterable[str], rank: Mapping[str, int]
) -> list[str]:
    adj = {n: set(nb) for n, nb in adjacency.items()}
    todo = sorted(set(eliminate), key=rank.__getitem__)
    order = []
    while todo:
        best, best_cost = None, None
        for n in todo:
            nbrs = list(adj[n])
            cost = sum(
                1
                for i in range(len(nbrs))
                for j in range(i + 1, len(nbrs))
                if nbrs[j] not in adj[nbrs[i]]
            )
            if best_cost is None or cost < best_cost:
                best, best_cost = n, cost
        order.append(best)
        todo.remove(best)
        nbrs = adj.pop(best)
        for a in nbrs:
            adj[a].discard(best)
            adj[a].update(nbrs - {a})
    return order


def _interaction_graph(scopes: Iterable[Iterable[str]], nodes: Iterable[str]):
    adj = {n: set() for n in nodes}
    for scope in scopes:
        scope = list(scope)
        for a in scope:
            adj[a].update(b for b in scope if b != a)
    return adj


def elimination_order(net: Network, keep: Iterable[str] = ()) -> list[str]:
    """Greedy min-fill order over ``net``'s variables not in ``keep``.

    Works on the moral graph. Ties go to the earliest-declared variable.
    """
    keep = set(keep)
    rank = {n: i for i, n in enumerate(net.names)}
    adj = _interaction_graph(((*c.parents, c.child) for c in net.cpts), net.names)
    return _min_fill(adj, (n for n in net.names if n not in keep), rank)


def _ancestral_set(net: Network, names: Iterable[str]) -> set[str]:
    seen: set[str] = set()
    stack = list(names)
    while stack:
        n = stack.pop()
        if n not in seen:
            seen.add(n)
            stack.extend(net.parents(n))
    return seen


def _eliminate(
    net: Network,
    evidence: Mapping[str, str],
    keep: Sequence[str],
    order: Sequence[str] | None = None,
) -> Factor:
    """Unnormalized factor over ``keep`` with ``evidence`` absorbed.

    Only the ancestral closure of the query is touched; barren descendants sum
    to one and drop out.
    """
    relevant = _ancestral_set(net, [*evidence, *keep])
    factors = []
    for name in net.names:
        if name not in relevant:
            continue
        f = cpt_factor(net, net.cpt(name))
        for v in f.names:
            if v in evidence:
                f = factor_reduce(f, v, evidence[v])
        factors.append(f)

    hidden = [n for n in net.names if n in relevant and n not in evidence and n not in keep]
    if order is None:
        rank = {n: i for i, n in enumerate(net.names)}
        adj = _interaction_graph((f.names for f in factors), hidden + list(keep))
        order = _min_fill(adj, hidden, rank)
    else:
        hidden_set = set(hidden)
        order = [n for n in order if n in hidden_set]
        missing = hidden_set.difference(order)
        if missing:
            raise ValueError(f"elimination order misses {sorted(missing)}")

    for var in order:
        touching = [f for f in factors if var in f.names]
        factors = [f for f in factors if var not in f.names]
        if touching:
            factors.append(factor_marginalize(product_all(touching), var))

    return reorder(product_all(factors), list(keep))


def prob_of_evidence(
    net: Network, evidence: Mapping[str, str] | None = None, order: Sequence[str] | None = None
) -> float:
    """Exact ``P(evidence)`` under ``net``; the empty assignment has probability 1.

    ``order`` optionally fixes the elimination order; variables not needed
    for the query are skipped.
    """
    evidence = as_evidence(net, evidence)
    if not evidence:
        return 1.0
    return _eliminate(net, evidence, (), order).scalar()


def joint_marginal(
    net: Network, names: Sequence[str], evidence: Mapping[str, str] | None = None
) -> Factor:
    """Unnormalized ``P(names, evidence)`` as a factor with scope ordered as ``names``."""
    evidence = as_evidence(net, evidence)
    clash = [n for n in names if n in evidence]
    if clash:
        raise ValueError(f"query variables {clash} are also observed")
    for n in names:
        net.variable(n)
    return _eliminate(net, evidence, list(names))


def posterior_marginal(
    net: Network, name: str, evidence: Mapping[str, str] | None = None
) -> np.ndarray:
    """``P(name | evidence)`` as a probability vector over ``name``'s states."""
    evidence = as_evidence(net, evidence)
    var = net.variable(name)
    if name in evidence:
        if prob_of_evidence(net, evidence) <= 0:
            raise ImpossibleEvidenceError(f"P({dict(evidence)}) = 0")
        out = np.zeros(var.cardinality)
        out[var.index(evidence[name])] = 1.0
        return out
    f = _eliminate(net, evidence, [name])
    total = f.total()
    if total <= 0:
        raise ImpossibleEvidenceError(f"P({dict(evidence)}) = 0")
    return f.values / total


def brute_force_joint(
    net: Network, evidence: Mapping[str, str] | None = None, cap: int = BRUTE_FORCE_CAP
) -> float:
    """``P(evidence)`` by enumerating every completion and multiplying CPT entries.

    Deliberately shares nothing with the factor machinery so it can serve as an
    oracle for :func:`prob_of_evidence`.
    """
    evidence = as_evidence(net, evidence)
    size = math.prod(v.cardinality for v in net.variables)
    if size > cap:
        raise CapExceededError(f"state space {size} exceeds enumeration cap {cap}")

    free = [v for v in net.variables if v.name not in evidence]
    tables = []
    for var in net.variables:
        cpt = net.cpt(var.name)
        tables.append((var, [net.variable(p) for p in cpt.parents], cpt.rows))

    total = 0.0
    for states in itertools.product(*(v.states for v in free)):
        assignment = dict(evidence)
        assignment.update(zip((v.name for v in free), states))
        p = 1.0
        for var, parents, rows in tables:
            row = rows[cpt_row_index(parents, [assignment[q.name] for q in parents])]
            p *= row[var.index(assignment[var.name])]
            if p == 0.0:
                break
        total += p
    return total
