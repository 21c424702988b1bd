import itertools

import numpy as np
import pytest

from strawnet import Cpt, Network, Role, Variable, load_cancer_network

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def cancer():
    return load_cancer_network()


def random_rows(rng, n_rows, k):
    return tuple(tuple(r) for r in rng.dirichlet(np.ones(k), size=n_rows).tolist())


def random_network(rng, n_vars, max_parents=3, k=2, zero_prob=0.0):
    """Arbitrary random DAG with random roles; declaration order is topological."""
    states = tuple(f"v{i}" for i in range(k))
    roles = list(Role)
    variables, cpts = [], []
    for i in range(n_vars):
        name = f"X{i}"
        n_par = int(rng.integers(0, min(i, max_parents) + 1))
        parents = tuple(f"X{j}" for j in sorted(rng.choice(i, size=n_par, replace=False)))
        rows = np.array(random_rows(rng, k ** n_par, k))
        if zero_prob:
            mask = rng.random(rows.shape) < zero_prob
            mask[np.arange(len(rows)), rng.integers(0, k, len(rows))] = False
            rows[mask] = 0.0
            rows /= rows.sum(axis=1, keepdims=True)
        variables.append(Variable(name, states, roles[int(rng.integers(3))]))
        cpts.append(Cpt(name, parents, tuple(map(tuple, rows.tolist()))))
    return Network(f"random-{n_vars}", tuple(variables), tuple(cpts))


def random_evidence(rng, net, p=0.4):
    return {
        v.name: v.states[int(rng.integers(v.cardinality))]
        for v in net.variables
        if rng.random() < p
    }


def identity_network(rng, n_target, n_evidence):
    """Other-free net: targets are roots, evidence parents are a subset of targets."""
    states = ("a", "b")
    targets = [f"T{i}" for i in range(n_target)]
    variables, cpts = [], []
    for t in targets:
        variables.append(Variable(t, states, Role.TARGET))
        cpts.append(Cpt(t, (), random_rows(rng, 1, 2)))
    for i in range(n_evidence):
        name = f"E{i}"
        parents = tuple(t for t in targets if rng.random() < 0.5)
        variables.append(Variable(name, states, Role.EVIDENCE))
        cpts.append(Cpt(name, parents, random_rows(rng, 2 ** len(parents), 2)))
    return Network(f"identity-{n_target}-{n_evidence}", tuple(variables), tuple(cpts))


def all_partial_assignments(variables):
    """Every nonempty partial assignment over ``variables``."""
    for r in range(1, len(variables) + 1):
        for subset in itertools.combinations(variables, r):
            for states in itertools.product(*(v.states for v in subset)):
                yield {v.name: s for v, s in zip(subset, states)}
