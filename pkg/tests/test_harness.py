import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from strawnet import (
    Cpt,
    MixtureWorld,
    NetSpec,
    Network,
    Role,
    StrawKind,
    Variable,
    build_straw,
    conflict_index,
    generate_diagnostic_network,
    perturb_network,
    posterior_marginal,
    prob_of_evidence,
    run_detection_experiment,
    sample_cases,
    surprise_bound_check,
    topological_order,
    validate_network,
)
from strawnet.harness import forward_sample

from conftest import random_rows


def sigma3(p, n):
    return 3 * math.sqrt(p * (1 - p) / n)


def exact_exceedance(net, kind, K):
    """P_given(index > K) by enumerating every Evidence configuration."""
    straw = build_straw(net, kind)
    evs = net.evidence_variables
    total = 0.0
    for states in itertools.product(*(v.states for v in evs)):
        e = dict(zip((v.name for v in evs), states))
        pg = prob_of_evidence(net, e)
        if pg > 0 and conflict_index(prob_of_evidence(straw, e), pg) > K:
            total += pg
    return total


def test_generate_example_spec():
    net = generate_diagnostic_network(NetSpec(2, 3, 3, 2, 0.5, seed=42))
    assert len(net.variables) == 8
    assert validate_network(net).ok
    topological_order(net)


def test_generate_minimal_spec():
    net = generate_diagnostic_network(NetSpec(1, 1, 0, 2, 0.5, seed=1))
    assert net.names == ("T0", "E0")
    assert net.parents("E0") == ("T0",)
    assert net.parents("T0") == ()


def test_generate_is_deterministic():
    spec = NetSpec(2, 3, 3, 3, 0.7, seed=5)
    assert generate_diagnostic_network(spec) == generate_diagnostic_network(spec)
    assert generate_diagnostic_network(spec) != generate_diagnostic_network(
        NetSpec(2, 3, 3, 3, 0.7, seed=6)
    )


def test_netspec_validation():
    with pytest.raises(ValueError):
        NetSpec(0, 1, 0)
    with pytest.raises(ValueError):
        NetSpec(1, 1, 0, states_per_var=1)
    with pytest.raises(ValueError):
        NetSpec(1, 1, 0, edge_density=0.0)


@settings(max_examples=40, deadline=None)
@given(
    st.integers(1, 3), st.integers(1, 4), st.integers(0, 4),
    st.integers(2, 3), st.floats(0.05, 1.0), st.integers(0, 2**32),
)
def test_generated_layering(nt, ne, no, k, density, seed):
    net = generate_diagnostic_network(NetSpec(nt, ne, no, k, density, seed))
    assert validate_network(net).ok
    roots = {v.name for v in net.others if not net.parents(v.name)}
    target_names = {v.name for v in net.targets}
    other_names = {v.name for v in net.others}
    for t in net.targets:
        assert set(net.parents(t.name)) <= roots
    for e in net.evidence_variables:
        parents = set(net.parents(e.name))
        assert parents
        assert parents <= target_names | other_names
    for o in net.others:
        assert set(net.parents(o.name)) <= target_names | roots


def test_perturb_zero_strength_is_identity(cancer):
    assert perturb_network(cancer, 0.0, seed=1) is cancer


def test_perturb_full_strength_forgets_original(cancer):
    flat = cancer.replace_cpts(
        [Cpt(c.child, c.parents, [(0.5, 0.5)] * len(c.rows)) for c in cancer.cpts]
    )
    a = perturb_network(cancer, 1.0, seed=9)
    b = perturb_network(flat, 1.0, seed=9)
    for ca, cb in zip(a.cpts, b.cpts):
        np.testing.assert_allclose(ca.rows, cb.rows, atol=1e-12)


def test_perturb_half_strength_is_valid(cancer):
    net = perturb_network(cancer, 0.5, seed=7)
    assert validate_network(net).ok
    assert net.variables == cancer.variables
    for cpt, orig in zip(net.cpts, cancer.cpts):
        assert cpt.parents == orig.parents
        np.testing.assert_allclose(np.sum(cpt.rows, axis=1), 1.0, atol=1e-9)
    assert net.cpts != cancer.cpts


def test_perturb_selected_variables_only(cancer):
    others = [v.name for v in cancer.others]
    net = perturb_network(cancer, 0.9, seed=3, variables=others)
    for cpt, orig in zip(net.cpts, cancer.cpts):
        if cpt.child in others:
            assert cpt.rows != orig.rows
        else:
            assert cpt.rows == orig.rows


def test_perturb_rejects_bad_strength(cancer):
    with pytest.raises(ValueError):
        perturb_network(cancer, 1.5, seed=0)


def test_forward_sample_marginals(cancer):
    n = 40000
    draws = forward_sample(cancer, n, np.random.default_rng(0))
    for j, v in enumerate(cancer.variables):
        p = posterior_marginal(cancer, v.name)[0]
        assert abs(np.mean(draws[:, j] == 0) - p) <= sigma3(p, n) + 1e-12


def test_forward_sample_respects_zeros(cancer):
    draws = forward_sample(cancer, 20000, np.random.default_rng(1))
    g, a, bc = (cancer.names.index(n) for n in ("Gender", "Age", "Breast Cancer"))
    young_men = (draws[:, g] == 0) & (draws[:, a] == 0)
    assert not np.any(draws[young_men, bc] == 0)


def test_mixture_world_checks(cancer):
    other = generate_diagnostic_network(NetSpec(1, 1, 0))
    with pytest.raises(ValueError):
        MixtureWorld(cancer, other, 0.5)
    with pytest.raises(ValueError):
        MixtureWorld(cancer, cancer, 1.5)


@pytest.mark.parametrize("eps, label", [(0.0, "base"), (1.0, "alternate")])
def test_sample_cases_pure_components(cancer, eps, label):
    world = MixtureWorld(cancer, perturb_network(cancer, 0.5, 1), eps)
    cases = sample_cases(world, 500, seed=2)
    assert set(cases.labels) == {label}
    assert [v.name for v in cases.variables] == ["X-ray", "Palpation", "Diabetes"]
    assert set(cases.findings(0)) == {"X-ray", "Palpation", "Diabetes"}


def test_sample_cases_mixing_fraction(cancer):
    world = MixtureWorld(cancer, perturb_network(cancer, 0.5, 1), 0.3)
    cases = sample_cases(world, 10000, seed=11)
    assert abs(cases.from_alternate.mean() - 0.3) <= 0.02


def test_sample_cases_deterministic(cancer):
    world = MixtureWorld(cancer, perturb_network(cancer, 0.5, 1), 0.3)
    a, b = sample_cases(world, 1000, seed=4), sample_cases(world, 1000, seed=4)
    assert np.array_equal(a.states, b.states)
    assert np.array_equal(a.from_alternate, b.from_alternate)


def tiny_world(eps):
    vs = [
        Variable("T", ("a", "b"), Role.TARGET),
        Variable("E1", ("y", "n"), Role.EVIDENCE),
        Variable("E2", ("y", "n"), Role.EVIDENCE),
    ]
    rng = np.random.default_rng(17)
    base = Network(
        "tiny",
        vs,
        [
            Cpt("T", (), random_rows(rng, 1, 2)),
            Cpt("E1", ("T",), random_rows(rng, 2, 2)),
            Cpt("E2", ("T",), random_rows(rng, 2, 2)),
        ],
    )
    return MixtureWorld(base, perturb_network(base, 0.8, seed=3), eps)


@pytest.mark.parametrize("eps", [0.0, 0.25, 0.6, 1.0])
def test_mixture_frequencies_match_exact(eps):
    world = tiny_world(eps)
    n = 30000
    cases = sample_cases(world, n, seed=21)
    for s1, s2 in itertools.product(range(2), range(2)):
        e = {"E1": ("y", "n")[s1], "E2": ("y", "n")[s2]}
        p = world.probability(e)
        freq = np.mean((cases.states[:, 0] == s1) & (cases.states[:, 1] == s2))
        assert abs(freq - p) <= sigma3(p, n) + 1e-12


def test_experiment_without_alternate_cases():
    spec = NetSpec(2, 3, 3, 2, 0.5, seed=8)
    n = 20000
    result = run_detection_experiment(spec, 0.5, 0.0, n, seed=8)
    base = generate_diagnostic_network(spec)
    for kind, rates in result.rates.items():
        assert rates.detection_rate is None
        p = exact_exceedance(base, kind, 0.0)
        assert abs(rates.false_alarm_rate - p) <= sigma3(p, n) + 1e-12
        assert rates.false_alarm_rate <= 1.0


def test_experiment_zero_cases():
    result = run_detection_experiment(NetSpec(seed=1), 0.5, 0.5, 0, seed=1)
    assert result.n_cases == 0
    for rates in result.rates.values():
        assert rates.detection_rate is None and rates.false_alarm_rate is None
    assert "NA\tNA" in result.to_table()


def test_experiment_is_deterministic():
    args = (NetSpec(2, 3, 3, 2, 0.5, seed=4), 0.8, 0.4, 3000)
    a = run_detection_experiment(*args, seed=99)
    b = run_detection_experiment(*args, seed=99)
    assert a == b
    assert a.to_table() == b.to_table()
    assert a.to_table().splitlines()[0] == "kind\tn\tdetection_rate\tfalse_alarm_rate\tseed"


def test_bound_examples(cancer):
    n = 100000
    bip = surprise_bound_check(cancer, "bipartite", [0, 1], n, seed=5)
    assert bip.rows[0].bound == 1.0 and bip.rows[0].ok
    assert bip.rows[1].exceedance <= 0.5 + sigma3(0.5, n)
    ind = surprise_bound_check(cancer, StrawKind.INDEPENDENT, [2], n, seed=5)
    assert ind.rows[0].exceedance <= 0.25 + sigma3(0.25, n)


@pytest.mark.parametrize("kind", list(StrawKind))
def test_bound_check_matches_enumeration(cancer, kind):
    n = 50000
    check = surprise_bound_check(cancer, kind, [0.0, 0.5, 1.0], n, seed=13)
    for row in check.rows:
        p = exact_exceedance(cancer, kind, row.K)
        assert abs(row.exceedance - p) <= sigma3(p, n) + 1e-12


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 2), st.integers(1, 4), st.integers(0, 4), st.integers(0, 2**32))
def test_bound_holds_on_generated_nets(nt, ne, no, seed):
    net = generate_diagnostic_network(NetSpec(nt, ne, no, 2, 0.6, seed))
    for kind in StrawKind:
        check = surprise_bound_check(net, kind, [1, 2, 3, 4], 20000, seed)
        assert check.ok, check.to_table()
        for row in check.rows:
            assert exact_exceedance(net, kind, row.K) <= row.bound + 1e-12
