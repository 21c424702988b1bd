"""Synthetic conflict experiments.

Cases come from a two-component mixture: with probability ``1 - epsilon``
they are drawn from the base network, and with probability ``epsilon`` from
an alternate network over the same variables. Straw models built from the
base network then score each case, and detection and false-alarm rates are
compared across straw kinds.

Randomness uses ``numpy.random.default_rng`` (PCG64) seeded with the caller's
integer seed. Every function is a pure function of its arguments.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from .inference import joint_marginal, prob_of_evidence
from .network import Cpt, Evidence, Network, Role, Variable, topological_order
from .straw import VERDICT_TOL, StrawKind, build_straw

_TABLE_CAP = 2**20


@dataclass(frozen=True)
class NetSpec:
    n_target: int = 2
    n_evidence: int = 3
    n_other: int = 3
    states_per_var: int = 2
    edge_density: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.n_target < 1 or self.n_evidence < 1 or self.n_other < 0:
            raise ValueError("need n_target >= 1, n_evidence >= 1, n_other >= 0")
        if self.states_per_var < 2:
            raise ValueError("states_per_var must be at least 2")
        if not 0.0 < self.edge_density <= 1.0:
            raise ValueError("edge_density must lie in (0, 1]")


@dataclass(frozen=True)
class MixtureWorld:
    """``P = (1 - epsilon) * base + epsilon * alternate``."""

    base: Network
    alternate: Network
    epsilon: float

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in [0, 1], got {self.epsilon}")
        a = [(v.name, v.states) for v in self.base.variables]
        b = [(v.name, v.states) for v in self.alternate.variables]
        if a != b:
            raise ValueError("base and alternate must share variables and state lists")

    def probability(self, evidence: Mapping[str, str]) -> float:
        return (1.0 - self.epsilon) * prob_of_evidence(
            self.base, evidence
        ) + self.epsilon * prob_of_evidence(self.alternate, evidence)


def _random_rows(rng: np.random.Generator, n_rows: int, k: int) -> tuple:
    return tuple(tuple(r) for r in rng.dirichlet(np.ones(k), size=n_rows).tolist())


def generate_diagnostic_network(spec: NetSpec) -> Network:
    """Random layered diagnostic network.

    Each Other variable is either a setting factor (a root that may parent
    targets) or a mediator (a child of targets that may parent evidence).
    Targets take parents only from setting factors; evidence variables take
    parents from targets and mediators and always have at least one parent.
    Each allowed edge is present with probability ``edge_density``.
    """
    rng = np.random.default_rng(spec.seed)
    k = spec.states_per_var
    states = tuple(f"s{i}" for i in range(k))
    is_mediator = rng.random(spec.n_other) < 0.5
    settings = [f"O{i}" for i in range(spec.n_other) if not is_mediator[i]]
    mediators = [f"O{i}" for i in range(spec.n_other) if is_mediator[i]]
    targets = [f"T{i}" for i in range(spec.n_target)]
    evidence = [f"E{i}" for i in range(spec.n_evidence)]

    def pick(pool):
        return [p for p in pool if rng.random() < spec.edge_density]

    parents: dict[str, list[str]] = {}
    for name in settings:
        parents[name] = []
    for name in targets:
        parents[name] = pick(settings)
    for name in mediators:
        parents[name] = pick(targets + settings)
    for name in evidence:
        pool = targets + mediators
        chosen = pick(pool)
        if not chosen:
            chosen = [pool[rng.integers(len(pool))]]
        parents[name] = chosen

    roles = {**dict.fromkeys(settings + mediators, Role.OTHER),
             **dict.fromkeys(targets, Role.TARGET),
             **dict.fromkeys(evidence, Role.EVIDENCE)}
    order = settings + targets + mediators + evidence
    variables = tuple(Variable(n, states, roles[n]) for n in order)
    cpts = tuple(
        Cpt(n, tuple(parents[n]), _random_rows(rng, k ** len(parents[n]), k)) for n in order
    )
    name = (
        f"diag-t{spec.n_target}-e{spec.n_evidence}-o{spec.n_other}"
        f"-k{k}-d{spec.edge_density:g}-s{spec.seed}"
    )
    return Network(name, variables, cpts)


def perturb_network(
    net: Network,
    strength: float,
    seed: int,
    variables: Iterable[str] | None = None,
) -> Network:
    """Blend CPT rows toward fresh random rows.

    Each row of each selected CPT becomes
    ``(1 - strength) * row + strength * fresh``, renormalized, with ``fresh``
    drawn uniformly from the simplex. ``variables`` restricts which CPTs are
    touched (default: all). ``strength = 0`` returns ``net`` itself.
    """
    if not 0.0 <= strength <= 1.0:
        raise ValueError(f"strength must lie in [0, 1], got {strength}")
    if strength == 0.0:
        return net
    selected = set(net.names if variables is None else variables)
    rng = np.random.default_rng(seed)
    cpts = []
    for cpt in net.cpts:
        k = net.variable(cpt.child).cardinality
        # draw for every CPT so the stream does not depend on the selection
        fresh = rng.dirichlet(np.ones(k), size=len(cpt.rows))
        if cpt.child not in selected:
            cpts.append(cpt)
            continue
        rows = (1.0 - strength) * np.array(cpt.rows) + strength * fresh
        rows /= rows.sum(axis=1, keepdims=True)
        cpts.append(Cpt(cpt.child, cpt.parents, tuple(tuple(r) for r in rows.tolist())))
    return net.replace_cpts(cpts, name=f"{net.name}-perturbed")


def forward_sample(net: Network, n: int, rng: np.random.Generator) -> np.ndarray:
    """Ancestral sampling; returns state indices shaped ``(n, n_variables)``
    with columns in declaration order."""
    col = {name: i for i, name in enumerate(net.names)}
    out = np.zeros((n, len(net.variables)), dtype=np.int64)
    for name in topological_order(net):
        cpt = net.cpt(name)
        table = np.cumsum(np.array(cpt.rows), axis=1)
        row = np.zeros(n, dtype=np.int64)
        for p in cpt.parents:
            row = row * net.variable(p).cardinality + out[:, col[p]]
        u = rng.random(n)
        draws = (u[:, None] >= table[row]).sum(axis=1)
        out[:, col[name]] = np.minimum(draws, table.shape[1] - 1)
    return out


@dataclass(frozen=True, eq=False)
class CaseSet:
    """Sampled findings over the Evidence-role variables, with provenance."""

    variables: tuple[Variable, ...]
    states: np.ndarray
    from_alternate: np.ndarray

    def __len__(self):
        return len(self.states)

    @property
    def labels(self) -> np.ndarray:
        return np.where(self.from_alternate, "alternate", "base")

    def findings(self, i: int) -> Evidence:
        return Evidence(
            {v.name: v.states[s] for v, s in zip(self.variables, self.states[i])}
        )


def sample_cases(world: MixtureWorld, n: int, seed: int) -> CaseSet:
    """Draw ``n`` labelled cases from the mixture ``world``."""
    rng = np.random.default_rng(seed)
    evidence_vars = world.base.evidence_variables
    cols = [world.base.names.index(v.name) for v in evidence_vars]
    from_alt = rng.random(n) < world.epsilon
    states = np.zeros((n, len(cols)), dtype=np.int64)
    n_alt = int(from_alt.sum())
    states[~from_alt] = forward_sample(world.base, n - n_alt, rng)[:, cols]
    states[from_alt] = forward_sample(world.alternate, n_alt, rng)[:, cols]
    return CaseSet(evidence_vars, states, from_alt)


def case_indices(
    net: Network, straw: Network, variables: Sequence[Variable], states: np.ndarray
) -> np.ndarray:
    """Conflict index ``log2(P_straw / P_given)`` for each row of ``states``.

    Rows assign a state index to each of ``variables``. Uses one joint table
    per model when the configuration space is small, otherwise scores each
    distinct row separately.
    """
    states = np.asarray(states, dtype=np.int64).reshape(-1, len(variables))
    names = [v.name for v in variables]
    size = math.prod(v.cardinality for v in variables)
    with np.errstate(divide="ignore", invalid="ignore"):
        if size <= _TABLE_CAP:
            given = joint_marginal(net, names).values
            alt = joint_marginal(straw, names).values
            table = np.log2(alt) - np.log2(given)
            table[(alt == 0) & (given == 0)] = np.nan
            return table[tuple(states.T)] if len(states) else np.zeros(0)
        uniq, inverse = np.unique(states, axis=0, return_inverse=True)
        scores = np.empty(len(uniq))
        for i, row in enumerate(uniq):
            e = {v.name: v.states[s] for v, s in zip(variables, row)}
            pg, ps = prob_of_evidence(net, e), prob_of_evidence(straw, e)
            scores[i] = np.nan if pg == ps == 0 else np.log2(ps) - np.log2(pg)
        return scores[inverse.ravel()]


@dataclass(frozen=True)
class KindRates:
    detection_rate: float | None
    false_alarm_rate: float | None


@dataclass(frozen=True)
class ExperimentResult:
    rates: dict[StrawKind, KindRates]
    n_cases: int
    n_alternate: int
    seed: int
    threshold: float = 0.0

    def to_table(self) -> str:
        def fmt(x):
            return "NA" if x is None else f"{x:.6f}"

        lines = ["kind\tn\tdetection_rate\tfalse_alarm_rate\tseed"]
        for kind, r in self.rates.items():
            lines.append(
                f"{kind}\t{self.n_cases}\t{fmt(r.detection_rate)}\t"
                f"{fmt(r.false_alarm_rate)}\t{self.seed}"
            )
        return "\n".join(lines) + "\n"


def run_detection_experiment(
    spec: NetSpec,
    strength: float,
    epsilon: float,
    n: int,
    seed: int,
    threshold: float = 0.0,
    perturb_roles: Iterable[Role | str] | None = None,
    kinds: Iterable[StrawKind | str] = (StrawKind.BIPARTITE, StrawKind.INDEPENDENT),
) -> ExperimentResult:
    """Build a base network from ``spec``, perturb it into an alternate, sample
    mixture cases and measure how often each straw kind flags a conflict.

    A case is flagged when its index is strictly above ``threshold``.
    ``perturb_roles`` limits the perturbation to CPTs of variables with those
    roles (default: every variable). Rates over an empty group are ``None``.
    """
    base = generate_diagnostic_network(spec)
    perturb_seed, sample_seed = np.random.default_rng(seed).integers(2**63, size=2)
    selected = None
    if perturb_roles is not None:
        roles = {Role(r) for r in perturb_roles}
        selected = [v.name for v in base.variables if v.role in roles]
    alternate = perturb_network(base, strength, int(perturb_seed), selected)
    cases = sample_cases(MixtureWorld(base, alternate, epsilon), n, int(sample_seed))

    rates = {}
    for kind in dict.fromkeys(StrawKind(k) for k in kinds):
        straw = build_straw(base, kind)
        scores = case_indices(base, straw, cases.variables, cases.states)
        flagged = np.nan_to_num(scores, nan=-np.inf) > threshold + VERDICT_TOL
        alt, base_cases = flagged[cases.from_alternate], flagged[~cases.from_alternate]
        rates[kind] = KindRates(
            float(alt.mean()) if len(alt) else None,
            float(base_cases.mean()) if len(base_cases) else None,
        )
    return ExperimentResult(rates, n, int(cases.from_alternate.sum()), seed, threshold)


@dataclass(frozen=True)
class BoundRow:
    K: float
    exceedance: float
    bound: float
    slack: float

    @property
    def ok(self) -> bool:
        return self.exceedance <= self.bound + self.slack


@dataclass(frozen=True)
class BoundCheck:
    kind: StrawKind
    n: int
    seed: int
    rows: tuple[BoundRow, ...] = field(default=())

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.rows)

    def to_table(self) -> str:
        lines = ["kind\tK\texceedance\tbound\tslack\tok"]
        for r in self.rows:
            lines.append(
                f"{self.kind}\t{r.K:g}\t{r.exceedance:.6f}\t{r.bound:.6f}\t"
                f"{r.slack:.6f}\t{'yes' if r.ok else 'no'}"
            )
        return "\n".join(lines) + "\n"


def surprise_bound_check(
    net: Network,
    kind: StrawKind | str,
    Ks: Sequence[float],
    n: int,
    seed: int,
    straw: Network | None = None,
) -> BoundCheck:
    """Empirical ``P_given(index > K)`` for each ``K``.

    Full Evidence-variable configurations are sampled from ``net``. Each row
    also reports the bound ``2**-K`` and a three-sigma binomial slack
    ``3 * sqrt(2**-K * (1 - 2**-K) / n)``.
    """
    kind = StrawKind(kind)
    straw = straw if straw is not None else build_straw(net, kind)
    rng = np.random.default_rng(seed)
    evidence_vars = net.evidence_variables
    cols = [net.names.index(v.name) for v in evidence_vars]
    states = forward_sample(net, n, rng)[:, cols]
    scores = case_indices(net, straw, evidence_vars, states)
    rows = []
    for K in Ks:
        bound = min(1.0, 2.0 ** -K)
        slack = 3.0 * math.sqrt(bound * (1.0 - bound) / n) if n else 0.0
        frac = float(np.mean(scores > K)) if n else 0.0
        rows.append(BoundRow(float(K), frac, bound, slack))
    return BoundCheck(kind, n, seed, tuple(rows))
