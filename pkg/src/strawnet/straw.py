"""Straw models and conflict (surprise) indices.

A straw model is a deliberately simpler alternative to the given network.
Findings that the straw model explains better than the given model get a
positive conflict index, which alerts the user that the given model may
not fit the case at hand.

Two constructions are provided:

* bipartite: keep only Target and Evidence variables, make every target a
  root with its given-model marginal, and make every target a parent of
  every evidence variable, with rows ``P_given(A | targets = t)``.
* independent: keep every variable, drop every edge, and give each variable
  its given-model marginal.

All indices are base-2 logarithms.
"""

from __future__ import annotations

import enum
import itertools
import math
import warnings
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

from .exceptions import CapExceededError, EvidenceError, RoleError
from .inference import joint_marginal, posterior_marginal, prob_of_evidence
from .network import Cpt, Evidence, Network, Role, as_evidence, row_config

TARGET_CONFIG_CAP = 4096
# indices this close to the threshold are rounding noise and count as ties
VERDICT_TOL = 1e-9


class StrawKind(str, enum.Enum):
    BIPARTITE = "bipartite"
    INDEPENDENT = "independent"

    def __str__(self):
        return self.value


class Verdict(str, enum.Enum):
    CONFLICT = "Conflict"
    NO_CONFLICT = "NoConflict"
    UNDEFINED = "Undefined"

    def __str__(self):
        return self.value


class StrawWarning(UserWarning):
    pass


def _marginal_cpt(net: Network, name: str) -> Cpt:
    return Cpt(name, (), (tuple(posterior_marginal(net, name).tolist()),))


def build_bipartite_straw(net: Network, cap: int = TARGET_CONFIG_CAP) -> Network:
    """Abstract ``net`` to a bipartite Target -> Evidence network.

    Other variables are summed out. Target configurations with zero
    probability get a uniform row for each evidence variable; each such row
    is recorded in the returned network's ``warnings`` and emitted as a
    :class:`StrawWarning`.

    Raises
    ------
    RoleError
        If ``net`` has no Target or no Evidence variable.
    CapExceededError
        If the number of joint target configurations exceeds ``cap``.
    """
    targets = net.targets
    evidence_vars = net.evidence_variables
    if not targets:
        raise RoleError(f"network {net.name!r} has no Target variables")
    if not evidence_vars:
        raise RoleError(f"network {net.name!r} has no Evidence variables")
    n_configs = math.prod(t.cardinality for t in targets)
    if n_configs > cap:
        raise CapExceededError(
            f"{n_configs} target configurations exceed the cap of {cap}"
        )

    target_names = tuple(t.name for t in targets)
    cpts: dict[str, Cpt] = {t.name: _marginal_cpt(net, t.name) for t in targets}
    notes: list[str] = []
    for var in evidence_vars:
        joint = joint_marginal(net, [*target_names, var.name])
        table = joint.values.reshape(n_configs, var.cardinality)
        mass = table.sum(axis=1)
        rows = []
        for r in range(n_configs):
            if mass[r] > 0:
                rows.append(tuple((table[r] / mass[r]).tolist()))
            else:
                rows.append((1.0 / var.cardinality,) * var.cardinality)
                config = dict(zip(target_names, row_config(targets, r)))
                notes.append(
                    f"{var.name}: target configuration {config} has probability 0; "
                    "row set to uniform"
                )
        cpts[var.name] = Cpt(var.name, target_names, tuple(rows))

    for note in notes:
        warnings.warn(note, StrawWarning, stacklevel=2)
    kept = tuple(v for v in net.variables if v.role is not Role.OTHER)
    return Network(
        f"{net.name}-bipartite",
        kept,
        tuple(cpts[v.name] for v in kept),
        warnings=tuple(notes),
    )


def build_independent_straw(net: Network) -> Network:
    """Edgeless copy of ``net`` in which every variable keeps its marginal."""
    return Network(
        f"{net.name}-independent",
        net.variables,
        tuple(_marginal_cpt(net, v.name) for v in net.variables),
    )


def build_straw(net: Network, kind: StrawKind | str, cap: int = TARGET_CONFIG_CAP) -> Network:
    kind = StrawKind(kind)
    if kind is StrawKind.BIPARTITE:
        return build_bipartite_straw(net, cap=cap)
    return build_independent_straw(net)


def conflict_index(p_straw: float, p_given: float) -> float:
    """``log2(p_straw / p_given)``.

    Returns ``+inf`` when only ``p_given`` is zero, ``-inf`` when only
    ``p_straw`` is zero, and ``nan`` (undefined) when both are zero.
    """
    for p in (p_straw, p_given):
        if not 0.0 <= p <= 1.0 + 1e-12:
            raise ValueError(f"probability {p} outside [0, 1]")
    if p_straw == 0.0 and p_given == 0.0:
        return math.nan
    if p_given == 0.0:
        return math.inf
    if p_straw == 0.0:
        return -math.inf
    return math.log2(p_straw) - math.log2(p_given)


def verdict_for(index: float, threshold: float = 0.0) -> Verdict:
    """Conflict iff ``index`` exceeds ``threshold``; ties go to NoConflict."""
    if math.isnan(index):
        return Verdict.UNDEFINED
    return Verdict.CONFLICT if index > threshold + VERDICT_TOL else Verdict.NO_CONFLICT


def jensen_conf(net: Network, evidence: Mapping[str, str]) -> float:
    """Independence-based conflict measure.

    ``log2(prod_i P(x_i) / P(x_1, ..., x_n))`` with every probability taken
    from ``net`` itself; no straw network is built.
    """
    evidence = as_evidence(net, evidence)
    if not evidence:
        raise EvidenceError("conflict measure needs at least one finding")
    product = 1.0
    for name, state in evidence.items():
        product *= float(posterior_marginal(net, name)[net.variable(name).index(state)])
    return conflict_index(product, prob_of_evidence(net, evidence))


@dataclass(frozen=True)
class ConflictReport:
    """Given-model and straw-model probabilities of one set of findings."""

    evidence: Evidence
    p_given: float
    p_straw: dict[StrawKind, float] = field(default_factory=dict)
    index: dict[StrawKind, float] = field(default_factory=dict)
    verdict: dict[StrawKind, Verdict] = field(default_factory=dict)

    @property
    def kinds(self) -> tuple[StrawKind, ...]:
        return tuple(self.p_straw)

    def any_conflict(self) -> bool:
        return any(v is Verdict.CONFLICT for v in self.verdict.values())

    def format(self, digits: int = 4) -> str:
        findings = ", ".join(f"{k}={v}" for k, v in self.evidence.items())
        lines = [f"findings: {findings}", f"P_given(e) = {self.p_given:.{digits}g}"]
        for kind in self.kinds:
            lines.append(
                f"{kind}: P_straw(e) = {self.p_straw[kind]:.{digits}g}  "
                f"c_s = {self.index[kind]:.{digits}g}  verdict = {self.verdict[kind]}"
            )
        return "\n".join(lines)


def check_scorable(net: Network, evidence: Mapping[str, str]) -> Evidence:
    evidence = as_evidence(net, evidence)
    if not evidence:
        raise EvidenceError("conflict scoring needs at least one finding")
    wrong = [n for n in evidence if net.variable(n).role is not Role.EVIDENCE]
    if wrong:
        raise RoleError(
            f"findings on non-Evidence variables {wrong}; the bipartite straw "
            "model cannot score them"
        )
    return evidence


def conflict_report(
    net: Network,
    evidence: Mapping[str, str],
    kinds: Iterable[StrawKind | str] = (StrawKind.BIPARTITE,),
    straws: Mapping[StrawKind, Network] | None = None,
    threshold: float = 0.0,
) -> ConflictReport:
    """Score ``evidence`` against ``net`` and the requested straw models.

    Parameters
    ----------
    straws : mapping, optional
        Prebuilt straw networks keyed by kind, reused instead of rebuilding.
    threshold : float, default 0.0
        Verdict is Conflict iff the index is strictly above this value.
    """
    evidence = check_scorable(net, evidence)
    straws = dict(straws or {})
    p_given = prob_of_evidence(net, evidence)
    report = ConflictReport(evidence, p_given)
    for kind in dict.fromkeys(StrawKind(k) for k in kinds):
        straw = straws.get(kind)
        if straw is None:
            straw = straws[kind] = build_straw(net, kind)
        p = prob_of_evidence(straw, evidence)
        c = conflict_index(p, p_given)
        report.p_straw[kind] = p
        report.index[kind] = c
        report.verdict[kind] = verdict_for(c, threshold)
    return report


def target_configurations(net: Network):
    """All joint target assignments in row-major order."""
    targets = net.targets
    for states in itertools.product(*(t.states for t in targets)):
        yield dict(zip((t.name for t in targets), states))
