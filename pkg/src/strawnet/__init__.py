"""Conflict detection in annotated diagnostic Bayesian networks using straw models."""

from .estimator import StrawConflictDetector, check_findings, check_model
from .exceptions import (
    CapExceededError,
    EvidenceError,
    ImpossibleEvidenceError,
    NetworkError,
    ParseError,
    RoleError,
    StructuralError,
)
from .factor import Factor, factor_marginalize, factor_product, factor_reduce
from .formats import (
    load_cancer_network,
    load_network,
    parse_findings,
    parse_network,
    serialize_network,
)
from .harness import (
    ExperimentResult,
    MixtureWorld,
    NetSpec,
    generate_diagnostic_network,
    perturb_network,
    run_detection_experiment,
    sample_cases,
    surprise_bound_check,
)
from .inference import (
    brute_force_joint,
    elimination_order,
    posterior_marginal,
    prob_of_evidence,
)
from .network import (
    Cpt,
    Evidence,
    Network,
    Role,
    Variable,
    check_network,
    cpt_row_index,
    row_config,
    topological_order,
    validate_network,
)
from .straw import (
    ConflictReport,
    StrawKind,
    Verdict,
    build_bipartite_straw,
    build_independent_straw,
    build_straw,
    conflict_index,
    conflict_report,
    jensen_conf,
)

__version__ = "0.1.0"
