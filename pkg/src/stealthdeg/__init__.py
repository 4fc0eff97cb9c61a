"""Stealth-attack degradation analysis for DC state estimation.

Builds grid models from MATPOWER-style case files, quantifies the
stealthiness (KL divergence) and destructiveness (mutual information) of
Gaussian data-injection attacks constructed under incomplete branch
admittance information, classifies the degradation regime, and searches for
the incompleteness profile that maximally degrades attack stealth.
"""

from .attack_engine import (
    AttackArtifacts,
    IncompletenessSpec,
    attack_covariances,
    delta_matrix,
    equivalence_residual,
    mtd_admittance,
    perturbed_admittance,
    perturbed_jacobian,
)
from .case_ingest import BranchRecord, GridCase, load_case, parse_case
from .degradation_opt import (
    ObjectiveEvaluator,
    OptimizationResult,
    detectability_objective,
    exhaustive_maximize,
    greedy_maximize,
    maximize_with_oracle,
    vertex_profiles,
)
from .errors import (
    CapExceededError,
    CaseSyntaxError,
    DisconnectedGridError,
    DomainError,
    EmptyGridError,
    NotPSDError,
    SingularityError,
    StealthdegError,
    UnreachableAlphaError,
    ValidationError,
)
from .experiment_harness import (
    TrialRecord,
    alpha_montecarlo,
    beta_sweep,
    k_sweep,
    sample_bounds,
)
from .grid_model import (
    GridModel,
    build_model,
    check_connectivity_and_rank,
    incidence_matrix,
    jacobian,
    susceptance_diag,
)
from .info_metrics import (
    MetricsPoint,
    evaluate,
    integrity_cost,
    kl_divergence,
    mutual_information,
    optimal_metrics,
    sym_sqrt,
)
from .regime_analysis import (
    RegimeLabel,
    classify_delta,
    classify_uniform_ratio,
    definiteness_conditions,
    interaction_eig_bounds,
)
from .stochastics import (
    ScenarioStats,
    build_scenario,
    noise_variance,
    snr_from_variance,
    toeplitz_cov,
)

__version__ = "0.1.0"
