"""adplacer: solvers for affect-aware ad selection and slot placement."""

from .baselines import trivial_schedule
from .core import (
    Ad,
    AdInventory,
    Polarity,
    ProgramSpec,
    RelevanceMatrix,
    RewardParams,
    Scene,
    Schedule,
    ScheduleEntry,
    Valence,
    ValidationResult,
    as_relevance,
    classify_polarity,
    reward,
    slot_blocks,
    validate_schedule,
)
from .instances import random_instance
from .profile import ProfilePoint, VpsProfile, build_profile, total_variation
from .relevance import (
    KeyframeFeatures,
    build_relevance_matrix,
    cosine_similarity,
    features_for,
    pair_relevance,
)
from .solvers import (
    DEFAULT_CANDIDATE_CAP,
    SolveReport,
    enumerate_balanced_subsets,
    enumerate_placements,
    solve_branch_and_bound,
    solve_brute_force,
    solve_lp_relax,
)

__version__ = "0.1.0"

__all__ = [
    "Ad",
    "AdInventory",
    "DEFAULT_CANDIDATE_CAP",
    "KeyframeFeatures",
    "Polarity",
    "ProfilePoint",
    "ProgramSpec",
    "RelevanceMatrix",
    "RewardParams",
    "Scene",
    "Schedule",
    "ScheduleEntry",
    "SolveReport",
    "Valence",
    "ValidationResult",
    "VpsProfile",
    "as_relevance",
    "build_profile",
    "build_relevance_matrix",
    "classify_polarity",
    "cosine_similarity",
    "enumerate_balanced_subsets",
    "enumerate_placements",
    "features_for",
    "pair_relevance",
    "random_instance",
    "reward",
    "slot_blocks",
    "solve_branch_and_bound",
    "solve_brute_force",
    "solve_lp_relax",
    "total_variation",
    "trivial_schedule",
    "validate_schedule",
]
