"""Envy-free fair-division solvers on the simplex with logarithmic query costs."""

from .geometry import (
    BarycentricPoint,
    GridPoint,
    SubSimplexState,
    bary_distance,
    center,
    cut,
    hyperplane_distance,
    normalize_grid,
)
from .preferences import (
    Oracle,
    PreferenceProfile,
    QueryTranscript,
    generate_profile,
    membership,
    profile_from_json,
    profile_to_json,
    validate_covering,
)
from .solvers import (
    FairDivisionCertificate,
    budget_cake,
    budget_convex,
    budget_rent,
    solve_cake,
    solve_convex3,
    solve_rent,
)
from .verifier import check_eps_fair, grid_search_fair, set_distance, verify_certificate

__all__ = [
    "BarycentricPoint",
    "GridPoint",
    "SubSimplexState",
    "bary_distance",
    "center",
    "cut",
    "hyperplane_distance",
    "normalize_grid",
    "Oracle",
    "PreferenceProfile",
    "QueryTranscript",
    "generate_profile",
    "membership",
    "profile_from_json",
    "profile_to_json",
    "validate_covering",
    "FairDivisionCertificate",
    "budget_cake",
    "budget_convex",
    "budget_rent",
    "solve_cake",
    "solve_convex3",
    "solve_rent",
    "check_eps_fair",
    "grid_search_fair",
    "set_distance",
    "verify_certificate",
]

__version__ = "0.1.0"
