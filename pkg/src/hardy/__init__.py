"""The analytic family φ_α, the difference of its boundary values f_α and
the compact-support construction built on it."""

from .analytic import (
    HardyParams,
    half_plane_modulus,
    half_plane_stability,
    half_plane_sup,
    phi_alpha,
    rho_factor,
    sqrt_branch,
)
from .boundary import (
    BoundaryPair,
    HardyProfile,
    HatLeakage,
    boundary_values,
    f_alpha_function,
    hardy_grid,
    ladder_sensitivity,
    verify_hat_vanishes,
)
from .bundle import (
    CompactSupportBundle,
    bundle_angle_grid,
    bundle_gram,
    bundle_x_grid,
    compact_support_bundle,
    gram_rank,
    required_alpha,
    verify_bundle_membership,
)

__all__ = [
    "HardyParams",
    "half_plane_modulus",
    "half_plane_stability",
    "half_plane_sup",
    "phi_alpha",
    "rho_factor",
    "sqrt_branch",
    "BoundaryPair",
    "HardyProfile",
    "HatLeakage",
    "boundary_values",
    "f_alpha_function",
    "hardy_grid",
    "ladder_sensitivity",
    "verify_hat_vanishes",
    "CompactSupportBundle",
    "bundle_angle_grid",
    "bundle_gram",
    "bundle_x_grid",
    "compact_support_bundle",
    "gram_rank",
    "required_alpha",
    "verify_bundle_membership",
]
