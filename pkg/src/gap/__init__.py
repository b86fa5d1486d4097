"""Explicit vectors of the selfadjoint subspace for collision coefficients
that vanish near a lattice."""

from .conditions import (
    independence_check,
    independence_rank,
    leakage_convergence,
    verify_condition_i,
    verify_condition_ii,
)
from .construction import (
    ConstructionBundle,
    LatticeConstructionParams,
    MembershipReport,
    assemble_F,
    construct_gap_bundle,
    density_to_subspace,
    lattice_position_grid,
    position_angle_grid,
    position_grid,
    verify_membership,
)
from .profiles import (
    Bump,
    ChiWindow,
    PeriodicBump,
    ProfileQuadrature,
    ScaledProfile,
    WindowKind,
    Xi,
    build_bump,
    build_f,
    build_periodic_h,
    build_window_chi,
    build_xi,
    profile_gram,
)

__all__ = [
    "Bump",
    "ChiWindow",
    "PeriodicBump",
    "ProfileQuadrature",
    "ScaledProfile",
    "WindowKind",
    "Xi",
    "build_bump",
    "build_f",
    "build_periodic_h",
    "build_window_chi",
    "build_xi",
    "profile_gram",
    "independence_check",
    "independence_rank",
    "leakage_convergence",
    "verify_condition_i",
    "verify_condition_ii",
    "ConstructionBundle",
    "LatticeConstructionParams",
    "MembershipReport",
    "assemble_F",
    "construct_gap_bundle",
    "density_to_subspace",
    "lattice_position_grid",
    "position_angle_grid",
    "position_grid",
    "verify_membership",
]
