"""Nonzero vectors of the selfadjoint subspace of the three-dimensional
Boltzmann operator, built from profiles with vanishing azimuthal averages."""

from .nullity import (
    SphereKernel,
    SphereSamples,
    azimuthal_residual,
    build_azimuthal_null,
    component_factor,
    isotropic_factor,
    sample_on_sphere,
    verify_fourier_nullity,
)
from .sphere import FrameField, SphereGrid, rotation_matrix, spherical_frame

__all__ = [
    "SphereKernel",
    "SphereSamples",
    "azimuthal_residual",
    "build_azimuthal_null",
    "component_factor",
    "isotropic_factor",
    "sample_on_sphere",
    "verify_fourier_nullity",
    "FrameField",
    "SphereGrid",
    "rotation_matrix",
    "spherical_frame",
]
