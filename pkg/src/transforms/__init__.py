"""Integral transforms between the position, spectral and (q, p)
representations, with the identities that relate them."""

from .fourier import (
    LineTransform,
    check_decay,
    fourier_at,
    fourier_line,
    fourier_second,
    inverse_fourier_line,
    spectral_derivative,
    translate,
)
from .phi import (
    SupportWindow,
    conjugation_residual,
    phi_forward,
    phi_inverse,
    phi_inverse_fft,
    phi_inverse_product,
)
from .psi import (
    IdentityReport,
    branch_weights,
    interpolate_angles,
    j_map,
    psi_direct,
    psi_transform,
    psi_values,
    sampling_identity_check,
)

__all__ = [
    "IdentityReport",
    "LineTransform",
    "SupportWindow",
    "branch_weights",
    "check_decay",
    "conjugation_residual",
    "fourier_at",
    "fourier_line",
    "fourier_second",
    "interpolate_angles",
    "inverse_fourier_line",
    "j_map",
    "phi_forward",
    "phi_inverse",
    "phi_inverse_fft",
    "phi_inverse_product",
    "psi_direct",
    "psi_transform",
    "psi_values",
    "sampling_identity_check",
    "spectral_derivative",
    "translate",
]
