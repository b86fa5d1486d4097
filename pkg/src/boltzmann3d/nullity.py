"""Fourier-side vectors of the selfadjoint subspace of the 3D operator

    (Lu)(x, μ) = iμ·∇ₓu + i Σ_ℓ c_ℓ(x) φ_ℓ(μ) ∫_{S²} u(x, μ') conj(φ_ℓ(μ')) dS(μ').

With the polar axis along p, e^{it⟨p,μ⟩} depends on θ only; a û whose ψ
integral against every φ_ℓ vanishes at each (p, θ) satisfies

    ∫_{S²} e^{it⟨p,μ⟩} û(p, μ) conj(φ_ℓ(μ)) dS(μ) = 0    for all t,

for any coefficients c_ℓ.
"""

import dataclasses
import logging
import math
from collections.abc import Callable, Sequence
from numbers import Real
from typing import Optional

import numpy as np
from beartype import beartype

from ..exceptions import ConstructionViolationError, InvalidInputError, ResolutionError
from .sphere import FrameField, SphereGrid, spherical_frame

__all__ = [
    "SphereKernel",
    "SphereSamples",
    "isotropic_factor",
    "component_factor",
    "sample_on_sphere",
    "build_azimuthal_null",
    "azimuthal_residual",
    "verify_fourier_nullity",
]

logger = logging.getLogger(__name__)

NODES_PER_OSCILLATION = 10


def isotropic_factor(mu: np.ndarray) -> np.ndarray:
    """φ ≡ 1"""
    return np.ones(mu.shape[:-1], dtype=complex)


def component_factor(axis: int) -> Callable:
    """φ(μ) = μ_axis"""

    def factor(mu: np.ndarray) -> np.ndarray:
        return mu[..., axis].astype(complex)

    factor.__name__ = f"mu_{axis + 1}"
    return factor


@dataclasses.dataclass(frozen=True)
class SphereKernel:
    """Angular factors φ_ℓ on S², vectorized over (..., 3) arrays of
    directions. The multiplication coefficients c_ℓ play no role in the
    construction and are not stored."""

    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors:
            raise InvalidInputError("a kernel needs at least one angular factor")

    @property
    def n(self) -> int:
        return len(self.factors)

    @classmethod
    def isotropic(cls) -> "SphereKernel":
        return cls((isotropic_factor,))


@dataclasses.dataclass(frozen=True, eq=False)
class SphereSamples:
    """û(p, μ) at the nodes of `grid` in the frame of each p; `values` has
    shape (len(p), n_theta, m_psi)"""

    frames: FrameField
    grid: SphereGrid
    values: np.ndarray

    def __post_init__(self):
        expected = (self.frames.p.shape[0], self.grid.n_theta, self.grid.m_psi)
        if self.values.shape != expected:
            raise InvalidInputError(f"expected shape {expected}, got {self.values.shape}")

    @property
    def p(self) -> np.ndarray:
        return self.frames.p

    def norms(self) -> np.ndarray:
        """‖û(p, ·)‖ in L²(S²), one per p"""
        return np.sqrt(np.einsum("ij,nij->n", self.grid.weights, np.abs(self.values) ** 2))


@beartype
def sample_on_sphere(
    function: Callable, p_sample, grid: Optional[SphereGrid] = None
) -> SphereSamples:
    """Sample `function(p, mu)` with p of shape (N, 3) broadcast against
    directions of shape (N, n_theta, m_psi, 3)"""
    grid = grid or SphereGrid.from_config()
    frames = spherical_frame(p_sample)
    mu = frames.directions(grid)
    values = np.asarray(function(frames.p[:, None, None, :], mu), dtype=complex)
    return SphereSamples(frames, grid, np.broadcast_to(values, mu.shape[:-1]).copy())


def radial_gaussian(norm: np.ndarray) -> np.ndarray:
    return np.exp(-(norm**2) / 2)


def polar_gaussian(cos_theta: np.ndarray) -> np.ndarray:
    latitude = np.arccos(np.clip(cos_theta, -1.0, 1.0)) - math.pi / 2
    return np.exp(-(latitude**2) / 2)


def _factor_samples(kernel: SphereKernel, mu: np.ndarray) -> np.ndarray:
    """φ_ℓ at the directions, shape (n, N, n_theta, m_psi)"""
    return np.stack([np.asarray(factor(mu), dtype=complex) for factor in kernel.factors])


@beartype
def build_azimuthal_null(
    kernel: SphereKernel,
    p_sample,
    m: int,
    grid: Optional[SphereGrid] = None,
    radial: Callable = radial_gaussian,
    polar: Callable = polar_gaussian,
) -> SphereSamples:
    """û(p, μ) = w(|p|) g(θ) e^{imψ}, projected at every (p, θ) onto the
    orthogonal complement of span{ψ ↦ φ_ℓ(μ(ψ, θ))} in the discrete ψ inner
    product.

    Args:
        kernel (:obj:`SphereKernel`): angular factors
        p_sample: momenta, shape (N, 3)
        m (:obj:`int`): nonzero azimuthal order with |m| < m_psi / 2
        grid (:obj:`SphereGrid`, optional): [default: configuration `sphere`]
        radial (callable): w(|p|)
        polar (callable): g(cos θ)

    Raises:
        ConstructionViolationError: the projection removes the candidate
            entirely; another m may survive
    """
    grid = grid or SphereGrid.from_config()
    if m == 0 or abs(m) >= grid.m_psi // 2:
        raise InvalidInputError(f"m must be nonzero with |m| < {grid.m_psi // 2}, got {m}")
    frames = spherical_frame(p_sample)
    mu = frames.directions(grid)
    candidate = (
        radial(frames.norm)[:, None, None]
        * polar(grid.cos_theta)[None, :, None]
        * np.exp(1j * m * grid.psi)[None, None, :]
    ).astype(complex)

    factors = _factor_samples(kernel, mu)
    values = np.empty_like(candidate)
    for i in range(candidate.shape[0]):
        for j in range(grid.n_theta):
            span = factors[:, i, j, :].T
            left, singular, _ = np.linalg.svd(span, full_matrices=False)
            keep = singular > 1e-12 * max(float(singular.max()), 1e-300)
            basis = left[:, keep]
            profile = candidate[i, j]
            values[i, j] = profile - basis @ (basis.conj().T @ profile)

    if np.abs(values).max() <= 1e-12 * np.abs(candidate).max():
        raise ConstructionViolationError(
            f"the angular factors absorb the e^{{i{m}ψ}} profile at every node; try another m"
        )
    logger.info("azimuthal-null vector of order %d on %d momenta", m, candidate.shape[0])
    return SphereSamples(frames, grid, values)


@beartype
def azimuthal_residual(u: SphereSamples, kernel: SphereKernel) -> float:
    """max over (p, θ, ℓ) of |Σ_ψ û conj(φ_ℓ)| Δψ"""
    factors = _factor_samples(kernel, u.frames.directions(u.grid))
    sums = np.einsum("nij,lnij->lni", u.values, factors.conj()) * u.grid.psi_weight
    return float(np.abs(sums).max())


@beartype
def verify_fourier_nullity(
    u: SphereSamples, kernel: SphereKernel, t_sample: Sequence | np.ndarray
) -> float:
    """max over p, t and ℓ of

        |∫ e^{it⟨p,μ⟩} û(p, μ) conj(φ_ℓ(μ)) dS(μ)| / (‖û(p, ·)‖ ‖φ_ℓ‖)

    by the product rule of the sphere grid.

    Raises:
        ResolutionError: t|p| needs more than n_theta / 10 oscillations in cos θ
    """
    t = np.asarray(t_sample, dtype=float)
    grid = u.grid
    norms = u.frames.norm
    reach = float(np.abs(t).max() * norms.max()) if t.size else 0.0
    needed = int(math.ceil(NODES_PER_OSCILLATION * reach / math.pi))
    if needed > grid.n_theta:
        raise ResolutionError(
            f"t|p| = {reach:.3g} needs {needed} nodes in cos θ, the grid has {grid.n_theta}",
            needed=needed,
        )
    factors = _factor_samples(kernel, u.frames.directions(grid))
    factor_norms = np.sqrt(np.einsum("ij,lnij->ln", grid.weights, np.abs(factors) ** 2))
    u_norms = u.norms()
    worst = 0.0
    for time in t:
        # ⟨p, μ⟩ = |p| cos θ in the frame of p
        phase = np.exp(1j * time * np.outer(norms, grid.cos_theta))
        integrand = (u.values * phase[:, :, None])[None] * factors.conj()
        integrals = np.einsum("ij,lnij->ln", grid.weights, integrand)
        scale = u_norms[None, :] * factor_norms
        ratio = np.divide(np.abs(integrals), scale, out=np.zeros_like(scale), where=scale > 0)
        worst = max(worst, float(ratio.max()))
    logger.info("fourier nullity residual %.3e over %d times", worst, t.size)
    return worst
