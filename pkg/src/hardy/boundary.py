"""Boundary values of φ_α on the real axis, the difference f_α = f⁺ - f⁻
and the check that its Fourier transform vanishes on [-α, α]."""

import dataclasses
import logging
import math
from numbers import Real
from typing import Optional

import numpy as np
from beartype import beartype

from ..exceptions import BoundaryConvergenceError, ConstructionViolationError, DomainError
from ..model.functions import LineFunction
from ..model.grids import Grid1D
from ..transforms.fourier import SQRT_2PI, LineTransform, fourier_at
from .analytic import HardyParams, phi_alpha

__all__ = [
    "BoundaryPair",
    "HardyProfile",
    "HatLeakage",
    "hardy_grid",
    "boundary_values",
    "ladder_sensitivity",
    "f_alpha_function",
    "verify_hat_vanishes",
]

logger = logging.getLogger(__name__)


def _hardy_config():
    from ..config import get_value

    return get_value().hardy


@dataclasses.dataclass(frozen=True, eq=False)
class BoundaryPair:
    """f⁺ and f⁻ at the points `x`, and their difference (exactly 0 on (-1, 1))"""

    x: np.ndarray
    f_plus: np.ndarray
    f_minus: np.ndarray
    f_diff: np.ndarray
    certificate: float


def _singular_points(params: HardyParams) -> np.ndarray:
    return np.array([-1.0, 1.0, -params.rho_a, -params.rho_b])


def _neville_at_zero(eta: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Value at η = 0 of the polynomial through (η_i, values[i])"""
    table = [row.copy() for row in values]
    size = len(eta)
    for level in range(1, size):
        for i in range(size - level):
            j = i + level
            table[i] = (eta[j] * table[i] - eta[i] * table[i + 1]) / (eta[j] - eta[i])
    return table[0]


def _local_scale(x: np.ndarray, params: HardyParams) -> np.ndarray:
    """Length over which φ_α varies near x: the distance to the nearest
    singular point, capped by 1 and by the oscillation length 1/α"""
    distance = np.abs(x[:, None] - _singular_points(params)[None, :]).min(axis=1)
    return np.minimum(np.minimum(distance, 1.0), 1.0 / params.alpha)


def _extrapolate(x: np.ndarray, params: HardyParams, side: float) -> tuple[np.ndarray, float]:
    if x.size == 0:
        return np.zeros(0, dtype=complex), 0.0
    # the ladder is measured in units of the local scale
    eta = np.asarray(params.eta_ladder, dtype=float)
    scale = _local_scale(x, params)
    samples = np.array([phi_alpha(x + side * 1j * e * scale, params) for e in eta])
    full = _neville_at_zero(eta, samples)
    reduced = _neville_at_zero(eta[1:], samples[1:])
    magnitude = np.abs(full)
    peak = float(magnitude.max())
    if peak == 0.0:
        return full, 0.0
    floor = np.maximum(magnitude, 1e-6 * peak)
    return full, float(np.max(np.abs(full - reduced) / floor))


@beartype
def boundary_values(
    x, params: HardyParams, tol: Optional[Real] = None, guard: Optional[Real] = None
) -> BoundaryPair:
    """Limits of φ_α(x ± iη) as η → 0, by polynomial extrapolation over the
    η ladder. Near ±1, near the ends of J and for large α the ladder is
    shrunk to the local scale of φ_α.

    The certificate is the largest relative change between extrapolating
    with the whole ladder and without its coarsest rung. `guard` replaces
    the configured `hardy.guard_band`.

    Raises:
        DomainError: a point lies within the guard band of ±1 or of an end of J
        BoundaryConvergenceError: the certificate exceeds `tol`
    """
    config = _hardy_config()
    tol = float(config.convergence_tolerance if tol is None else tol)
    guard = float(config.guard_band if guard is None else guard)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    distance = np.abs(x[:, None] - _singular_points(params)[None, :]).min(axis=1)
    if np.any(distance < guard):
        raise DomainError(
            f"boundary values need a distance of {guard} from ±1 and the ends of the cut"
        )
    f_plus, above = _extrapolate(x, params, 1.0)
    f_minus, below = _extrapolate(x, params, -1.0)
    certificate = max(above, below)
    if certificate > tol:
        raise BoundaryConvergenceError(
            f"boundary values did not converge along the η ladder: relative change {certificate:.2e}",
            ratios=(above, below),
        )
    f_diff = f_plus - f_minus
    f_diff[np.abs(x) < 1.0] = 0.0
    return BoundaryPair(x, f_plus, f_minus, f_diff, certificate)


@beartype
def ladder_sensitivity(x, params: HardyParams) -> float:
    """Largest change of f⁺ and f⁻ when every rung of the η ladder is
    halved, relative to their peak. Points inside guard bands are skipped."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    distance = np.abs(x[:, None] - _singular_points(params)[None, :]).min(axis=1)
    x = x[distance >= _hardy_config().guard_band]
    halved = params.model_copy(update={"eta_ladder": [eta / 2 for eta in params.eta_ladder]})
    base, fine = boundary_values(x, params), boundary_values(x, halved)
    change = 0.0
    for before, after in ((base.f_plus, fine.f_plus), (base.f_minus, fine.f_minus)):
        peak = float(np.abs(before).max()) if before.size else 0.0
        if peak > 0.0:
            change = max(change, float(np.abs(after - before).max()) / peak)
    return change


@dataclasses.dataclass(frozen=True, eq=False)
class HardyProfile:
    """Samples of f_α on a uniform grid with the audit of f_α = 0 on (-1, 1).

    Nodes inside guard bands carry 0; `excluded` counts them.
    """

    params: HardyParams
    line: LineFunction
    inner_residual: float
    excluded: int

    @property
    def grid(self) -> Grid1D:
        return self.line.grid

    @property
    def values(self) -> np.ndarray:
        return self.line.values

    def weighted_norm(self) -> float:
        """(∫ |f_α(p)|² |p| dp)^{1/2} on the grid"""
        density = np.abs(self.values) ** 2 * np.abs(self.grid.nodes)
        return math.sqrt(max(float(self.grid.weights @ density), 0.0))

    def __call__(self, p) -> np.ndarray:
        """Linear interpolation of the samples, 0 beyond the grid"""
        p = np.asarray(p, dtype=float)
        nodes = self.grid.nodes
        real = np.interp(p, nodes, self.values.real, 0.0, 0.0)
        imag = np.interp(p, nodes, self.values.imag, 0.0, 0.0)
        return real + 1j * imag


@beartype
def hardy_grid(x_max: Optional[Real] = None, nodes_per_unit: Optional[int] = None) -> Grid1D:
    """Symmetric grid on [-x_max, x_max] (configuration `hardy`)"""
    config = _hardy_config()
    x_max = float(config.x_max if x_max is None else x_max)
    per_unit = int(config.nodes_per_unit if nodes_per_unit is None else nodes_per_unit)
    return Grid1D(-x_max, x_max, int(2 * x_max * per_unit) + 1)


@beartype
def f_alpha_function(params: HardyParams, x_grid: Optional[Grid1D] = None) -> HardyProfile:
    """f_α = f⁺ - f⁻ sampled on `x_grid`.

    Before the samples on (-1, 1) are set to exact zeros, the largest |f_diff|
    there relative to its peak is recorded; above the convergence tolerance
    it raises :class:`ConstructionViolationError`.
    """
    config = _hardy_config()
    x_grid = x_grid or hardy_grid()
    x = x_grid.nodes
    distance = np.abs(x[:, None] - _singular_points(params)[None, :]).min(axis=1)
    admissible = distance >= config.guard_band
    pair = boundary_values(x[admissible], params)
    raw = pair.f_plus - pair.f_minus
    inner = np.abs(pair.x) < 1.0
    peak = float(np.abs(raw).max()) if raw.size else 0.0
    inner_residual = float(np.abs(raw[inner]).max()) / peak if peak and np.any(inner) else 0.0
    if inner_residual > config.convergence_tolerance:
        raise ConstructionViolationError(
            f"f_α does not vanish on (-1, 1): relative magnitude {inner_residual:.2e}"
        )
    values = np.zeros(x.size, dtype=complex)
    values[admissible] = pair.f_diff
    logger.info(
        "f_α on %d nodes, %d excluded by guard bands, inner residual %.2e",
        x.size,
        int((~admissible).sum()),
        inner_residual,
    )
    return HardyProfile(params, LineFunction(x_grid, values), inner_residual, int((~admissible).sum()))


@dataclasses.dataclass(frozen=True)
class HatLeakage:
    """sup of |f̂| on |p| ≤ α - margin relative to its global sup, with a
    bound on the error from truncating the slowly decaying tails"""

    leakage: float
    truncation_bound: float
    alpha: float
    margin: float


@beartype
def verify_hat_vanishes(
    f_alpha, alpha: Real, margin: Optional[Real] = None, spacing: Real = 0.01
) -> HatLeakage:
    """Audit that the Fourier transform of f_α vanishes on [-α, α].

    Accepts a :class:`HardyProfile` or any :class:`LineFunction`. The
    transform is evaluated by the Simpson rule of the grid at the multiples
    of `spacing` in [-(α - margin), α - margin], so a smaller α checks
    a subset of the same frequencies; the global sup comes from the FFT. Tails beyond the grid decay
    like |x|^{-2}; their contribution is bounded by 2 |f|_end x_max / √(2π).

    Args:
        f_alpha: samples of the function
        alpha (:obj:`float`): half-width of the vanishing interval
        margin (:obj:`float`, optional): [default: 0.05 α]
        spacing (:obj:`float`): spacing of the checked frequencies

    Returns:
        :obj:`HatLeakage`: relative leakage and truncation bound
    """
    line = f_alpha.line if isinstance(f_alpha, HardyProfile) else f_alpha
    alpha = float(alpha)
    margin = 0.05 * alpha if margin is None else float(margin)
    reach = alpha - margin
    if reach <= 0:
        raise DomainError("the margin leaves no interval to check")
    grid = line.grid
    steps = int(math.floor(reach / float(spacing)))
    p = np.arange(-steps, steps + 1) * float(spacing)
    inside = np.abs(
        fourier_at(line.values, grid, p, weights=grid.weights, block_size=16)
    )
    peak = max(
        float(np.abs(LineTransform(grid).forward(line.values)).max()), float(inside.max())
    )
    if peak == 0.0:
        return HatLeakage(0.0, 0.0, alpha, margin)
    x_max = max(abs(grid.lo), abs(grid.hi))
    end = float(max(abs(line.values[0]), abs(line.values[-1])))
    bound = 2.0 * end * x_max / SQRT_2PI / peak
    leakage = float(inside.max()) / peak
    logger.info("f̂ leakage %.2e on |p| <= %.3f (truncation bound %.2e)", leakage, reach, bound)
    return HatLeakage(leakage, bound, alpha, margin)
