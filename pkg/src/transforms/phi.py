"""The mutually inverse unitary maps between position and spectral
representations on the strip ℝ × [-1, 1]:

    (Φ*u)(x, μ) = (2π)^{-1/2} ∫ e^{ixq/μ} u(q, μ) dq
    (Φf)(q, μ)  = |μ|^{-1} f̂_μ(q/μ)

where f̂_μ is the line Fourier transform of f(·, μ). Φ maps L²(dx dμ) onto
L²(|μ| dq dμ) and Φ(-iμ∂ₓ)Φ* is multiplication by q.
"""

import dataclasses
import logging
import math
from collections.abc import Callable
from numbers import Real
from typing import Optional

import numpy as np
from beartype import beartype

from ..exceptions import DomainError, InvalidInputError, ResolutionError
from ..model.functions import Representation, StripFunction
from ..model.grids import AngleGrid, Grid1D
from ..utils import map_blocks
from .fourier import SQRT_2PI, LineTransform, check_decay, fourier_at, spectral_derivative

__all__ = [
    "SupportWindow",
    "phi_forward",
    "phi_inverse",
    "phi_inverse_fft",
    "phi_inverse_product",
    "conjugation_residual",
]

logger = logging.getLogger(__name__)


def _fourier_config():
    from ..config import get_value

    return get_value().fourier


@dataclasses.dataclass(frozen=True)
class SupportWindow:
    """Closed interval ω in the spectral variable q"""

    lo: float
    hi: float

    def __post_init__(self):
        if not (np.isfinite(self.lo) and np.isfinite(self.hi)) or self.hi <= self.lo:
            raise InvalidInputError(
                f"a support window needs finite lo < hi, got [{self.lo}, {self.hi}]"
            )
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))

    @property
    def contains_zero(self) -> bool:
        return self.lo <= 0.0 <= self.hi

    @property
    def distance_to_zero(self) -> float:
        """dist(0, ω), 0 when ω contains 0"""
        if self.contains_zero:
            return 0.0
        return min(abs(self.lo), abs(self.hi))

    @property
    def sup_abs(self) -> float:
        return max(abs(self.lo), abs(self.hi))

    def require_off_zero(self, min_distance: Optional[Real] = None) -> float:
        """Check 0 ∉ ω with dist(0, ω) at least `min_distance` (default from
        configuration) and return the distance"""
        if min_distance is None:
            min_distance = _fourier_config().min_window_distance
        if self.contains_zero:
            raise DomainError(f"the window [{self.lo}, {self.hi}] contains 0")
        if self.distance_to_zero < min_distance:
            raise DomainError(
                f"the window [{self.lo}, {self.hi}] is closer than {min_distance} to 0"
            )
        return self.distance_to_zero

    def mask(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        return (q >= self.lo) & (q <= self.hi)

    def check_vanishes(self, u: StripFunction, tol: float = 1e-12) -> None:
        """Raise :class:`DomainError` unless u is (numerically) zero outside ω"""
        outside = ~self.mask(u.grid.nodes)
        if not np.any(outside):
            return
        peak = float(np.abs(u.values).max())
        if peak == 0.0:
            return
        leak = float(np.abs(u.values[outside]).max()) / peak
        if leak > tol:
            raise DomainError(
                f"samples do not vanish outside [{self.lo}, {self.hi}]: relative magnitude {leak:.3e}"
            )


def _require_rep(u: StripFunction, rep: Representation) -> None:
    if u.rep != rep:
        raise InvalidInputError(f"expected a {rep.value} representation, got {u.rep.value}")


@beartype
def phi_forward(f: StripFunction, q_grid: Grid1D) -> StripFunction:
    """Spectral representation Φf on `q_grid` × the angles of `f`.

    For each angle μ_k the line transform of f(·, μ_k) is evaluated at q/μ_k
    by band-limited interpolation. Frequencies beyond the Nyquist band of the
    x grid are taken as 0, and a :class:`TruncationWarning` is issued when
    either the samples or their spectrum fail to decay.

    Args:
        f (:obj:`StripFunction`): position representation
        q_grid (:obj:`Grid1D`): output grid in q

    Returns:
        :obj:`StripFunction`: spectral representation
    """
    _require_rep(f, Representation.POSITION)
    check_decay(f.values, axis=0)
    check_decay(LineTransform(f.grid).forward(f.values, axis=0), axis=0)

    mu = f.angles.nodes
    q = q_grid.nodes

    def column(k: int) -> np.ndarray:
        return fourier_at(f.values[:, k], f.grid, q / mu[k]) / abs(mu[k])

    columns = map_blocks(column, range(f.angles.n_angles))
    return StripFunction(
        Representation.SPECTRAL, q_grid, f.angles, np.stack(columns, axis=1)
    )


def _needed_q_nodes(q_grid: Grid1D, x_max: float, mu_min: float, per_period: float) -> int:
    return int(math.ceil(per_period * (q_grid.hi - q_grid.lo) * x_max / (2.0 * math.pi * mu_min))) + 1


@beartype
def phi_inverse(
    u: StripFunction,
    x_grid: Grid1D,
    window: Optional[SupportWindow] = None,
) -> StripFunction:
    """Position representation Φ*u on `x_grid` by direct quadrature in q.

    The kernel e^{ixq/μ} must be sampled with at least
    `fourier.min_nodes_per_period` q nodes per period at the largest |x|/|μ|
    requested; coarser grids raise :class:`ResolutionError` carrying the
    needed node count.

    Args:
        u (:obj:`StripFunction`): spectral representation
        x_grid (:obj:`Grid1D`): output grid in x
        window (:obj:`SupportWindow`, optional): declared support in q, checked

    Returns:
        :obj:`StripFunction`: position representation
    """
    _require_rep(u, Representation.SPECTRAL)
    config = _fourier_config()
    if window is not None:
        window.check_vanishes(u)

    x_max = max(abs(x_grid.lo), abs(x_grid.hi))
    mu = u.angles.nodes
    mu_min = float(np.abs(mu).min())
    per_period = 2.0 * math.pi * mu_min / (x_max * u.grid.spacing) if x_max > 0 else math.inf
    if per_period < config.min_nodes_per_period:
        needed = _needed_q_nodes(u.grid, x_max, mu_min, config.min_nodes_per_period)
        raise ResolutionError(
            f"{per_period:.2f} q nodes per period at |x| = {x_max}, |μ| = {mu_min:.4f}; "
            f"{needed} q nodes are needed",
            needed=needed,
        )

    q = u.grid.nodes
    weighted = u.values * u.grid.weights[:, None]
    x = x_grid.nodes
    block = int(config.block_size)

    def column(k: int) -> np.ndarray:
        out = np.empty(x.size, dtype=complex)
        for start in range(0, x.size, block):
            chunk = x[start : start + block]
            out[start : start + chunk.size] = np.exp(1j * np.outer(chunk, q) / mu[k]) @ weighted[:, k]
        return out / SQRT_2PI

    columns = map_blocks(column, range(u.angles.n_angles))
    return StripFunction(
        Representation.POSITION, x_grid, u.angles, np.stack(columns, axis=1)
    )


@beartype
def phi_inverse_fft(
    function: Callable,
    window: SupportWindow,
    x_grid: Grid1D,
    angles: AngleGrid,
) -> StripFunction:
    """Φ*u for a density given as a vectorized callable `function(q, mu)`.

    Substituting q = μs turns each angle into one inverse FFT,

        (Φ*u)(x, μ) = |μ| (2π)^{-1/2} ∫ e^{ixs} u(μs, μ) ds,

    on the dual of `x_grid`. The dual grid must reach |q|/|μ| for every q in
    `window` and every angle, otherwise :class:`ResolutionError` names the
    x node count that would.
    """
    transform = LineTransform(x_grid)
    s = transform.dual.nodes
    s_reach = min(abs(s[0]), abs(s[-1]))
    mu = angles.nodes
    mu_min = float(np.abs(mu).min())
    if window.sup_abs / mu_min > s_reach:
        needed = int(math.ceil((x_grid.hi - x_grid.lo) * window.sup_abs / (math.pi * mu_min))) + 2
        raise ResolutionError(
            f"the dual grid reaches |s| = {s_reach:.3f} but |q|/|μ| goes up to "
            f"{window.sup_abs / mu_min:.3f}; {needed} x nodes are needed",
            needed=needed,
        )

    def column(k: int) -> np.ndarray:
        samples = np.asarray(function(mu[k] * s, np.full(s.shape, mu[k])), dtype=complex)
        return abs(mu[k]) * transform.backward(samples)

    columns = map_blocks(column, range(angles.n_angles))
    values = np.stack(columns, axis=1)
    check_decay(values, axis=0)
    return StripFunction(Representation.POSITION, x_grid, angles, values)


@beartype
def phi_inverse_product(
    chi: Callable,
    f: Callable,
    x_grid: Grid1D,
    angles: AngleGrid,
) -> StripFunction:
    """Φ*u for u(q, μ) = μ^{-2} χ(q) f(q/μ).

    On the dual of `x_grid` the line transform of g(·, μ) is χ(μs) f(s)/|μ|,
    so f is sampled once and every angle costs one inverse FFT. On a
    periodic `x_grid` the result is the periodization of g over the box;
    otherwise the samples must decay at both ends.

    Args:
        chi (:obj:`Callable`): window in q, vectorized
        f (:obj:`Callable`): profile in s = q/μ, vectorized
        x_grid (:obj:`Grid1D`): output grid in x
        angles (:obj:`AngleGrid`): angles, none of them 0

    Returns:
        :obj:`StripFunction`: position representation
    """
    mu = angles.nodes
    if np.any(mu == 0.0):
        raise DomainError("the angle grid contains μ = 0")
    transform = LineTransform(x_grid)
    s = transform.dual.nodes
    profile = np.asarray(f(s), dtype=complex)
    values = np.empty((x_grid.n, angles.n_angles), dtype=complex)

    def column(k: int) -> None:
        values[:, k] = transform.backward(chi(mu[k] * s) * profile) / abs(mu[k])

    map_blocks(column, range(angles.n_angles))
    values.flags.writeable = False
    if not x_grid.periodic:
        check_decay(values, axis=0)
    logger.debug("Φ* of a product density on %d x nodes, %d angles", x_grid.n, angles.n_angles)
    return StripFunction(Representation.POSITION, x_grid, angles, values)


@beartype
def conjugation_residual(u: StripFunction, x_grid: Grid1D) -> float:
    """Relative deviation of Φ(-iμ∂ₓ)Φ*u from q·u.

    The derivative is spectral on `x_grid`; the result is compared on the q
    grid of `u`.
    """
    _require_rep(u, Representation.SPECTRAL)
    g = phi_inverse(u, x_grid)
    derivative = spectral_derivative(g.values, x_grid, axis=0)
    applied = -1j * u.angles.nodes[None, :] * derivative
    back = phi_forward(g.with_values(applied), u.grid)
    expected = u.grid.nodes[:, None] * u.values
    scale = float(np.abs(expected).max())
    if scale == 0.0:
        return float(np.abs(back.values).max())
    return float(np.abs(back.values - expected).max()) / scale
