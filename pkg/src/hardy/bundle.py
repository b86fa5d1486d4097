"""Vectors of the selfadjoint subspace for compactly supported collision
coefficients: F(q, p) = 1_I(q) f_α(p) with |qx| < α on I × supp c.

F is cut to |p| ≤ P, so g = Φ*u vanishes for |μ| < 1/P and its line
transform lives on |s| ≤ sup|q| P, which a uniform x grid resolves. The
angle grid follows f_α(1/μ): one panel per unit of p, graded geometrically
towards ±1 and the ends of the cut, and a zero panel on |μ| < 1/P.
"""

import dataclasses
import functools
import logging
import math
from collections.abc import Sequence
from numbers import Integral, Real
from typing import Optional

import numpy as np
from beartype import beartype

from ..exceptions import DomainError, InvalidInputError, ParameterError, ResolutionError
from ..gap.construction import MembershipReport, verify_membership
from ..model.functions import Representation, StripFunction, strip_norm
from ..model.grids import AngleGrid, Grid1D
from ..model.kernel import CollisionKernel, IntervalCoefficient, TestFunctionFamily
from ..transforms.fourier import SQRT_2PI
from ..utils import map_blocks
from .analytic import HardyParams
from .boundary import (
    HardyProfile,
    _singular_points,
    boundary_values,
    f_alpha_function,
)

__all__ = [
    "CompactSupportBundle",
    "required_alpha",
    "bundle_angle_grid",
    "bundle_x_grid",
    "compact_support_bundle",
    "verify_bundle_membership",
    "bundle_gram",
    "gram_rank",
]

logger = logging.getLogger(__name__)

# geometric ratio of the panels graded towards a singular point of f_α
_GRADING = 4.0


def _hardy_config():
    from ..config import get_value

    return get_value().hardy


def _as_interval(interval: Sequence, what: str) -> tuple[float, float]:
    lo, hi = (float(v) for v in interval)
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        raise InvalidInputError(f"{what} must be a finite interval lo < hi, got {interval}")
    return lo, hi


@beartype
def required_alpha(interval: Sequence, supp_c: Sequence, margin: Real = 0.1) -> float:
    """Smallest admissible α: (1 + margin) sup|q| sup|x| over I × supp c"""
    q_lo, q_hi = _as_interval(interval, "I")
    x_lo, x_hi = _as_interval(supp_c, "supp c")
    return (1.0 + float(margin)) * max(abs(q_lo), abs(q_hi)) * max(abs(x_lo), abs(x_hi))


@dataclasses.dataclass(frozen=True, eq=False)
class CompactSupportBundle:
    """F = 1_I(q) f_α(p) 1_{|p| ≤ P}(p) and g = Φ*u for one choice of ρ"""

    params: HardyParams
    interval: tuple
    supp_c: tuple
    kernel: CollisionKernel
    profile: HardyProfile
    g: StripFunction
    p_max: float
    amplitude: np.ndarray = dataclasses.field(repr=False)

    @property
    def width(self) -> float:
        return self.interval[1] - self.interval[0]

    def density(self, q, p) -> np.ndarray:
        """F(q, p), with f_α interpolated between its samples"""
        q, p = np.asarray(q, dtype=float), np.asarray(p, dtype=float)
        inside = (q >= self.interval[0]) & (q <= self.interval[1]) & (np.abs(p) <= self.p_max)
        return np.where(inside, self.profile(p), 0.0)

    @functools.cached_property
    def F_norm(self) -> float:
        """‖F‖ in L²(|p| dq dp) = |I|^{1/2} (∫ |f_α(1/μ)|² |μ|^{-3} dμ)^{1/2},
        on the angle grid of g with exact values of f_α"""
        angles = self.g.angles
        mu = angles.nodes
        total = angles.weights @ (np.abs(self.amplitude) ** 2 / np.abs(mu) ** 3)
        return math.sqrt(self.width * max(float(total), 0.0))

    @functools.cached_property
    def profile_norm(self) -> float:
        """The same norm from the uniform samples of f_α on |p| ≤ P"""
        grid = self.profile.grid
        p = grid.nodes
        density = np.where(np.abs(p) <= self.p_max, np.abs(self.profile.values) ** 2 * np.abs(p), 0.0)
        return math.sqrt(self.width * max(float(grid.weights @ density), 0.0))

    @functools.cached_property
    def g_norm(self) -> float:
        """‖g‖ from its samples"""
        return strip_norm(self.g)

    @property
    def isometry_defect(self) -> float:
        """| ‖g‖ - ‖F‖ | / ‖F‖; the x box loses the |x|^{-1} tails of g"""
        return abs(self.g_norm - self.F_norm) / self.F_norm if self.F_norm else 0.0

    def manifest(self) -> dict:
        return {
            "params": self.params.model_dump(),
            "interval": list(self.interval),
            "supp_c": list(self.supp_c),
            "p_max": self.p_max,
            "F_norm": self.F_norm,
            "profile_norm": self.profile_norm,
            "g_norm": self.g_norm,
            "isometry_defect": self.isometry_defect,
            "inner_residual": self.profile.inner_residual,
            "excluded_nodes": self.profile.excluded,
            "angles": self.g.angles.n_angles,
            "angle_panels": len(self.g.angles.panel_edges) - 1,
            "x_nodes": self.g.grid.n,
            "x_spacing": self.g.grid.spacing,
        }


def _f_alpha_at(p: np.ndarray, params: HardyParams, guard: float) -> np.ndarray:
    """Exact f_α at the points p; 0 inside the guard bands"""
    distance = np.abs(p[:, None] - _singular_points(params)[None, :]).min(axis=1)
    admissible = distance >= guard
    out = np.zeros(p.size, dtype=complex)
    if np.any(admissible):
        out[admissible] = boundary_values(p[admissible], params, guard=guard).f_diff
    return out


def _p_breakpoints(params: HardyParams, p_max: float, guard: float) -> np.ndarray:
    """Panel ends in p on 1 ≤ |p| ≤ p_max: the integers, ±p_max and points
    s ± guard 4^k around every singular point s of f_α"""
    integers = np.arange(1.0, math.floor(p_max) + 1.0)
    points = [integers, -integers, np.array([p_max, -p_max])]
    singular = _singular_points(params)
    for s in singular:
        if not 1.0 <= abs(s) <= p_max:
            continue
        others = np.abs(singular[singular != s] - s)
        reach = min(0.5, float(others.min()) / 2)
        offsets = guard * _GRADING ** np.arange(int(math.log(reach / guard, _GRADING)) + 1)
        points.extend([s + offsets, s - offsets])
    p = np.concatenate(points)
    p = p[(np.abs(p) >= 1.0) & (np.abs(p) <= p_max)]
    for s in singular:
        p = p[~((p > s - guard) & (p < s + guard))]
    # the strip ends ±1 stay panel ends even inside their guard bands
    p = np.sort(np.concatenate([p, [-1.0, 1.0]]))
    return p[np.concatenate([[True], np.diff(p) > 1e-12])]


@beartype
def bundle_angle_grid(
    params,
    p_max: Optional[Real] = None,
    per_panel: Optional[Integral] = None,
    guard: Optional[Real] = None,
) -> AngleGrid:
    """Composite angle grid for the bundles of one or more :class:`HardyParams`.

    The panel ends are μ = 1/p for the breakpoints of every f_α, so bundles
    built on the grid of several parameter sets share their angles.
    """
    config = _hardy_config()
    p_max = float(config.bundle_p_max if p_max is None else p_max)
    per_panel = int(config.bundle_per_panel if per_panel is None else per_panel)
    guard = float(config.bundle_guard if guard is None else guard)
    if p_max <= 1.0:
        raise ParameterError(f"the p cutoff must exceed 1, got {p_max}")
    family = [params] if isinstance(params, HardyParams) else list(params)
    p = np.concatenate([_p_breakpoints(item, p_max, guard) for item in family])
    mu = np.unique(np.concatenate([1.0 / p, [0.0]]))
    edges = mu[np.concatenate([[True], np.diff(mu) > 1e-15])]
    return AngleGrid.composite(edges, per_panel)


@beartype
def bundle_x_grid(
    interval: Sequence, p_max: Optional[Real] = None, n: Optional[Integral] = None
) -> Grid1D:
    """Periodic box whose Nyquist band exceeds the band sup|q| P of g by 10%"""
    config = _hardy_config()
    q_lo, q_hi = _as_interval(interval, "I")
    p_max = float(config.bundle_p_max if p_max is None else p_max)
    n = int(config.bundle_x_nodes if n is None else n)
    spacing = math.pi / (1.1 * max(abs(q_lo), abs(q_hi)) * p_max)
    return Grid1D.centered(spacing, n, periodic=True)


def _closed_form_g(
    amplitude: np.ndarray, interval: tuple, angles: AngleGrid, x_grid: Grid1D
) -> StripFunction:
    """g(x, μ) = μ^{-2} f_α(1/μ) (2π)^{-1/2} ∫_I e^{ixq/μ} dq"""
    mu = angles.nodes
    q_lo, q_hi = interval
    x = x_grid.nodes
    values = np.zeros((x.size, mu.size), dtype=complex)

    def column(k: int) -> None:
        if amplitude[k] == 0.0:
            return
        kappa = x / mu[k]
        small = np.abs(kappa) < 1e-12
        safe = np.where(small, 1.0, kappa)
        window = np.where(
            small,
            q_hi - q_lo,
            (np.exp(1j * safe * q_hi) - np.exp(1j * safe * q_lo)) / (1j * safe),
        )
        values[:, k] = window * (amplitude[k] / mu[k] ** 2 / SQRT_2PI)

    map_blocks(column, range(mu.size))
    values.flags.writeable = False
    return StripFunction(Representation.POSITION, x_grid, angles, values)


@beartype
def compact_support_bundle(
    interval: Sequence,
    supp_c: Sequence,
    params: HardyParams,
    kernel: Optional[CollisionKernel] = None,
    profile: Optional[HardyProfile] = None,
    angles: Optional[AngleGrid] = None,
    x_grid: Optional[Grid1D] = None,
    p_max: Optional[Real] = None,
) -> CompactSupportBundle:
    """Build F = 1_I(q) f_α(p) 1_{|p| ≤ P} and its position representation.

    u(q, μ) = μ^{-2} F(q, 1/μ) separates, so g = Φ*u is evaluated in closed
    form from exact values of f_α at the points 1/μ.

    Args:
        interval: I in the spectral variable q
        supp_c: compact interval containing the support of every coefficient
        params (:obj:`HardyParams`): α must be at least :func:`required_alpha`
        kernel (:obj:`CollisionKernel`, optional): [default: c = 1 on supp c, φ = 1]
        profile (:obj:`HardyProfile`, optional): precomputed samples of f_α
        angles (:obj:`AngleGrid`, optional): [default: :func:`bundle_angle_grid`]
        x_grid (:obj:`Grid1D`, optional): [default: :func:`bundle_x_grid`]
        p_max (:obj:`float`, optional): cutoff P [default: `hardy.bundle_p_max`]

    Raises:
        ParameterError: α below the margin, or an angular degree of at least n
        ResolutionError: the x grid does not resolve the band sup|q| P
    """
    interval = _as_interval(interval, "I")
    supp_c = _as_interval(supp_c, "supp c")
    needed = required_alpha(interval, supp_c)
    if params.alpha < needed:
        raise ParameterError(
            f"alpha={params.alpha} is below sup|q| sup|x| with a 10% margin ({needed:.4g})"
        )
    kernel = kernel or CollisionKernel.single(IntervalCoefficient(*supp_c))
    if kernel.max_degree >= params.n:
        raise ParameterError(
            f"n = {params.n} must exceed the largest angular degree {kernel.max_degree}"
        )
    config = _hardy_config()
    p_max = float(config.bundle_p_max if p_max is None else p_max)
    if profile is None:
        profile = f_alpha_function(params)
    elif profile.params != params:
        raise InvalidInputError("the profile was sampled for other parameters")
    if profile.grid.hi < p_max or profile.grid.lo > -p_max:
        raise InvalidInputError(f"the samples of f_α do not reach the cutoff |p| = {p_max}")
    angles = angles or bundle_angle_grid(params, p_max)
    x_grid = x_grid or bundle_x_grid(interval, p_max)
    band = max(abs(interval[0]), abs(interval[1])) * p_max
    if math.pi / x_grid.spacing < band:
        spacing = math.pi / band
        raise ResolutionError(
            f"the x grid resolves |s| <= {math.pi / x_grid.spacing:.3f} but g reaches {band:.3f}",
            needed=int(math.ceil((x_grid.hi - x_grid.lo) / spacing)) + 1,
        )

    mu = angles.nodes
    if np.any(mu == 0.0):
        raise DomainError("the angle grid contains μ = 0")
    amplitude = np.zeros(mu.size, dtype=complex)
    active = np.abs(mu) >= 1.0 / p_max
    amplitude[active] = _f_alpha_at(1.0 / mu[active], params, float(config.bundle_guard))
    g = _closed_form_g(amplitude, interval, angles, x_grid)
    logger.info(
        "compact support bundle I=[%g, %g], supp c=[%g, %g], alpha=%g, %d angles, %d x nodes",
        *interval,
        *supp_c,
        params.alpha,
        angles.n_angles,
        x_grid.n,
    )
    return CompactSupportBundle(params, interval, supp_c, kernel, profile, g, p_max, amplitude)


@beartype
def verify_bundle_membership(
    bundle: CompactSupportBundle,
    t_grid=(0.0,),
    tests: Optional[TestFunctionFamily] = None,
) -> MembershipReport:
    """Normalized pairings ⟨g(· - μt, μ), φ_ℓ h⟩ / (‖g‖ ‖h‖ ‖φ_ℓ‖) from the
    samples of g, with the test functions on supp c by default.

    Raises:
        DomainError: μt leaves a quarter of the x box
    """
    t = np.atleast_1d(np.asarray(t_grid, dtype=float))
    reach = bundle.g.grid.period / 4
    if t.size and float(np.abs(t).max()) > reach:
        raise DomainError(f"translations up to {np.abs(t).max():.3f} exceed ±{reach:.3f}")
    return verify_membership(
        bundle.g, bundle.kernel, t_grid=t, tests=tests, window=bundle.supp_c, route="direct"
    )


@beartype
def bundle_gram(bundles: Sequence[CompactSupportBundle]) -> np.ndarray:
    """Gram matrix ⟨g_i, g_j⟩ from the samples, for bundles on common x and
    angle grids"""
    if not bundles:
        raise InvalidInputError("no bundles")
    first = bundles[0].g
    for other in bundles[1:]:
        if other.g.grid != first.grid or not np.array_equal(
            other.g.angles.nodes, first.angles.nodes
        ):
            raise InvalidInputError("bundles must share the x grid and the angles")
    weights = first.grid.weights[:, None] * first.angles.weights[None, :]
    size = len(bundles)
    gram = np.zeros((size, size), dtype=complex)
    for i, left in enumerate(bundles):
        weighted = left.g.values * weights
        for j in range(i, size):
            gram[i, j] = np.vdot(bundles[j].g.values, weighted)
            gram[j, i] = np.conj(gram[i, j])
    return gram


@beartype
def gram_rank(gram: np.ndarray, tol: Real = 1e-8) -> int:
    """Number of eigenvalues of a Hermitian Gram matrix above `tol` times
    the largest"""
    eigenvalues = np.linalg.eigvalsh(gram)
    top = float(np.abs(eigenvalues).max()) if eigenvalues.size else 0.0
    if top == 0.0:
        return 0
    return int(np.sum(eigenvalues > float(tol) * top))
