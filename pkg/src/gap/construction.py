"""Vectors of the selfadjoint subspace for gap-lattice collision coefficients.

Given f with the two conditions, F(q, p) = χ(q) f(pq) is a spectral density
whose position representation g lies in the selfadjoint subspace: for every
test function h supported inside supp c_ℓ

    ∬ g(x - μt, μ) conj(φ_ℓ(μ)) conj(h(x)) dμ dx = 0    for all t.
"""

import dataclasses
import functools
import logging
import math
from collections.abc import Callable
from numbers import Integral, Real
from typing import Literal, Optional, Union

import numpy as np
import pydantic
from beartype import beartype

from ..exceptions import (
    ConstructionViolationError,
    DomainError,
    InvalidInputError,
    ParameterError,
    ResolutionError,
)
from ..model.functions import (
    Representation,
    SpectralDensity,
    StripFunction,
    strip_norm,
)
from ..model.grids import AngleGrid, Grid1D
from ..model.kernel import (
    CollisionKernel,
    GapLatticeCoefficient,
    TestFunctionFamily,
)
from ..transforms.fourier import LineTransform
from ..transforms.phi import SupportWindow, phi_inverse, phi_inverse_fft, phi_inverse_product
from ..utils import map_blocks
from .conditions import verify_condition_i, verify_condition_ii
from .profiles import (
    Bump,
    ChiWindow,
    PeriodicBump,
    ScaledProfile,
    WindowKind,
    Xi,
    build_bump,
    build_f,
    build_periodic_h,
    build_window_chi,
    build_xi,
)

__all__ = [
    "LatticeConstructionParams",
    "ConstructionBundle",
    "MembershipReport",
    "assemble_F",
    "density_to_subspace",
    "position_grid",
    "lattice_position_grid",
    "position_angle_grid",
    "verify_membership",
    "construct_gap_bundle",
]

logger = logging.getLogger(__name__)


class LatticeConstructionParams(pydantic.BaseModel):
    """Parameters of the gap-lattice construction and its sampling grids.

    Unset grid fields fall back to the `construction` configuration.
    """

    model_config = pydantic.ConfigDict(extra="forbid", frozen=True)

    a: float = pydantic.Field(default=1.0, gt=0)
    eps: float = pydantic.Field(default=0.25, gt=0)
    x0: float = 0.0
    b: float = pydantic.Field(default=3.0, gt=0)
    nu: float = pydantic.Field(default=0.1, gt=0, lt=math.pi)
    n: int = pydantic.Field(default=1, ge=1)
    window: WindowKind = "smooth"
    window_power: int = pydantic.Field(default=16, ge=1)
    q_nodes: int = pydantic.Field(default=121, ge=3)
    p_max: Optional[float] = pydantic.Field(default=None, gt=1)
    p_per_unit: int = pydantic.Field(default=16, ge=1)
    position_angles: Optional[int] = pydantic.Field(default=None, ge=2)
    position_panels: Optional[int] = pydantic.Field(default=None, ge=1)
    position_nodes: Optional[int] = pydantic.Field(default=None, ge=64)
    band_tolerance: Optional[float] = pydantic.Field(default=None, gt=0, lt=0.5)

    @pydantic.model_validator(mode="after")
    def _hypotheses(self) -> "LatticeConstructionParams":
        if self.eps >= self.a / 2:
            raise ValueError(f"eps={self.eps} must be smaller than a/2={self.a / 2}")
        if self.b >= math.pi / self.a:
            raise ValueError(f"b={self.b} must be smaller than π/a={math.pi / self.a}")
        if (math.pi - self.nu) / self.a < self.b:
            raise ValueError(
                f"h must vanish on [-ab, ab]: (π - ν)/a = {(math.pi - self.nu) / self.a} < b = {self.b}"
            )
        if self.position_angles is not None and self.position_angles % 2:
            raise ValueError("position_angles must be even")
        if (
            self.position_angles is not None
            and self.position_panels is not None
            and self.position_angles % (2 * self.position_panels)
        ):
            raise ValueError("position_angles must be a multiple of 2 * position_panels")
        return self

    @property
    def delta(self) -> float:
        return self.eps / self.a

    @property
    def p_cutoff(self) -> float:
        return 64.0 / self.a if self.p_max is None else self.p_max


MembershipRoute = Literal["direct", "fourier"]

# spectral samples of g below this fraction of the column peak are skipped
_SPECTRUM_FLOOR = 1e-13


@dataclasses.dataclass(frozen=True)
class MembershipReport:
    """Largest normalized pairing over channels, test functions and times.

    `pairings[ℓ]` holds, for channel ℓ, an array of shape (tests, times).
    """

    residual: float
    pairings: tuple
    route: str

    def passes(self, tol: Optional[Real] = None) -> bool:
        if tol is None:
            from ..config import get_value

            tol = get_value().tolerances.membership
        return self.residual < float(tol)


@dataclasses.dataclass(frozen=True, eq=False)
class ConstructionBundle:
    """Everything built for one set of parameters"""

    params: LatticeConstructionParams
    kernel: CollisionKernel
    omega0: Bump
    h: PeriodicBump
    xi: Xi
    f: ScaledProfile
    chi: ChiWindow
    F: SpectralDensity
    u: StripFunction
    g: StripFunction
    leakage: tuple = ()

    @functools.cached_property
    def F_norm(self) -> float:
        """‖F‖ in L²(|p| dq dp), from ∫|χ(q)/q|² dq · ∫ |f(r)|² |r| dr"""
        return self.chi.over_q_norm * self.f.weighted_norm()

    @functools.cached_property
    def g_norm(self) -> float:
        """‖g‖ in L²(dx dμ) from the samples of g"""
        return strip_norm(self.g)

    @property
    def isometry_defect(self) -> float:
        """|‖g‖ - ‖F‖| / ‖F‖"""
        if self.F_norm == 0.0:
            return self.g_norm
        return abs(self.g_norm - self.F_norm) / self.F_norm

    def manifest(self) -> dict:
        return {
            "params": self.params.model_dump(),
            "leakage": list(self.leakage),
            "F_norm": self.F_norm,
            "g_norm": self.g_norm,
            "isometry_defect": self.isometry_defect,
            "window": self.chi.kind,
            "angles": self.u.angles.n_angles,
            "angle_panels": int(self.u.angles.panel_edges.size - 1),
            "x_nodes": self.g.grid.n,
            "x_period": self.g.grid.period if self.g.grid.periodic else None,
        }


@beartype
def assemble_F(
    chi: Callable, f: Callable, q_grid: Grid1D, p_grid: Grid1D
) -> SpectralDensity:
    """F(q, p) = χ(q) f(pq) sampled on q × p.

    F must vanish for |p| < 1; the product is evaluated there first and a
    nonzero value raises :class:`ConstructionViolationError`.
    """
    p = p_grid.nodes
    inner = p[np.abs(p) < 1.0]
    if inner.size:
        leak = chi(q_grid.nodes)[:, None] * f(np.multiply.outer(q_grid.nodes, inner))
        if np.any(leak != 0):
            raise ConstructionViolationError(
                f"χ(q) f(pq) is nonzero for |p| < 1 (max {np.abs(leak).max():.3e})"
            )

    def density(q, p):
        return chi(q) * f(p * q)

    return SpectralDensity.sample(density, q_grid, p_grid)


def _density_at(F: SpectralDensity, q, p) -> np.ndarray:
    """F at (q_i, p_j) for the grid q; exact when F carries `evaluate`,
    linear interpolation in p otherwise"""
    if F.evaluate is not None:
        return F.evaluate(q, p)
    nodes = F.p_grid.nodes
    out = np.empty(np.broadcast(q, p).shape, dtype=complex)
    columns = np.asarray(p)[0]
    for i in range(F.q_grid.n):
        row = F.values[i]
        out[i] = np.interp(columns, nodes, row.real, 0.0, 0.0) + 1j * np.interp(
            columns, nodes, row.imag, 0.0, 0.0
        )
    return out


@beartype
def position_grid(
    q_sup: Real, angles: AngleGrid, feature_width: Real = 0.2, per_feature: int = 8
) -> Grid1D:
    """Centered x grid whose dual reaches 1.1 sup|q|/min|μ| and resolves
    features of width `feature_width` in s = q/μ with `per_feature` nodes"""
    mu_min = float(np.abs(angles.nodes).min())
    spacing = math.pi / (1.1 * float(q_sup) / mu_min)
    length = 2 * math.pi * per_feature / float(feature_width)
    n = 2 ** int(math.ceil(math.log2(length / spacing)))
    return Grid1D.centered(spacing, n)


@beartype
def lattice_position_grid(band: Real, a: Real, n: Integral) -> Grid1D:
    """Periodic x grid of `n` nodes on a box of K lattice periods.

    K is the largest count whose spacing Ka/n keeps the Nyquist band π/Δx
    at or above `band`. The dual spacing 2π/(Ka) then divides the period
    2π/a of the lattice profile, and translating a test function supported
    in a gap by the box length keeps it inside a gap.

    Raises:
        ResolutionError: not even one lattice period fits
    """
    band, a, n = float(band), float(a), int(n)
    if band <= 0.0:
        raise InvalidInputError(f"the band must be positive, got {band}")
    cells = int(math.floor(n * math.pi / (band * a)))
    if cells < 1:
        needed = int(math.ceil(band * a / math.pi))
        raise ResolutionError(
            f"{n} x nodes cannot resolve the band {band:.3f} on one lattice period; "
            f"{needed} are needed",
            needed=needed,
        )
    return Grid1D.centered(cells * a / n, n, periodic=True)


@beartype
def position_angle_grid(
    n_angles: Optional[Integral] = None, panels: Optional[Integral] = None
) -> AngleGrid:
    """Graded angle rule for the position representation [default:
    `construction.position_angles` on `construction.position_panels` panels
    per half]"""
    from ..config import get_value

    config = get_value().construction
    n_angles = int(config.position_angles if n_angles is None else n_angles)
    panels = int(config.position_panels if panels is None else panels)
    return AngleGrid(n_angles, "graded", panels)


@beartype
def density_to_subspace(
    F: SpectralDensity,
    angles: Optional[AngleGrid] = None,
    x_grid: Optional[Grid1D] = None,
    factors: Optional[tuple] = None,
) -> tuple[StripFunction, StripFunction]:
    """u(q, μ) = μ^{-2} F(q, 1/μ) and its position representation g = Φ*u.

    With `factors = (χ, f)` for F(q, p) = χ(q) f(pq), g comes from one
    inverse FFT per angle of χ(μs) f(s)/|μ|, f being sampled once on the
    dual of `x_grid`. Otherwise an exact `evaluate` on F gives one inverse
    FFT per angle of u(μs, μ), and plain samples go through direct
    quadrature in q.

    Args:
        F (:obj:`SpectralDensity`): density on |p| ≥ 1
        angles (:obj:`AngleGrid`, optional): [default: :func:`position_angle_grid`]
        x_grid (:obj:`Grid1D`, optional): [default: :func:`position_grid`]
        factors (:obj:`tuple`, optional): (χ, f) when F is a product

    Returns:
        :obj:`tuple`: (u, g)
    """
    if angles is None:
        angles = position_angle_grid()
    mu = angles.nodes
    if np.any(mu == 0.0):
        raise DomainError("the angle grid contains μ = 0")
    q_grid = F.q_grid
    q, mu_mesh = np.meshgrid(q_grid.nodes, mu, indexing="ij")
    u = StripFunction(
        Representation.SPECTRAL,
        q_grid,
        angles,
        _density_at(F, q, 1.0 / mu_mesh) / mu_mesh**2,
    )
    window = SupportWindow(q_grid.lo, q_grid.hi)
    if x_grid is None:
        x_grid = position_grid(window.sup_abs, angles)
    if factors is not None:
        chi, f = factors
        g = phi_inverse_product(chi, f, x_grid, angles)
    elif F.evaluate is not None:
        evaluate = F.evaluate
        g = phi_inverse_fft(lambda q, m: evaluate(q, 1.0 / m) / m**2, window, x_grid, angles)
    else:
        g = phi_inverse(u, x_grid)
    return u, g


def _window_moments(chi: Callable, b: float, powers: int, t: np.ndarray) -> np.ndarray:
    """∫ e^{-iqt} χ(q) q^j / |q| dq over [-b, b], shape (powers, times)"""
    nodes, weights = np.polynomial.legendre.leggauss(64)
    q = np.concatenate([b / 2 * (nodes - 1), b / 2 * (nodes + 1)])
    w = np.concatenate([b / 2 * weights, b / 2 * weights])
    base = chi(q) / np.abs(q) * w
    phase = np.exp(-1j * np.outer(q, t))
    return np.array([(base * q**j) @ phase for j in range(powers)])


def _fourier_route(
    bundle: ConstructionBundle, tests: TestFunctionFamily, t: np.ndarray
) -> tuple[list, float]:
    rule = bundle.f.quadrature()
    scale = bundle.F_norm
    pairings, worst = [], 0.0
    for channel, hats in zip(bundle.kernel.channels, tests.functions):
        coefficients = np.array(channel.factor.coefficients)
        moments = _window_moments(bundle.chi, bundle.params.b, coefficients.size, t)
        factor_norm = channel.factor.norm
        rows = []
        for hat in hats:
            h_hat = np.conj(hat.fourier(rule.nodes))
            lattice = np.array(
                [
                    rule.integrate(rule.values / rule.nodes**j * h_hat)
                    for j in range(coefficients.size)
                ]
            )
            values = (np.conj(coefficients) * lattice) @ moments
            rows.append(np.abs(values) / (scale * hat.norm * factor_norm))
        block = np.array(rows)
        worst = max(worst, float(block.max()))
        pairings.append(block)
    return pairings, worst


def _direct_route(
    g: StripFunction,
    kernel: CollisionKernel,
    tests: TestFunctionFamily,
    t: np.ndarray,
) -> tuple[list, float]:
    """Pair the samples of g with the translated test functions.

    For each angle the samples are transformed once; the x integral is then
    the Parseval sum Σ_n ĝ(s_n, μ) e^{-i s_n μ t} conj(ĥ(s_n)) Δs, in which
    the translation by μt is a phase.
    """
    if g.rep != Representation.POSITION:
        raise InvalidInputError("membership is checked on the position representation")
    mu = g.angles.nodes
    if not g.grid.periodic:
        reach = (g.grid.hi - g.grid.lo) / 4
        if t.size and float(np.abs(t).max()) * float(np.abs(mu).max()) > reach:
            raise DomainError(
                f"translations up to {np.abs(t).max():.3f} leave the safe range ±{reach:.3f} of the x grid"
            )
    scale = strip_norm(g)
    if scale == 0.0:
        blocks = [np.zeros((len(hats), t.size)) for hats in tests.functions]
        return blocks, 0.0

    transform = LineTransform(g.grid)
    s = transform.dual.nodes
    step = transform.dual.spacing

    def angle(k: int) -> Optional[list]:
        spectrum = transform.forward(g.values[:, k])
        magnitude = np.abs(spectrum)
        peak = float(magnitude.max())
        if peak == 0.0:
            return None
        keep = magnitude > _SPECTRUM_FLOOR * peak
        nodes = s[keep]
        phase = np.exp(-1j * np.outer(t, nodes * mu[k]))
        weighted = spectrum[keep] * step
        return [
            np.array([phase @ (weighted * np.conj(hat.fourier(nodes))) for hat in hats])
            for hats in tests.functions
        ]

    per_angle = map_blocks(angle, range(g.angles.n_angles))
    pairings, worst = [], 0.0
    for index, (channel, hats) in enumerate(zip(kernel.channels, tests.functions)):
        angular = g.angles.weights * np.conj(channel.factor(mu))
        values = np.zeros((len(hats), t.size), dtype=complex)
        for k, contribution in enumerate(per_angle):
            if contribution is not None:
                values += angular[k] * contribution[index]
        norms = np.array([hat.norm for hat in hats])[:, None]
        block = np.abs(values) / (scale * norms * channel.factor.norm)
        worst = max(worst, float(block.max()))
        pairings.append(block)
    return pairings, worst


@beartype
def verify_membership(
    target: Union[ConstructionBundle, StripFunction],
    kernel: Optional[CollisionKernel] = None,
    t_grid=(0.0,),
    tests: Optional[TestFunctionFamily] = None,
    window: tuple = (-4.0, 4.0),
    route: MembershipRoute = "direct",
) -> MembershipReport:
    """Normalized pairings ⟨g(· - μt, μ), φ_ℓ h⟩ / (‖g‖ ‖h‖ ‖φ_ℓ‖).

    The direct route pairs the samples of g (the bundle's g for a
    :class:`ConstructionBundle`). The Fourier route needs a bundle whose
    angular factors are polynomials on all of [-1, 1]: with r = pq the
    pairing splits into Σ_j conj(c_j) ∫ f(r) r^{-j} conj(ĥ(r)) dr times a q
    integral of χ, computed from f and χ without the samples of g.

    Args:
        target: a bundle, or the position representation of g
        kernel (:obj:`CollisionKernel`, optional): required for samples
        t_grid: times
        tests (:obj:`TestFunctionFamily`, optional): [default: hats on the supports in `window`]
        window (:obj:`tuple`): x range for the default test functions
        route (:obj:`str`): `direct` or `fourier`

    Returns:
        :obj:`MembershipReport`: largest normalized pairing
    """
    t = np.atleast_1d(np.asarray(t_grid, dtype=float))
    if isinstance(target, ConstructionBundle):
        kernel = kernel or target.kernel
    elif kernel is None:
        raise InvalidInputError("a kernel is needed to check sampled functions")
    tests = tests or TestFunctionFamily.from_kernel(kernel, window)
    if len(tests.functions) != kernel.n:
        raise InvalidInputError("one list of test functions per channel is needed")

    if route == "fourier":
        if not isinstance(target, ConstructionBundle):
            raise InvalidInputError("the Fourier route needs a construction bundle")
        if not all(ch.factor.support == (-1.0, 1.0) for ch in kernel.channels):
            raise InvalidInputError("the Fourier route needs factors supported on all of [-1, 1]")
        pairings, residual = _fourier_route(target, tests, t)
    else:
        g = target.g if isinstance(target, ConstructionBundle) else target
        pairings, residual = _direct_route(g, kernel, tests, t)
    logger.info("membership residual %.3e (%s route, %d times)", residual, route, t.size)
    return MembershipReport(residual, tuple(pairings), route)


@beartype
def construct_gap_bundle(
    params: LatticeConstructionParams,
    kernel: Optional[CollisionKernel] = None,
    h: Optional[PeriodicBump] = None,
    omega0: Optional[Bump] = None,
    chi: Optional[ChiWindow] = None,
    angles: Optional[AngleGrid] = None,
    x_grid: Optional[Grid1D] = None,
    check_leakage: bool = True,
) -> ConstructionBundle:
    """Build F = χ(q) f(pq), u and g for a gap lattice x0 + aℤ.

    The lattice through x0 is handled by building f for x0 = 0 and
    modulating it by e^{-i x0 r}, which translates g by x0. Unless given, g
    is sampled on a periodic box of whole lattice periods
    (:func:`lattice_position_grid`) whose Nyquist band covers f up to the
    relative norm loss `band_tolerance`.

    Raises:
        ParameterError: h does not vanish on [-ab, ab], or a factor is too long
        ConstructionViolationError: a condition on f fails numerically
    """
    from ..config import get_value

    config = get_value()
    kernel = kernel or CollisionKernel.single(
        GapLatticeCoefficient(params.x0, params.a, params.eps)
    )
    if kernel.max_degree >= params.n:
        raise ParameterError(
            f"n = {params.n} must exceed the largest angular degree {kernel.max_degree}"
        )
    omega0 = omega0 or build_bump(params.delta)
    if omega0.delta > params.delta:
        raise ParameterError(f"ω₀ must be supported in (-{params.delta}, {params.delta})")
    h = h or build_periodic_h(params.nu)
    if h.zero_radius < params.a * params.b:
        raise ParameterError(
            f"h must vanish on [-ab, ab] = [-{params.a * params.b}, {params.a * params.b}]"
        )
    xi = build_xi(h, omega0, params.n)
    f = build_f(xi, params.a)
    chi = chi or build_window_chi(params.b, params.window, params.window_power)

    if verify_condition_i(f, params.b) != 0.0:
        raise ConstructionViolationError("f does not vanish on [-b, b]")
    leakage: tuple = ()
    if check_leakage:
        leakage = tuple(verify_condition_ii(f, params.n, params.a, params.eps))
        if max(leakage) > config.tolerances.leakage:
            raise ConstructionViolationError(
                f"condition (ii) leakage {max(leakage):.3e} exceeds {config.tolerances.leakage}"
            )
    if params.x0:
        f = f.shifted(params.x0)

    q_grid = Grid1D(-params.b, params.b, params.q_nodes)
    p_grid = Grid1D.spectral(params.p_cutoff, params.p_per_unit)
    F = assemble_F(chi, f, q_grid, p_grid)
    if angles is None:
        angles = position_angle_grid(params.position_angles, params.position_panels)
    if x_grid is None:
        band = f.band(params.band_tolerance)
        nodes = params.position_nodes or config.construction.position_nodes
        x_grid = lattice_position_grid(band, params.a, nodes)
    u, g = density_to_subspace(F, angles, x_grid, factors=(chi, f))
    logger.info(
        "constructed gap bundle a=%g eps=%g b=%g n=%d on %d x nodes, %d angles",
        params.a,
        params.eps,
        params.b,
        params.n,
        x_grid.n,
        angles.n_angles,
    )
    return ConstructionBundle(params, kernel, omega0, h, xi, f, chi, F, u, g, leakage)
