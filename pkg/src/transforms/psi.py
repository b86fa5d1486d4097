"""The change of variables J, the transform Ψ and the sampling identity that
ties them to free evolution in the position representation.

    (Jv)(q, s) = s^{-2} v(q, 1/s)  for |s| > 1,  0 for |s| < 1
    (Ψv)(q, x) = (2π)^{-1/2} ∫_{|p|>1} e^{ixqp} p^{-2} v(q, 1/p) dp
               = (𝓕Jv)(q, -xq)
"""

import dataclasses
import logging
from numbers import Real
from typing import Optional

import numpy as np
import scipy.integrate
import scipy.interpolate
from beartype import beartype

from ..exceptions import InvalidInputError
from ..model.functions import PlaneFunction, Representation, StripFunction
from ..model.grids import AngleGrid, Grid1D
from ..model.kernel import AngularFactor, HatFunction
from .fourier import SQRT_2PI, fourier_at
from .phi import SupportWindow

__all__ = [
    "interpolate_angles",
    "j_map",
    "branch_weights",
    "psi_values",
    "psi_transform",
    "psi_direct",
    "IdentityReport",
    "sampling_identity_check",
]

logger = logging.getLogger(__name__)


def _p_grid(p_max: Optional[int], per_unit: Optional[int]) -> Grid1D:
    from ..config import get_value

    fourier = get_value().fourier
    p_max = fourier.p_max if p_max is None else p_max
    per_unit = fourier.p_per_unit if per_unit is None else per_unit
    return Grid1D.spectral(p_max, per_unit)


@beartype
def interpolate_angles(u: StripFunction, mu) -> np.ndarray:
    """Values of u(q, μ) at arbitrary angles, shape `(u.grid.n, len(mu))`.

    Double angle grids are interpolated separately on each half by the
    barycentric form of the Gauss–Legendre interpolant, so functions that
    are polynomial on each half are reproduced exactly.
    """
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    nodes = u.angles.nodes
    out = np.empty((u.grid.n, mu.size), dtype=complex)
    if u.angles.kind == "full":
        halves = [(np.ones(mu.size, bool), np.ones(nodes.size, bool))]
    else:
        halves = [(mu < 0, nodes < 0), (mu >= 0, nodes > 0)]
    for targets, sources in halves:
        if not np.any(targets):
            continue
        interpolant = scipy.interpolate.BarycentricInterpolator(
            nodes[sources], u.values[:, sources].T, axis=0
        )
        out[:, targets] = np.asarray(interpolant(mu[targets])).T
    return out


def _check_window(v: StripFunction, window: SupportWindow) -> None:
    if v.rep != Representation.SPECTRAL:
        raise InvalidInputError("expected a spectral representation")
    window.require_off_zero()
    window.check_vanishes(v)


@beartype
def j_map(
    v: StripFunction,
    window: SupportWindow,
    p_max: Optional[int] = None,
    per_unit: Optional[int] = None,
) -> PlaneFunction:
    """(Jv)(q, s) on the symmetric grid [-p_max, p_max] with nodes at ±1.

    The region |s| < 1 is stored as exact zeros.

    Args:
        v (:obj:`StripFunction`): spectral representation vanishing outside `window`
        window (:obj:`SupportWindow`): support in q, 0 ∉ window
        p_max (:obj:`int`, optional): cutoff in s [default: `fourier.p_max`]
        per_unit (:obj:`int`, optional): nodes per unit of s [default: `fourier.p_per_unit`]

    Returns:
        :obj:`PlaneFunction`: samples over (q, s)
    """
    _check_window(v, window)
    s_grid = _p_grid(p_max, per_unit)
    s = s_grid.nodes
    outer = np.abs(s) >= 1.0 - 1e-12
    values = np.zeros((v.grid.n, s_grid.n), dtype=complex)
    values[:, outer] = interpolate_angles(v, 1.0 / s[outer]) / s[outer] ** 2
    return PlaneFunction(v.grid, s_grid, values, axis_label="s")


@beartype
def branch_weights(s_grid: Grid1D) -> np.ndarray:
    """Quadrature weights on `s_grid` that integrate s ≥ 1 and s ≤ -1 by
    separate Simpson rules and give |s| < 1 zero weight"""
    template = PlaneFunction(
        Grid1D(0.0, 1.0, 2), s_grid, np.zeros((2, s_grid.n)), axis_label="s"
    ).to_density()
    weights = np.zeros(s_grid.n)
    for indices, branch in template.branches():
        weights[indices] += branch
    return weights


@beartype
def psi_values(
    v: StripFunction,
    window: SupportWindow,
    x,
    p_max: Optional[int] = None,
    per_unit: Optional[int] = None,
) -> np.ndarray:
    """(Ψv)(q, x) for every q of `v` and every `x`, shape `(v.grid.n, len(x))`.

    J is applied first, then the transform in s is evaluated at -xq with the
    branch rule of :func:`branch_weights`, which keeps the jumps of Jv at
    |s| = 1 out of the quadrature error.
    """
    jv = j_map(v, window, p_max, per_unit)
    weights = branch_weights(jv.second_grid)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    q = v.grid.nodes
    out = np.zeros((q.size, x.size), dtype=complex)
    for i in np.nonzero(np.any(jv.values != 0, axis=1))[0]:
        out[i] = fourier_at(jv.values[i], jv.second_grid, -x * q[i], weights=weights)
    return out


@beartype
def psi_transform(
    v: StripFunction,
    window: SupportWindow,
    x_grid: Grid1D,
    p_max: Optional[int] = None,
    per_unit: Optional[int] = None,
) -> PlaneFunction:
    """Ψv on the q grid of `v` × `x_grid`.

    Args:
        v (:obj:`StripFunction`): spectral representation vanishing outside `window`
        window (:obj:`SupportWindow`): support in q with dist(0, ω) ≥ `fourier.min_window_distance`
        x_grid (:obj:`Grid1D`): output grid in x
        p_max (:obj:`int`, optional): cutoff of the p integral
        per_unit (:obj:`int`, optional): p nodes per unit length

    Returns:
        :obj:`PlaneFunction`: samples over (q, x)
    """
    values = psi_values(v, window, x_grid.nodes, p_max, per_unit)
    return PlaneFunction(v.grid, x_grid, values, axis_label="x")


def _half_line(function, omega: float, weight: str) -> float:
    if omega == 0.0:
        if weight == "sin":
            return 0.0
        return scipy.integrate.quad(function, 1.0, np.inf, epsabs=1e-13, limit=500)[0]
    value = scipy.integrate.quad(
        function, 1.0, np.inf, weight=weight, wvar=abs(omega), epsabs=1e-13, limlst=200
    )[0]
    if weight == "sin" and omega < 0:
        return -value
    return value


@beartype
def psi_direct(function, q: Real, x: Real) -> complex:
    """Brute-force (Ψv)(q, x) for a density given as a callable
    `function(q, mu)`, by oscillatory quadrature on the two half-lines.

    Serves as an oracle for :func:`psi_transform`.
    """
    q = float(q)
    omega = float(x) * q

    def upper(p):
        return complex(function(q, 1.0 / p)) / p**2

    def lower(p):
        return complex(function(q, -1.0 / p)) / p**2

    def part(select, combine):
        return lambda p: select(combine(upper(p), lower(p)))

    total = 0j
    for select, unit in ((np.real, 1.0), (np.imag, 1j)):
        cos_part = _half_line(part(select, lambda a, b: a + b), omega, "cos")
        sin_part = _half_line(part(select, lambda a, b: a - b), omega, "sin")
        total += unit * (cos_part + 1j * sin_part)
    return total / SQRT_2PI


@dataclasses.dataclass(frozen=True)
class IdentityReport:
    """Both sides of the sampling identity at each t and their largest
    absolute difference"""

    t: np.ndarray
    left: np.ndarray
    right: np.ndarray
    discrepancy: float


@beartype
def sampling_identity_check(
    u: StripFunction,
    phi: AngularFactor,
    h: HatFunction,
    t_grid,
    window: SupportWindow,
    fine_angles: int = 512,
    p_max: Optional[int] = None,
    per_unit: Optional[int] = None,
) -> IdentityReport:
    """Compare the two sides of

        ∬ conj(h(x)) φ(μ) (Φ*u)(x - μt, μ) dμ dx = ∫ e^{-iqt} ⟨Ψ(uφ)(q, ·), h⟩ dq

    for every t in `t_grid`.

    The left side translates Φ*u by a phase e^{-iqt} in the spectral
    representation, integrates x against h in closed form through ĥ, and μ
    on a fine Gauss–Legendre grid. The right side goes through J, the p
    quadrature of Ψ, and the quadrature of h on its linear pieces. Both share
    the outer q rule of `u`.

    Args:
        u (:obj:`StripFunction`): spectral representation vanishing outside `window`
        phi (:obj:`AngularFactor`): angular factor
        h (:obj:`HatFunction`): compactly supported test function
        t_grid: times
        window (:obj:`SupportWindow`): support of u in q
        fine_angles (:obj:`int`): angles of the left-side μ rule

    Returns:
        :obj:`IdentityReport`: both sides and their discrepancy
    """
    _check_window(u, window)
    t = np.atleast_1d(np.asarray(t_grid, dtype=float))
    q = u.grid.nodes
    q_weights = u.grid.weights

    fine = AngleGrid(fine_angles, "double")
    mu = fine.nodes
    u_fine = interpolate_angles(u, mu)
    h_hat = h.fourier(q[:, None] / mu[None, :])
    left_inner = (u_fine * np.conj(h_hat)) @ (fine.weights * phi(mu))

    u_phi = u.with_values(u.values * phi(u.angles.nodes)[None, :])
    x_nodes, x_weights = h.quadrature()
    psi = psi_values(u_phi, window, x_nodes, p_max, per_unit)
    right_inner = psi @ (x_weights * np.conj(h(x_nodes)))

    phases = np.exp(-1j * np.outer(t, q)) * q_weights[None, :]
    left = phases @ left_inner
    right = phases @ right_inner
    discrepancy = float(np.abs(left - right).max()) if t.size else 0.0
    logger.debug("sampling identity discrepancy %.3e over %d times", discrepancy, t.size)
    return IdentityReport(t, left, right, discrepancy)
