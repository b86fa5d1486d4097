"""Numerical checks of the two conditions on f and of the independence of
the constructed vectors."""

import logging
import math
from collections.abc import Callable, Sequence
from numbers import Integral, Real
from typing import Optional

import numpy as np
from beartype import beartype

from ..exceptions import DomainError, ParameterError, ResolutionError
from ..model.grids import Grid1D
from ..transforms.fourier import LineTransform
from .profiles import ScaledProfile

__all__ = [
    "verify_condition_i",
    "verify_condition_ii",
    "leakage_convergence",
    "independence_rank",
    "independence_check",
]

logger = logging.getLogger(__name__)


@beartype
def verify_condition_i(f: Callable, b: Real, samples: Integral = 20001) -> float:
    """max |f(p)| over a dense sampling of [-b, b]; zero when f vanishes
    on the window"""
    p = np.linspace(-float(b), float(b), int(samples))
    return float(np.abs(f(p)).max())


def _lattice_grid(a: float, cells: int, nodes_per_cell: int) -> Grid1D:
    if cells < 2 or cells % 2:
        raise ParameterError(f"the periodic lattice needs an even number of cells, got {cells}")
    return Grid1D.centered(a / nodes_per_cell, cells * nodes_per_cell)


@beartype
def verify_condition_ii(
    f: Callable,
    n: Integral,
    a: Real,
    eps: Real,
    cells: Optional[Integral] = None,
    nodes_per_cell: Optional[Integral] = None,
    tail_tolerance: Optional[Real] = None,
) -> list[float]:
    """Leakage of the Fourier transforms of f(p) p^{-j}, 0 ≤ j < n, outside
    the ε-vicinity of aℤ.

    The transforms are taken on a periodic lattice of `cells` periods with
    `nodes_per_cell` nodes each; its dual grid samples a 2π/a-periodic h
    exactly periodically, so any leakage comes from truncating the spectrum
    at π/Δx. A spectrum that still carries more than `tail_tolerance` of its
    mass in the outer tenth of the band raises :class:`ResolutionError`.

    Args:
        f (callable): vectorized f(p); a modulated profile is checked unmodulated
        n (:obj:`int`): number of powers
        a (:obj:`float`): lattice period
        eps (:obj:`float`): vicinity radius
        cells (:obj:`int`, optional): periods in the box [default: `construction.cells`]
        nodes_per_cell (:obj:`int`, optional): nodes per period [default: `construction.nodes_per_cell`]
        tail_tolerance (:obj:`float`, optional): largest band-edge mass fraction [default: `construction.tail_tolerance`]

    Returns:
        :obj:`list`: sup outside the vicinity over the global sup, per j
    """
    from ..config import get_value

    config = get_value().construction
    cells = int(config.cells if cells is None else cells)
    nodes_per_cell = int(config.nodes_per_cell if nodes_per_cell is None else nodes_per_cell)
    tail_tolerance = float(config.tail_tolerance if tail_tolerance is None else tail_tolerance)
    a, eps = float(a), float(eps)
    if isinstance(f, ScaledProfile):
        f = f.unshifted()

    grid = _lattice_grid(a, cells, nodes_per_cell)
    transform = LineTransform(grid)
    p = transform.dual.nodes
    values = np.asarray(f(p), dtype=complex)
    x = grid.nodes
    outside = np.abs(x - a * np.round(x / a)) >= eps
    at_zero = p == 0.0
    band = np.abs(p) > 0.9 * np.abs(p).max()

    residuals = []
    for j in range(int(n)):
        if j and np.any(values[at_zero] != 0):
            raise DomainError("f(p) p^{-j} is singular: f does not vanish at p = 0")
        spectrum = np.zeros_like(values)
        spectrum[~at_zero] = values[~at_zero] / p[~at_zero] ** j
        mass = float(np.sum(np.abs(spectrum) ** 2))
        if mass == 0.0:
            residuals.append(0.0)
            continue
        tail = float(np.sum(np.abs(spectrum[band]) ** 2)) / mass
        if tail > tail_tolerance:
            raise ResolutionError(
                f"spectrum of f p^-{j} is not resolved: {tail:.2e} of its mass lies at the band edge",
                needed=2 * nodes_per_cell,
            )
        kernel = np.abs(transform.backward(spectrum))
        residuals.append(float(kernel[outside].max() / kernel.max()))
    logger.info("condition (ii) leakage per power: %s", ", ".join(f"{r:.2e}" for r in residuals))
    return residuals


@beartype
def leakage_convergence(
    f: Callable,
    n: Integral,
    a: Real,
    eps: Real,
    levels: Sequence[Integral] = (64, 128, 256),
    cells: Integral = 16,
) -> tuple[np.ndarray, np.ndarray]:
    """Condition (ii) leakage on successively refined lattices.

    Each level is a node count per cell. The band-edge check is off, so
    coarse levels report their truncation leakage instead of raising.

    Returns:
        :obj:`tuple`: leakage of shape (levels, n), and per refinement step
        the observed order log(r_k / r_{k+1}) / log(N_{k+1} / N_k) of the
        worst power
    """
    nodes = np.array([int(level) for level in levels])
    if nodes.size < 2 or np.any(np.diff(nodes) <= 0):
        raise ParameterError("levels must be at least two increasing node counts")
    leakage = np.array(
        [
            verify_condition_ii(f, n, a, eps, cells=cells, nodes_per_cell=int(level), tail_tolerance=1.0)
            for level in nodes
        ]
    )
    worst = leakage.max(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        orders = np.log(worst[:-1] / worst[1:]) / np.log(nodes[1:] / nodes[:-1])
    logger.info(
        "condition (ii) leakage %s, observed orders %s",
        ", ".join(f"{r:.2e}" for r in worst),
        ", ".join(f"{order:.1f}" for order in orders),
    )
    return leakage, orders


@beartype
def independence_rank(
    h_list: Sequence[Callable],
    chi_list: Sequence[Callable],
    omega_hat: Optional[Callable] = None,
    c_points=None,
    q_sample=None,
    tol: Real = 1e-8,
) -> int:
    """Numerical rank of the family χ_j(q) h_j(pq) ω̂(pq).

    Along p = c/q every member reduces to χ_j(q) h_j(c) ω̂(c); the rank is
    that of the matrix of these values over points c and sample
    points q, with singular values below `tol` times the largest dropped.
    """
    if len(h_list) != len(chi_list):
        raise ParameterError("every h needs its χ")
    c_points = (
        np.arange(1024) * (2 * math.pi / 1024) if c_points is None else np.asarray(c_points, float)
    )
    q = np.linspace(-10.0, 10.0, 41) if q_sample is None else np.asarray(q_sample, float)
    weight = np.ones(c_points.size) if omega_hat is None else np.asarray(omega_hat(c_points))
    columns = [
        np.outer(h(c_points) * weight, chi(q)).ravel() for h, chi in zip(h_list, chi_list)
    ]
    singular = np.linalg.svd(np.stack(columns, axis=1), compute_uv=False)
    if singular.size == 0 or singular[0] == 0.0:
        return 0
    return int(np.sum(singular > float(tol) * singular[0]))


@beartype
def independence_check(
    h_list: Sequence[Callable],
    chi_list: Sequence[Callable],
    omega_hat: Optional[Callable] = None,
    c_points=None,
    q_sample=None,
    tol: Real = 1e-8,
) -> bool:
    """True when the vectors built from the pairs (h_j, χ_j) are linearly
    independent"""
    rank = independence_rank(h_list, chi_list, omega_hat, c_points, q_sample, tol)
    logger.info("independence rank %d of %d", rank, len(h_list))
    return rank == len(h_list)
