"""Sampled function containers and their weighted norms."""

import dataclasses
import enum
import logging
from collections.abc import Callable
from typing import Literal, Optional

import numpy as np
from beartype import beartype

from ..exceptions import InvalidInputError
from .grids import AngleGrid, Grid1D, simpson_weights

__all__ = [
    "Representation",
    "LineFunction",
    "StripFunction",
    "SpectralDensity",
    "PlaneFunction",
    "weighted_norm",
    "strip_norm",
    "line_norm",
]

logger = logging.getLogger(__name__)

StripWeight = Literal["plain", "abs_mu"]
"""Weight of the L² norm on the strip"""


class Representation(str, enum.Enum):
    """Variables a strip function is sampled in"""

    POSITION = "position"
    SPECTRAL = "spectral"


def _check_finite(values: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(values)):
        raise InvalidInputError(f"{what} contains non-finite samples")


def _frozen(values) -> np.ndarray:
    if isinstance(values, np.ndarray) and values.dtype == complex and not values.flags.writeable:
        return values
    array = np.array(values, dtype=complex)
    array.flags.writeable = False
    return array


@dataclasses.dataclass(frozen=True, eq=False)
class LineFunction:
    """Samples of a function ℝ → ℂ on a uniform grid"""

    grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        values = _frozen(self.values)
        if values.shape != (self.grid.n,):
            raise InvalidInputError(
                f"expected {self.grid.n} samples, got shape {values.shape}"
            )
        _check_finite(values, "line function")
        object.__setattr__(self, "values", values)

    @classmethod
    def sample(cls, function: Callable, grid: Grid1D) -> "LineFunction":
        """Sample a vectorized callable on a grid"""
        return cls(grid, function(grid.nodes))


@dataclasses.dataclass(frozen=True, eq=False)
class StripFunction:
    """Samples of u(x, μ) (position) or u(q, μ) (spectral) on grid × angles.

    `values[i, k]` is the sample at `grid.nodes[i]`, `angles.nodes[k]`.
    """

    rep: Representation
    grid: Grid1D
    angles: AngleGrid
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rep", Representation(self.rep))
        values = _frozen(self.values)
        if values.shape != (self.grid.n, self.angles.n_angles):
            raise InvalidInputError(
                f"expected shape {(self.grid.n, self.angles.n_angles)}, got {values.shape}"
            )
        _check_finite(values, "strip function")
        object.__setattr__(self, "values", values)

    @classmethod
    def sample(
        cls,
        function: Callable,
        rep: Representation,
        grid: Grid1D,
        angles: AngleGrid,
    ) -> "StripFunction":
        """Sample a vectorized callable `function(x_or_q, mu)`"""
        first, mu = np.meshgrid(grid.nodes, angles.nodes, indexing="ij")
        return cls(rep, grid, angles, function(first, mu))

    def with_values(self, values: np.ndarray) -> "StripFunction":
        return StripFunction(self.rep, self.grid, self.angles, values)


@dataclasses.dataclass(frozen=True, eq=False)
class SpectralDensity:
    """Samples of F(q, p) on a q × p grid, zero for |p| < 1.

    When the density comes from a construction, `evaluate` is the exact
    callable `evaluate(q, p)` it was sampled from; transforms use it instead
    of interpolating between samples.
    """

    q_grid: Grid1D
    p_grid: Grid1D
    values: np.ndarray
    evaluate: Optional[Callable] = None

    def __post_init__(self):
        values = _frozen(self.values)
        if values.shape != (self.q_grid.n, self.p_grid.n):
            raise InvalidInputError(
                f"expected shape {(self.q_grid.n, self.p_grid.n)}, got {values.shape}"
            )
        _check_finite(values, "spectral density")
        inner = np.abs(self.p_grid.nodes) < 1.0 - 1e-12
        if np.any(values[:, inner] != 0):
            raise InvalidInputError("a spectral density must vanish for |p| < 1")
        object.__setattr__(self, "values", values)

    @classmethod
    def sample(
        cls, function: Callable, q_grid: Grid1D, p_grid: Grid1D
    ) -> "SpectralDensity":
        """Sample `function(q, p)` on |p| >= 1 and keep it as `evaluate`"""

        def evaluate(q, p):
            q, p = np.broadcast_arrays(np.asarray(q, float), np.asarray(p, float))
            out = np.zeros(q.shape, dtype=complex)
            outer = np.abs(p) >= 1.0
            out[outer] = function(q[outer], p[outer])
            return out

        q, p = np.meshgrid(q_grid.nodes, p_grid.nodes, indexing="ij")
        return cls(q_grid, p_grid, evaluate(q, p), evaluate)

    def branches(self) -> list[tuple[np.ndarray, np.ndarray]]:
        """Node indices and Simpson weights of the p ≥ 1 and p ≤ -1 branches.

        Each branch must start at a node at ±1 unless the grid ends there.
        """
        nodes = self.p_grid.nodes
        branches = []
        for sign in (1.0, -1.0):
            (indices,) = np.nonzero(sign * nodes >= 1.0 - 1e-12)
            if indices.size == 0:
                continue
            start = nodes[indices].min() if sign > 0 else nodes[indices].max()
            reaches_inside = np.any(np.abs(nodes) < 1.0 - 1e-12)
            if reaches_inside and abs(abs(start) - 1.0) > 1e-9:
                raise InvalidInputError(
                    "the p grid crosses |p| = 1 without a node there"
                )
            if indices.size == 1:
                branches.append((indices, np.zeros(1)))
            else:
                branches.append(
                    (indices, simpson_weights(indices.size, self.p_grid.spacing))
                )
        return branches


@dataclasses.dataclass(frozen=True, eq=False)
class PlaneFunction:
    """Samples of a function of (q, second) where the second axis is labelled
    `s`, `p` or `x`"""

    q_grid: Grid1D
    second_grid: Grid1D
    values: np.ndarray
    axis_label: Literal["s", "p", "x"] = "s"

    def __post_init__(self):
        values = _frozen(self.values)
        if values.shape != (self.q_grid.n, self.second_grid.n):
            raise InvalidInputError(
                f"expected shape {(self.q_grid.n, self.second_grid.n)}, got {values.shape}"
            )
        _check_finite(values, "plane function")
        object.__setattr__(self, "values", values)

    def norm(self, weight: Literal["plain", "abs_second"] = "plain") -> float:
        """L² norm over the plane by tensor-product Simpson quadrature"""
        density = np.abs(self.values) ** 2
        if weight == "abs_second":
            density = density * np.abs(self.second_grid.nodes)[None, :]
        total = self.q_grid.weights @ density @ self.second_grid.weights
        return float(np.sqrt(max(total, 0.0)))

    def to_density(self) -> "SpectralDensity":
        """The same samples as a density supported on |second| ≥ 1"""
        return SpectralDensity(self.q_grid, self.second_grid, self.values)


@beartype
def line_norm(f: LineFunction) -> float:
    """L² norm of a line function (Simpson)"""
    return float(np.sqrt(max(f.grid.weights @ np.abs(f.values) ** 2, 0.0)))


@beartype
def weighted_norm(F: SpectralDensity) -> float:
    """Norm of F in L²(ℝ², |p| dq dp).

    The p integral is taken separately on p ≥ 1 and p ≤ -1 so that the jump
    of F at |p| = 1 does not spoil the quadrature.

    Args:
        F (:obj:`SpectralDensity`): density

    Returns:
        :obj:`float`: (∬|F(q,p)|² |p| dq dp)^{1/2}
    """
    density = np.abs(F.values) ** 2
    total = 0.0
    for indices, weights in F.branches():
        column = density[:, indices] @ (weights * np.abs(F.p_grid.nodes[indices]))
        total += F.q_grid.weights @ column
    return float(np.sqrt(max(total, 0.0)))


@beartype
def strip_norm(u: StripFunction, weight: StripWeight = "plain") -> float:
    """L² norm on ℝ × [-1, 1], plain or with weight |μ|.

    Args:
        u (:obj:`StripFunction`): samples
        weight (:obj:`str`): `plain` or `abs_mu`

    Returns:
        :obj:`float`: the norm
    """
    mu_weights = u.angles.weights
    if weight == "abs_mu":
        mu_weights = mu_weights * np.abs(u.angles.nodes)
    total = u.grid.weights @ np.abs(u.values) ** 2 @ mu_weights
    return float(np.sqrt(max(total, 0.0)))
