"""Uniform grids, angular quadrature and the quadrature weights shared by
every module."""

import dataclasses
import functools
from numbers import Integral, Real
from typing import Literal

import numpy as np
from beartype import beartype

from ..exceptions import DomainError, InvalidInputError

__all__ = [
    "Grid1D",
    "AngleGrid",
    "simpson_weights",
]

AngleKind = Literal["double", "full", "graded", "composite"]
"""Panel layout of the Gauss–Legendre rule on [-1, 1]"""


@beartype
def simpson_weights(n: Integral, spacing: Real) -> np.ndarray:
    """Composite Simpson weights for `n` uniformly spaced nodes.

    Even node counts close with the 3/8 rule on the last three intervals,
    so the rule is fourth order for every `n >= 4`.

    Args:
        n (:obj:`int`): number of nodes
        spacing (:obj:`float`): node spacing

    Returns:
        :obj:`numpy.ndarray`: quadrature weights
    """
    n = int(n)
    if n < 2:
        raise InvalidInputError("at least two nodes are needed for quadrature")
    if n == 2:
        return np.full(2, spacing / 2.0)
    if n == 3:
        return np.array([1.0, 4.0, 1.0]) * spacing / 3.0
    if n == 4:
        return np.array([1.0, 3.0, 3.0, 1.0]) * 3.0 * spacing / 8.0

    weights = np.zeros(n)
    n_simpson = n if n % 2 else n - 3
    weights[:n_simpson:2] = 2.0
    weights[1:n_simpson:2] = 4.0
    weights[0] = 1.0
    weights[n_simpson - 1] = 1.0
    weights[:n_simpson] *= spacing / 3.0
    if n_simpson < n:
        weights[n_simpson - 1 :] += np.array([1.0, 3.0, 3.0, 1.0]) * 3.0 * spacing / 8.0
    return weights


@dataclasses.dataclass(frozen=True)
class Grid1D:
    """Uniform grid `lo = nodes[0] < ... < nodes[n-1] = hi`.

    A `periodic` grid holds one period of a periodic function, `hi + spacing`
    being identified with `lo`; its quadrature is the trapezoid rule on the
    period, exact for trigonometric polynomials resolved by the grid.
    """

    lo: float
    hi: float
    n: int
    periodic: bool = False

    def __post_init__(self):
        if int(self.n) < 2:
            raise InvalidInputError(f"a grid needs n >= 2 nodes, got {self.n}")
        if not (np.isfinite(self.lo) and np.isfinite(self.hi)) or self.hi <= self.lo:
            raise InvalidInputError(
                f"grid bounds must be finite with lo < hi, got [{self.lo}, {self.hi}]"
            )
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "periodic", bool(self.periodic))

    @functools.cached_property
    def nodes(self) -> np.ndarray:
        nodes = np.linspace(self.lo, self.hi, self.n)
        nodes.flags.writeable = False
        return nodes

    @property
    def spacing(self) -> float:
        return (self.hi - self.lo) / (self.n - 1)

    @functools.cached_property
    def weights(self) -> np.ndarray:
        """Simpson weights on the whole grid, uniform ones on a period"""
        if self.periodic:
            weights = np.full(self.n, self.spacing)
        else:
            weights = simpson_weights(self.n, self.spacing)
        weights.flags.writeable = False
        return weights

    def scaled(self, factor: float) -> "Grid1D":
        """Same extent, node count multiplied by `factor` (spacing divided)"""
        return Grid1D(self.lo, self.hi, int(round((self.n - 1) * factor)) + 1)

    def index_of(self, value: float, tol: float = 1e-9) -> int | None:
        """Index of the node equal to `value`, if there is one"""
        position = (value - self.lo) / self.spacing
        index = int(round(position))
        if 0 <= index < self.n and abs(position - index) < tol:
            return index
        return None

    @classmethod
    def centered(cls, spacing: float, n: int, periodic: bool = False) -> "Grid1D":
        """Grid `(k - n//2) * spacing`, `k = 0..n-1`, the layout produced by
        `numpy.fft.fftshift`"""
        half = n // 2
        return cls(-half * spacing, (n - 1 - half) * spacing, n, periodic)

    @property
    def period(self) -> float:
        """n · spacing, the length of the box a periodic grid samples"""
        return self.n * self.spacing

    @classmethod
    def spectral(cls, p_max: float, per_unit: int) -> "Grid1D":
        """Symmetric grid on [-p_max, p_max] with nodes at ±1.

        Args:
            p_max (:obj:`float`): cutoff, rounded up to an integer
            per_unit (:obj:`int`): nodes per unit length
        """
        p_max = float(np.ceil(p_max))
        return cls(-p_max, p_max, int(2 * p_max * per_unit) + 1)


@dataclasses.dataclass(frozen=True)
class AngleGrid:
    """Gauss–Legendre nodes and weights for μ in [-1, 1].

    The `double` kind applies an `n/2` point rule on each of [-1, 0] and
    [0, 1], so functions that are polynomial on each half (such as |μ|) are
    integrated exactly. The `full` kind is the plain rule on [-1, 1]; its
    node count must be even so that μ = 0 is not a node.

    The `graded` kind splits each half into `panels` dyadic panels
    [0, 2^{1-panels}], ..., [1/4, 1/2], [1/2, 1] with the same number of
    nodes on each, which resolves integrands that live on |μ| ≲ b/|s| for
    large |s|. The `composite` kind takes the panel `edges` explicitly.
    """

    n_angles: int
    kind: AngleKind = "double"
    panels: int = 1
    edges: tuple = ()

    def __post_init__(self):
        if int(self.n_angles) < 2 or int(self.n_angles) % 2:
            raise DomainError(
                f"n_angles must be even and >= 2 so that no node sits at μ = 0, got {self.n_angles}"
            )
        object.__setattr__(self, "n_angles", int(self.n_angles))
        object.__setattr__(self, "panels", int(self.panels))
        if self.kind == "graded":
            if self.panels < 1 or self.n_angles % (2 * self.panels):
                raise DomainError(
                    f"{self.n_angles} angles cannot be spread evenly over 2 × {self.panels} panels"
                )
        if self.kind == "composite":
            edges = tuple(float(edge) for edge in self.edges)
            if (
                len(edges) < 2
                or edges[0] != -1.0
                or edges[-1] != 1.0
                or np.any(np.diff(edges) <= 0)
                or 0.0 not in edges
            ):
                raise DomainError("composite edges must increase from -1 to 1 and contain 0")
            if self.n_angles % (len(edges) - 1):
                raise DomainError(
                    f"{self.n_angles} angles cannot be spread evenly over {len(edges) - 1} panels"
                )
            object.__setattr__(self, "edges", edges)

    @functools.cached_property
    def panel_edges(self) -> np.ndarray:
        """Edges of the Gauss panels, from -1 to 1"""
        if self.kind == "full":
            return np.array([-1.0, 1.0])
        if self.kind == "double":
            return np.array([-1.0, 0.0, 1.0])
        if self.kind == "graded":
            half = 2.0 ** -np.arange(self.panels - 1, -1, -1, dtype=float)
            return np.concatenate([-half[::-1], [0.0], half])
        return np.array(self.edges)

    @functools.cached_property
    def _rule(self) -> tuple[np.ndarray, np.ndarray]:
        edges = self.panel_edges
        per_panel = self.n_angles // (edges.size - 1)
        base_nodes, base_weights = np.polynomial.legendre.leggauss(per_panel)
        lo, hi = edges[:-1, None], edges[1:, None]
        nodes = ((hi - lo) / 2 * base_nodes[None, :] + (hi + lo) / 2).ravel()
        weights = ((hi - lo) / 2 * base_weights[None, :]).ravel()
        nodes.flags.writeable = False
        weights.flags.writeable = False
        return nodes, weights

    @property
    def nodes(self) -> np.ndarray:
        return self._rule[0]

    @property
    def weights(self) -> np.ndarray:
        return self._rule[1]

    @classmethod
    def graded(cls, per_panel: int, panels: int) -> "AngleGrid":
        """`per_panel` Gauss nodes on each of the 2 × `panels` dyadic panels"""
        return cls(2 * panels * per_panel, "graded", panels)

    @classmethod
    def composite(cls, edges, per_panel: int) -> "AngleGrid":
        """`per_panel` Gauss nodes on every panel between consecutive `edges`"""
        edges = tuple(float(edge) for edge in edges)
        return cls((len(edges) - 1) * per_panel, "composite", edges=edges)

    @classmethod
    def from_config(cls) -> "AngleGrid":
        """Angle grid with the configured node count and kind"""
        from ..config import get_value

        value = get_value()
        return cls(value.angles.n_angles, value.angles.kind, value.angles.panels)
