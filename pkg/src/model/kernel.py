"""Collision kernels: multiplication coefficients c_ℓ(x), angular factors
φ_ℓ(μ), and the compactly supported test functions living on supp c_ℓ."""

import abc
import dataclasses
import math
from collections.abc import Callable, Sequence
from numbers import Real
from typing import Optional

import numpy as np
from beartype import beartype

from ..exceptions import DegenerateInputError, InvalidInputError, ParameterError
from .grids import AngleGrid

__all__ = [
    "Coefficient",
    "GapLatticeCoefficient",
    "IntervalCoefficient",
    "BumpCoefficient",
    "ZeroCoefficient",
    "AngularFactor",
    "Channel",
    "CollisionKernel",
    "HatFunction",
    "TestFunctionFamily",
    "eval_gap_coefficient",
]


class Coefficient(abc.ABC):
    """Real bounded coefficient c(x) with exactly known support"""

    @abc.abstractmethod
    def __call__(self, x) -> np.ndarray:
        """Evaluate on an array of points"""

    @abc.abstractmethod
    def support_intervals(self, lo: float, hi: float) -> list[tuple[float, float]]:
        """Closed intervals, clipped to [lo, hi], whose union is supp c ∩ [lo, hi]"""

    @property
    def is_zero(self) -> bool:
        return False

    def in_support(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        inside = np.zeros(x.shape, dtype=bool)
        if x.size == 0:
            return inside
        for left, right in self.support_intervals(float(x.min()), float(x.max())):
            inside |= (x >= left) & (x <= right)
        return inside


@dataclasses.dataclass(frozen=True)
class GapLatticeCoefficient(Coefficient):
    """c(x) = envelope(x), except c(x) = 0 when |x - x0 - a j| < eps for an
    integer j"""

    x0: float
    a: float
    eps: float
    envelope: Optional[Callable] = None

    def __post_init__(self):
        if self.a <= 0 or self.eps <= 0:
            raise ParameterError("the lattice period and the half-gap must be positive")
        if self.eps >= self.a / 2:
            raise ParameterError(
                f"half-gap eps={self.eps} must be smaller than a/2={self.a / 2}"
            )

    def gap_distance(self, x) -> np.ndarray:
        """Distance from x to the lattice x0 + aℤ"""
        r = np.mod(np.asarray(x, dtype=float) - self.x0, self.a)
        return np.minimum(r, self.a - r)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        value = np.ones(x.shape) if self.envelope is None else self.envelope(x)
        return np.where(self.gap_distance(x) < self.eps, 0.0, value)

    def support_intervals(self, lo, hi):
        first = math.floor((lo - self.x0) / self.a) - 1
        last = math.ceil((hi - self.x0) / self.a) + 1
        intervals = []
        for j in range(first, last):
            left = self.x0 + self.a * j + self.eps
            right = self.x0 + self.a * (j + 1) - self.eps
            left, right = max(left, lo), min(right, hi)
            if left < right:
                intervals.append((left, right))
        return intervals


@dataclasses.dataclass(frozen=True)
class IntervalCoefficient(Coefficient):
    """c(x) = value on [lo, hi]; either end may be infinite"""

    lo: float = 0.0
    hi: float = math.inf
    value: float = 1.0

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ParameterError("interval coefficient needs lo < hi")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.where((x >= self.lo) & (x <= self.hi), self.value, 0.0)

    @property
    def is_zero(self):
        return self.value == 0

    def support_intervals(self, lo, hi):
        left, right = max(self.lo, lo), min(self.hi, hi)
        return [(left, right)] if left < right and not self.is_zero else []


@dataclasses.dataclass(frozen=True)
class BumpCoefficient(Coefficient):
    """Smooth bump exp(1 - w²/(w² - (x-center)²)) supported on (center-w, center+w)"""

    center: float = 0.0
    half_width: float = 0.5

    def __call__(self, x):
        s = (np.asarray(x, dtype=float) - self.center) / self.half_width
        out = np.zeros(s.shape)
        inside = np.abs(s) < 1
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - s[inside] ** 2))
        return out

    def support_intervals(self, lo, hi):
        left = max(self.center - self.half_width, lo)
        right = min(self.center + self.half_width, hi)
        return [(left, right)] if left < right else []


@dataclasses.dataclass(frozen=True)
class ZeroCoefficient(Coefficient):
    """c ≡ 0"""

    def __call__(self, x):
        return np.zeros(np.shape(x))

    @property
    def is_zero(self):
        return True

    def support_intervals(self, lo, hi):
        return []


@beartype
def eval_gap_coefficient(c: GapLatticeCoefficient, x: Real) -> float:
    """Value of a gap-lattice coefficient at a point; exactly 0 inside gaps.

    Args:
        c (:obj:`GapLatticeCoefficient`): coefficient
        x (:obj:`float`): point

    Returns:
        :obj:`float`: c(x)
    """
    return float(c(np.array([float(x)]))[0])


@dataclasses.dataclass(frozen=True)
class AngularFactor:
    """Polynomial φ(μ) = Σ coefficients[k] μ^k, extended by zero outside
    `support`"""

    coefficients: tuple
    support: tuple[float, float] = (-1.0, 1.0)

    def __post_init__(self):
        object.__setattr__(
            self, "coefficients", tuple(complex(c) for c in self.coefficients)
        )
        lo, hi = self.support
        if not -1.0 <= lo < hi <= 1.0:
            raise InvalidInputError("angular support must lie inside [-1, 1]")

    @property
    def degree(self) -> int:
        nonzero = [k for k, c in enumerate(self.coefficients) if c != 0]
        return max(nonzero) if nonzero else 0

    def __call__(self, mu) -> np.ndarray:
        mu = np.asarray(mu, dtype=float)
        lo, hi = self.support
        value = np.polynomial.polynomial.polyval(mu, np.array(self.coefficients))
        return np.where((mu >= lo) & (mu <= hi), value, 0.0)

    @property
    def norm(self) -> float:
        """(∫ |φ(μ)|² dμ)^{1/2} over the support"""
        lo, hi = self.support
        t, w = np.polynomial.legendre.leggauss(64)
        mu = (hi - lo) / 2 * t + (hi + lo) / 2
        return math.sqrt(float(np.sum((hi - lo) / 2 * w * np.abs(self(mu)) ** 2)))


@dataclasses.dataclass(frozen=True)
class Channel:
    """One separable collision channel c_ℓ(x) φ_ℓ(μ) ⟨·, φ_ℓ⟩"""

    coefficient: Coefficient
    factor: AngularFactor


@dataclasses.dataclass(frozen=True)
class CollisionKernel:
    """Family of channels {(c_ℓ, φ_ℓ)} with linearly independent φ_ℓ"""

    channels: tuple

    def __post_init__(self):
        object.__setattr__(self, "channels", tuple(self.channels))
        if not self.channels:
            raise InvalidInputError("a collision kernel needs at least one channel")
        gram = self.gram()
        rank = np.linalg.matrix_rank(gram, tol=1e-10 * max(np.abs(gram).max(), 1e-300))
        if rank < self.n:
            raise DegenerateInputError(
                f"angular factors are linearly dependent (Gram rank {rank} < {self.n})"
            )

    @property
    def n(self) -> int:
        return len(self.channels)

    @property
    def max_degree(self) -> int:
        return max(channel.factor.degree for channel in self.channels)

    def gram(self, angles: Optional[AngleGrid] = None) -> np.ndarray:
        """Gram matrix ∫ φ_ℓ conj(φ_m) dμ"""
        angles = angles or AngleGrid(64)
        samples = np.array([ch.factor(angles.nodes) for ch in self.channels])
        return (samples * angles.weights) @ samples.conj().T

    @property
    def is_zero(self) -> bool:
        return all(channel.coefficient.is_zero for channel in self.channels)

    @classmethod
    def single(cls, coefficient: Coefficient, factor: Sequence = (1.0,)) -> "CollisionKernel":
        """One channel with a polynomial factor on [-1, 1]"""
        return cls((Channel(coefficient, AngularFactor(tuple(factor))),))


@dataclasses.dataclass(frozen=True)
class HatFunction:
    """Triangle function on [lo, hi] with unit peak at the midpoint"""

    lo: float
    hi: float

    @property
    def center(self) -> float:
        return (self.lo + self.hi) / 2

    @property
    def half_width(self) -> float:
        return (self.hi - self.lo) / 2

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.clip(1.0 - np.abs(x - self.center) / self.half_width, 0.0, None)

    def fourier(self, p) -> np.ndarray:
        """ĥ(p) = (2π)^{-1/2} ∫ e^{-ipx} h(x) dx"""
        p = np.asarray(p, dtype=float)
        w = self.half_width
        return (
            w
            * np.sinc(p * w / (2 * np.pi)) ** 2
            * np.exp(-1j * p * self.center)
            / np.sqrt(2 * np.pi)
        )

    def quadrature(self, nodes_per_piece: int = 16) -> tuple[np.ndarray, np.ndarray]:
        """Gauss–Legendre nodes and weights on each linear piece"""
        t, w = np.polynomial.legendre.leggauss(nodes_per_piece)
        pieces = [(self.lo, self.center), (self.center, self.hi)]
        x = np.concatenate([(b - a) / 2 * t + (a + b) / 2 for a, b in pieces])
        weights = np.concatenate([(b - a) / 2 * w for a, b in pieces])
        return x, weights

    @property
    def norm(self) -> float:
        return math.sqrt(2 * self.half_width / 3)


@dataclasses.dataclass(frozen=True)
class TestFunctionFamily:
    """Per channel, a list of hat functions supported inside supp c_ℓ"""

    __test__ = False

    functions: tuple

    @classmethod
    def from_kernel(
        cls,
        kernel: CollisionKernel,
        window: tuple[float, float],
        per_channel: int = 3,
    ) -> "TestFunctionFamily":
        """Hats on the first `per_channel` support intervals of each
        coefficient inside `window` (longest intervals first for unbounded
        supports)"""
        functions = []
        for channel in kernel.channels:
            intervals = channel.coefficient.support_intervals(*window)
            if not intervals:
                raise DegenerateInputError("coefficient has no support in the window")
            if len(intervals) == 1 and per_channel > 1:
                left, right = intervals[0]
                edges = np.linspace(left, right, per_channel + 1)
                intervals = list(zip(edges[:-1], edges[1:]))
            functions.append(
                tuple(HatFunction(float(a), float(b)) for a, b in intervals[:per_channel])
            )
        return cls(tuple(functions))
