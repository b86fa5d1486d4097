"""Quadrature on S² and orthonormal frames with the polar axis along a
momentum p."""

import dataclasses
import functools
import math
from numbers import Real
from typing import Optional

import numpy as np
from beartype import beartype

from ..exceptions import DomainError, InvalidInputError

__all__ = ["SphereGrid", "FrameField", "spherical_frame", "rotation_matrix"]

FALLBACK_THRESHOLD = 1e-8

_Z = np.array([0.0, 0.0, 1.0])
_X = np.array([1.0, 0.0, 0.0])
_Y = np.array([0.0, 1.0, 0.0])


@dataclasses.dataclass(frozen=True)
class SphereGrid:
    """Gauss–Legendre nodes in c = cos θ times `m_psi` uniform nodes in ψ.

    The uniform rule integrates e^{ikψ} exactly for |k| < m_psi.
    """

    n_theta: int
    m_psi: int

    def __post_init__(self):
        if self.n_theta < 1:
            raise InvalidInputError(f"n_theta must be positive, got {self.n_theta}")
        if self.m_psi < 16 or self.m_psi & (self.m_psi - 1):
            raise InvalidInputError(f"m_psi must be a power of two >= 16, got {self.m_psi}")

    @functools.cached_property
    def _rule(self) -> tuple[np.ndarray, np.ndarray]:
        return np.polynomial.legendre.leggauss(self.n_theta)

    @property
    def cos_theta(self) -> np.ndarray:
        return self._rule[0]

    @property
    def theta_weights(self) -> np.ndarray:
        return self._rule[1]

    @functools.cached_property
    def psi(self) -> np.ndarray:
        return 2 * math.pi * np.arange(self.m_psi) / self.m_psi

    @property
    def psi_weight(self) -> float:
        return 2 * math.pi / self.m_psi

    @functools.cached_property
    def weights(self) -> np.ndarray:
        """Product weights, shape (n_theta, m_psi); they sum to 4π"""
        return np.outer(self.theta_weights, np.full(self.m_psi, self.psi_weight))

    @classmethod
    def from_config(cls) -> "SphereGrid":
        from ..config import get_value

        sphere = get_value().sphere
        return cls(int(sphere.n_theta), int(sphere.m_psi))


@dataclasses.dataclass(frozen=True, eq=False)
class FrameField:
    """Right-handed orthonormal triads (e1, e2, e3 = p/|p|), one row per p"""

    p: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    e3: np.ndarray

    @property
    def norm(self) -> np.ndarray:
        return np.linalg.norm(self.p, axis=-1)

    def directions(self, grid: SphereGrid) -> np.ndarray:
        """μ(ψ, θ) = sin θ (cos ψ e1 + sin ψ e2) + cos θ e3, shape
        (len(p), n_theta, m_psi, 3)"""
        c = grid.cos_theta[None, :, None, None]
        s = np.sqrt(1.0 - c**2)
        cos_psi = np.cos(grid.psi)[None, None, :, None]
        sin_psi = np.sin(grid.psi)[None, None, :, None]
        e1, e2, e3 = (e[:, None, None, :] for e in (self.e1, self.e2, self.e3))
        return s * (cos_psi * e1 + sin_psi * e2) + c * e3

    def residual(self) -> float:
        """Largest deviation from a right-handed orthonormal triad"""
        triad = np.stack([self.e1, self.e2, self.e3], axis=-1)
        gram = np.einsum("nki,nkj->nij", triad, triad)
        orthonormal = np.abs(gram - np.eye(3)).max()
        handed = np.abs(np.cross(self.e1, self.e2) - self.e3).max()
        return float(max(orthonormal, handed))


@beartype
def spherical_frame(p, reference: Optional[np.ndarray] = None) -> FrameField:
    """Frames with the polar axis along each p.

    e1 is the normalized component of ẑ orthogonal to p, or of x̂ when
    |p × ẑ| < 1e-8 |p| (ŷ when the reference itself lies along x̂);
    e2 = e3 × e1.

    Args:
        p: one momentum of shape (3,) or many of shape (N, 3)
        reference (:obj:`numpy.ndarray`, optional): replaces ẑ

    Raises:
        DomainError: p = 0
    """
    p = np.atleast_2d(np.asarray(p, dtype=float))
    if p.shape[-1] != 3:
        raise InvalidInputError(f"momenta must be 3-vectors, got shape {p.shape}")
    norm = np.linalg.norm(p, axis=1)
    if np.any(norm == 0.0):
        raise DomainError("the frame is undefined at p = 0")
    e3 = p / norm[:, None]
    primary = _Z if reference is None else _unit(np.asarray(reference, dtype=float))
    fallback = _Y if abs(primary[0]) > 0.5 else _X
    parallel = np.linalg.norm(np.cross(e3, primary), axis=1) < FALLBACK_THRESHOLD
    ref = np.where(parallel[:, None], fallback, primary)
    e1 = ref - np.sum(ref * e3, axis=1)[:, None] * e3
    e1 /= np.linalg.norm(e1, axis=1)[:, None]
    e2 = np.cross(e3, e1)
    return FrameField(p, e1, e2, e3)


def _unit(vector: np.ndarray) -> np.ndarray:
    return vector / np.linalg.norm(vector)


@beartype
def rotation_matrix(axis, angle: Real) -> np.ndarray:
    """Rotation by `angle` about `axis` (Rodrigues)"""
    k = _unit(np.asarray(axis, dtype=float))
    cross = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    angle = float(angle)
    return np.eye(3) + math.sin(angle) * cross + (1 - math.cos(angle)) * cross @ cross
