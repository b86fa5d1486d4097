"""The Boltzmann operator L = A + iK discretized on a periodic x grid times
Gauss–Legendre angles, and the exact free evolution (e^{itA}f)(x, μ) = f(x - μt, μ).

Vectors are stored angle-major, `index = k * n_x + i`, and scaled by the
square roots of the quadrature weights so that the Euclidean inner product
is the L²(dx dμ) inner product and A, K are Hermitian matrices.
"""

import dataclasses
import logging
import math
from numbers import Real

import numpy as np
import scipy.fft
import scipy.linalg
from beartype import beartype

from ..exceptions import AssemblyError, DomainError, InvalidInputError
from ..model.functions import Representation, StripFunction
from ..model.grids import AngleGrid, Grid1D
from ..model.kernel import CollisionKernel
from ..transforms.fourier import check_decay, translate

__all__ = [
    "DiscreteBoltzmann",
    "torus_grid",
    "assemble_discrete",
    "evolve_free",
    "resample_strip",
]

logger = logging.getLogger(__name__)

HERMITICITY_TOLERANCE = 1e-10


@beartype
def torus_grid(length: Real, n: int) -> Grid1D:
    """n nodes on a circle of circumference `length`; the grid stops one
    spacing short of closing the period"""
    return Grid1D.centered(float(length) / n, n)


def _period(grid: Grid1D) -> float:
    return grid.n * grid.spacing


def _derivative_matrix(grid: Grid1D) -> np.ndarray:
    """Spectral ∂ₓ on the periodic grid; the Nyquist mode is dropped"""
    k = 2 * math.pi * scipy.fft.fftfreq(grid.n, d=grid.spacing)
    if grid.n % 2 == 0:
        k[grid.n // 2] = 0.0
    identity = np.eye(grid.n)
    return scipy.fft.ifft(1j * k[:, None] * scipy.fft.fft(identity, axis=0), axis=0)


def _hermitian_part(matrix: np.ndarray, what: str) -> np.ndarray:
    scale = max(float(np.abs(matrix).max()), 1.0)
    residual = float(np.abs(matrix - matrix.conj().T).max()) / scale
    if residual > HERMITICITY_TOLERANCE:
        raise AssemblyError(f"{what} is not Hermitian: residual {residual:.3e}")
    return (matrix + matrix.conj().T) / 2


@dataclasses.dataclass(frozen=True, eq=False)
class DiscreteBoltzmann:
    """Hermitian matrices A (free streaming iμ∂ₓ) and K (collisions)"""

    x_grid: Grid1D
    angles: AngleGrid
    kernel: CollisionKernel
    A: np.ndarray
    K: np.ndarray

    @property
    def dim(self) -> int:
        return self.x_grid.n * self.angles.n_angles

    @property
    def period(self) -> float:
        return _period(self.x_grid)

    @property
    def _scale(self) -> np.ndarray:
        return np.sqrt(self.x_grid.spacing * self.angles.weights)

    def to_vector(self, u: StripFunction) -> np.ndarray:
        """Weighted coordinates of samples on this operator's grids"""
        if u.grid != self.x_grid or u.angles != self.angles:
            raise InvalidInputError("the samples do not live on the grids of the operator")
        return (u.values * self._scale[None, :]).T.ravel()

    def from_vector(self, vector: np.ndarray) -> StripFunction:
        values = np.asarray(vector).reshape(self.angles.n_angles, self.x_grid.n).T
        return StripFunction(
            Representation.POSITION, self.x_grid, self.angles, values / self._scale[None, :]
        )

    def hermiticity(self) -> tuple[float, float]:
        """max |A - A*| and max |K - K*|"""
        return (
            float(np.abs(self.A - self.A.conj().T).max()),
            float(np.abs(self.K - self.K.conj().T).max()),
        )


@beartype
def assemble_discrete(
    kernel: CollisionKernel, x_grid: Grid1D, angles: AngleGrid
) -> DiscreteBoltzmann:
    """Discretize L = iμ∂ₓ + i Σ_ℓ c_ℓ(x) φ_ℓ(μ) ⟨·, φ_ℓ⟩ on the torus
    behind `x_grid` (period n Δx).

    A is block diagonal with blocks iμ_k D for the spectral derivative D;
    K acts pointwise in x by c_ℓ(x_i) times the rank-one quadrature of
    φ_ℓ ⊗ conj(φ_ℓ).

    Raises:
        AssemblyError: a matrix fails the Hermiticity check (complex c_ℓ)
    """
    mu = angles.nodes
    derivative = _derivative_matrix(x_grid)
    A = scipy.linalg.block_diag(*[1j * m * derivative for m in mu])
    root = np.sqrt(angles.weights)
    K = np.zeros((x_grid.n * mu.size,) * 2, dtype=complex)
    for channel in kernel.channels:
        weights = np.asarray(channel.coefficient(x_grid.nodes))
        if np.any(np.iscomplex(weights)):
            raise AssemblyError("collision coefficients must be real")
        amplitude = root * channel.factor(mu)
        K += np.kron(np.outer(amplitude, amplitude.conj()), np.diag(weights.real))
    A = _hermitian_part(A, "A")
    K = _hermitian_part(K, "K")
    logger.info(
        "assembled discrete operator of dimension %d (%d x nodes, %d angles, %d channels)",
        A.shape[0],
        x_grid.n,
        mu.size,
        kernel.n,
    )
    return DiscreteBoltzmann(x_grid, angles, kernel, A, K)


@beartype
def evolve_free(f: StripFunction, t: Real, periodic: bool = False) -> StripFunction:
    """(e^{itA}f)(x, μ) = f(x - μt, μ), by a phase in the dual variable.

    On a periodic grid the shift wraps around the torus. Otherwise the
    samples must decay at the grid ends and |μt| must stay within a quarter
    of the grid length.

    Raises:
        DomainError: the translation leaves the padded grid
    """
    if f.rep != Representation.POSITION:
        raise InvalidInputError("free evolution acts on the position representation")
    t = float(t)
    if t == 0.0:
        return f
    mu = f.angles.nodes
    if not periodic:
        reach = (f.grid.hi - f.grid.lo) / 4
        if float(np.abs(mu).max()) * abs(t) > reach:
            raise DomainError(
                f"translation by up to {abs(t) * np.abs(mu).max():.3f} leaves the safe range ±{reach:.3f}"
            )
        check_decay(f.values, axis=0)
    return f.with_values(translate(f.values, f.grid, mu * t))


@beartype
def resample_strip(g: StripFunction, x_grid: Grid1D) -> StripFunction:
    """Samples of g on another x grid by linear interpolation per angle,
    zero outside the original grid"""
    if g.rep != Representation.POSITION:
        raise InvalidInputError("only position samples are resampled")
    x = x_grid.nodes
    columns = [
        np.interp(x, g.grid.nodes, column.real, 0.0, 0.0)
        + 1j * np.interp(x, g.grid.nodes, column.imag, 0.0, 0.0)
        for column in g.values.T
    ]
    return StripFunction(Representation.POSITION, x_grid, g.angles, np.stack(columns, axis=1))
