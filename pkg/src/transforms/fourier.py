"""Fourier transforms on uniform grids.

Every transform in this package uses the symmetric convention

    f̂(p) = (2π)^{-1/2} ∫ e^{-ipx} f(x) dx
    f(x) = (2π)^{-1/2} ∫ e^{+ipx} f̂(p) dp

approximated by Riemann sums on the grids

    x_k = x_0 + k Δx,   p_n = p_0 + n Δp,   Δx Δp = 2π / N,

with the dual grid centered, `p_0 = -(N//2) Δp`. Expanding the exponential
gives one FFT between two phase factors:

    f̂_n = Δx/√(2π) r_n     fft[f_k s_k]
    f_k = Δp/√(2π) s_k^* N ifft[f̂_n r_n^*]

    r_n = exp(-i p_n x_0),  s_k = exp(-i p_0 (x_k - x_0))

All phase bookkeeping lives in :class:`LineTransform`.
"""

import dataclasses
import functools
import logging
import math
import warnings
from numbers import Real
from typing import Optional

import numpy as np
import scipy.fft
from beartype import beartype

from ..exceptions import InvalidInputError
from ..model.functions import LineFunction, PlaneFunction
from ..model.grids import Grid1D
from ..warnings import TruncationWarning

__all__ = [
    "SQRT_2PI",
    "LineTransform",
    "check_decay",
    "fourier_line",
    "inverse_fourier_line",
    "fourier_second",
    "fourier_at",
    "spectral_derivative",
    "translate",
]

logger = logging.getLogger(__name__)

SQRT_2PI = math.sqrt(2.0 * math.pi)


def _decay_tolerance() -> float:
    from ..config import get_value

    return float(get_value().fourier.decay_tolerance)


@beartype
def check_decay(values: np.ndarray, axis: int = 0, tol: Optional[Real] = None) -> float:
    """Relative magnitude of the samples at both ends of `axis`.

    Issues a :class:`TruncationWarning` when it exceeds `tol` (default from
    configuration, `fourier.decay_tolerance`).

    Returns:
        :obj:`float`: largest end magnitude divided by the largest magnitude
    """
    magnitude = np.abs(values)
    peak = float(magnitude.max()) if magnitude.size else 0.0
    if peak == 0.0:
        return 0.0
    ends = np.take(magnitude, [0, magnitude.shape[axis] - 1], axis=axis)
    ratio = float(ends.max()) / peak
    tol = _decay_tolerance() if tol is None else float(tol)
    if ratio > tol:
        warnings.warn(
            TruncationWarning(
                f"samples do not decay at the grid ends: relative boundary magnitude {ratio:.3e} > {tol:.1e}",
                boundary_magnitude=ratio,
            )
        )
    return ratio


@dataclasses.dataclass(frozen=True)
class LineTransform:
    """FFT-based Fourier transform between a grid and its centered dual"""

    grid: Grid1D

    @functools.cached_property
    def dual(self) -> Grid1D:
        spacing = 2.0 * math.pi / (self.grid.n * self.grid.spacing)
        return Grid1D.centered(spacing, self.grid.n)

    @functools.cached_property
    def _phases(self) -> tuple[np.ndarray, np.ndarray]:
        x0 = self.grid.lo
        p0 = self.dual.lo
        r = np.exp(-1j * self.dual.nodes * x0)
        s = np.exp(-1j * p0 * (self.grid.nodes - x0))
        return r, s

    def _shape(self, vector: np.ndarray, ndim: int, axis: int) -> np.ndarray:
        shape = [1] * ndim
        shape[axis] = vector.size
        return vector.reshape(shape)

    def forward(self, values: np.ndarray, axis: int = 0) -> np.ndarray:
        """Samples of f̂ on `dual` from samples of f on `grid`"""
        values = np.asarray(values, dtype=complex)
        r, s = self._phases
        transformed = scipy.fft.fft(values * self._shape(s, values.ndim, axis), axis=axis)
        return self.grid.spacing / SQRT_2PI * self._shape(r, values.ndim, axis) * transformed

    def backward(self, values: np.ndarray, axis: int = 0) -> np.ndarray:
        """Samples of f on `grid` from samples of f̂ on `dual`"""
        values = np.asarray(values, dtype=complex)
        r, s = self._phases
        n = self.grid.n
        transformed = scipy.fft.ifft(
            values * self._shape(np.conj(r), values.ndim, axis), axis=axis
        )
        return (
            self.dual.spacing
            / SQRT_2PI
            * n
            * self._shape(np.conj(s), values.ndim, axis)
            * transformed
        )


@beartype
def fourier_line(f: LineFunction) -> LineFunction:
    """Fourier transform of a sampled line function.

    The result lives on the centered dual grid with spacing 2π/(N Δx).
    Samples that do not decay to the decay tolerance at the ends of the grid
    produce a :class:`TruncationWarning`; the transform is still returned.

    Args:
        f (:obj:`LineFunction`): samples of f

    Returns:
        :obj:`LineFunction`: samples of f̂
    """
    check_decay(f.values)
    transform = LineTransform(f.grid)
    return LineFunction(transform.dual, transform.forward(f.values))


@beartype
def inverse_fourier_line(f_hat: LineFunction, grid: Grid1D) -> LineFunction:
    """Inverse of :func:`fourier_line` onto `grid`, whose dual must be the
    grid of `f_hat`"""
    transform = LineTransform(grid)
    dual = transform.dual
    if dual.n != f_hat.grid.n or not np.isclose(dual.spacing, f_hat.grid.spacing, rtol=1e-10):
        raise InvalidInputError("the sampled transform does not live on the dual of the target grid")
    if not np.isclose(dual.lo, f_hat.grid.lo, rtol=1e-10, atol=1e-12):
        raise InvalidInputError("the sampled transform must live on the centered dual grid")
    return LineFunction(grid, transform.backward(f_hat.values))


@beartype
def fourier_second(u: PlaneFunction) -> PlaneFunction:
    """Fourier transform of u(q, s) in its second variable, row by row"""
    check_decay(u.values, axis=1)
    transform = LineTransform(u.second_grid)
    return PlaneFunction(
        u.q_grid,
        transform.dual,
        transform.forward(u.values, axis=1),
        axis_label="p",
    )


@beartype
def fourier_at(
    values: np.ndarray,
    grid: Grid1D,
    p,
    weights: Optional[np.ndarray] = None,
    band_limited: bool = True,
    block_size: int = 4096,
) -> np.ndarray:
    """Evaluate the Fourier transform of samples at arbitrary frequencies.

    Without `weights` this is the Riemann sum (2π)^{-1/2} Δx Σ_k e^{-ipx_k} f_k,
    which coincides with the trigonometric interpolant of the FFT samples.
    With `band_limited`, frequencies outside the Nyquist band |p| ≤ π/Δx are
    set to 0 instead of aliasing.

    Passing `weights` replaces Δx by an arbitrary quadrature rule on the grid
    nodes (for instance Simpson weights on a branch of a discontinuous
    integrand); `band_limited` is then ignored.

    Args:
        values (:obj:`numpy.ndarray`): samples on `grid`, shape `(grid.n,)`
        grid (:obj:`Grid1D`): sample grid
        p: frequencies, any shape
        weights (:obj:`numpy.ndarray`, optional): quadrature weights on the nodes
        band_limited (:obj:`bool`): zero outside the Nyquist band
        block_size (:obj:`int`): frequencies evaluated per block

    Returns:
        :obj:`numpy.ndarray`: f̂(p), same shape as `p`
    """
    values = np.asarray(values, dtype=complex)
    if values.shape != (grid.n,):
        raise InvalidInputError(f"expected {grid.n} samples, got shape {values.shape}")
    p = np.asarray(p, dtype=float)
    flat = p.ravel()
    if weights is None:
        weighted = values * grid.spacing
    else:
        weighted = values * np.asarray(weights, dtype=float)
    out = np.empty(flat.shape, dtype=complex)
    nodes = grid.nodes
    for start in range(0, flat.size, block_size):
        chunk = flat[start : start + block_size]
        out[start : start + chunk.size] = np.exp(-1j * np.outer(chunk, nodes)) @ weighted
    out /= SQRT_2PI
    if weights is None and band_limited:
        out[np.abs(flat) > math.pi / grid.spacing] = 0.0
    return out.reshape(p.shape)


@beartype
def spectral_derivative(values: np.ndarray, grid: Grid1D, axis: int = 0) -> np.ndarray:
    """Derivative of decaying samples along `axis` by multiplication with ip
    on the dual grid"""
    transform = LineTransform(grid)
    multiplier = 1j * transform.dual.nodes
    shape = [1] * np.ndim(values)
    shape[axis] = grid.n
    if grid.n % 2 == 0:
        # the Nyquist mode has no well defined derivative
        multiplier[0] = 0.0
    return transform.backward(transform.forward(values, axis) * multiplier.reshape(shape), axis)


@beartype
def translate(values: np.ndarray, grid: Grid1D, shifts) -> np.ndarray:
    """Shift every column of `values` along the grid, `out[:, k](x) =
    values[:, k](x - shifts[k])`, by a phase e^{-ip·shift} on the dual grid.

    The columns must decay at both grid ends; shifts are not checked here.
    """
    values = np.asarray(values, dtype=complex)
    shifts = np.broadcast_to(np.asarray(shifts, dtype=float), values.shape[1:])
    transform = LineTransform(grid)
    phases = np.exp(-1j * np.multiply.outer(transform.dual.nodes, shifts))
    return transform.backward(transform.forward(values, axis=0) * phases, axis=0)
