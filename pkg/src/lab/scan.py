"""Singular-value scans of the linear map

    T: F ↦ ∫ e^{ipxq} F(q, p) conj(φ_ℓ(1/p)) dp,   x ∈ supp c_ℓ,

on a finite grid of |p| ≥ 1. Densities in the numerical kernel of T are
candidates for the selfadjoint subspace; a trivial kernel indicates a
completely nonselfadjoint operator.

The map is block diagonal in q and every block is decomposed separately.
A block must have at least as many rows (x samples over all channels) as
columns (p nodes), so each unknown gets exactly one singular value. The q
grid stays away from 0: at q = 0 every column is constant in x and the
block has rank one whatever the coefficient.

By default the p nodes of a block are aligned with the x samples: at
spacing Δp = 2π/(|q| X), X the extent of the rows of a channel, the
columns e^{iqxp} are the discrete Fourier modes of that window and the
block is well conditioned unless the coefficient hides part of the window.
A count of p nodes gives the same uniform grid in every block instead.
"""

import dataclasses
import functools
import logging
import math
from collections.abc import Callable, Sequence
from numbers import Integral, Real
from typing import Optional

import numpy as np
import scipy.linalg
from beartype import beartype

from ..exceptions import DomainError, ParameterError
from ..model.kernel import CollisionKernel
from ..utils import map_blocks

__all__ = ["ConstraintScan", "constraint_scan", "half_strip_scan", "sample_supports"]

logger = logging.getLogger(__name__)


def _lab_config():
    from ..config import get_value

    return get_value().lab


def _trapezoid(nodes: np.ndarray) -> np.ndarray:
    if nodes.size == 1:
        return np.ones(1)
    spacing = np.diff(nodes)
    weights = np.zeros(nodes.size)
    weights[:-1] += spacing / 2
    weights[1:] += spacing / 2
    return weights


def _branch_weights(nodes: np.ndarray) -> np.ndarray:
    """Trapezoid weights on the positive and the negative nodes separately"""
    weights = np.zeros(nodes.size)
    for select in (nodes > 0, nodes < 0):
        if np.any(select):
            weights[select] = _trapezoid(nodes[select])
    return weights


def _describe(kernel: CollisionKernel) -> list:
    return [
        {
            "coefficient": type(channel.coefficient).__name__,
            "fields": {
                field.name: getattr(channel.coefficient, field.name)
                for field in dataclasses.fields(channel.coefficient)
                if isinstance(getattr(channel.coefficient, field.name), (int, float))
            },
            "factor": [[c.real, c.imag] for c in channel.factor.coefficients],
            "factor_support": list(channel.factor.support),
        }
        for channel in kernel.channels
    ]


@dataclasses.dataclass(frozen=True, eq=False)
class ConstraintScan:
    """Singular values of T on a q × p grid with unit-norm columns in
    L²(|p| dq dp).

    `p_nodes` and `p_weights` hold one array per q node.
    """

    descriptor: list
    q_nodes: np.ndarray
    p_nodes: tuple
    p_weights: tuple
    p_grid: str
    x_sample: tuple
    singular_values: np.ndarray
    blocks: tuple = dataclasses.field(repr=False, default=())
    channels: tuple = dataclasses.field(repr=False, default=())

    @property
    def unknowns(self) -> int:
        return int(sum(p.size for p in self.p_nodes))

    @property
    def rows(self) -> int:
        return int(sum(np.size(x) for x in self.x_sample))

    @property
    def degenerate(self) -> bool:
        """True when T vanishes (no constraints, or c ≡ 0)"""
        return self.sigma_max == 0.0

    @property
    def sigma_max(self) -> float:
        return float(self.singular_values[0]) if self.singular_values.size else 0.0

    @property
    def ratio(self) -> float:
        """σ_min / σ_max"""
        if self.degenerate:
            return 0.0
        return float(self.singular_values[-1]) / self.sigma_max

    def nullspace_dim_at(
        self, tol: Optional[Real] = None, reference: Optional[Real] = None
    ) -> int:
        """#{σ < tol σ_ref}, with σ_ref = σ_max unless a reference scale is
        given (for comparing scans); every unknown for a degenerate scan"""
        tol = float(_lab_config().nullspace_tol if tol is None else tol)
        if self.degenerate:
            return self.unknowns
        scale = self.sigma_max if reference is None else float(reference)
        return int(np.sum(self.singular_values < tol * scale))

    def residual(self, density: Callable, image: Optional[Callable] = None) -> float:
        """‖T F‖ / (σ_max ‖F‖) for a density `density(q, p)` sampled on the
        scan grid.

        T F is the discrete image unless `image(q, x, channel)` gives its
        exact values at the samples of one channel, in which case only ‖F‖
        comes from the grid.
        """
        if self.degenerate:
            return 0.0
        coordinates = [
            np.asarray(density(np.full(p.shape, q), p), dtype=complex) * scale
            for q, p, scale in zip(self.q_nodes, self.p_nodes, self._column_scale)
        ]
        norm = math.sqrt(sum(float(np.linalg.norm(c)) ** 2 for c in coordinates))
        if norm == 0.0:
            return 0.0
        if image is None:
            squared = sum(
                float(np.linalg.norm(block @ c)) ** 2 for block, c in zip(self.blocks, coordinates)
            )
        else:
            q_weights = _branch_weights(self.q_nodes)
            squared = sum(
                w * float(np.linalg.norm(image(float(q), x, channel))) ** 2
                for q, w in zip(self.q_nodes, q_weights)
                for x, channel in zip(self.x_sample, self.channels)
                if np.size(x)
            )
        return math.sqrt(squared) / (self.sigma_max * norm)

    @functools.cached_property
    def _column_scale(self) -> list:
        q_weights = _branch_weights(self.q_nodes)
        return [
            np.sqrt(w * weights * np.abs(p))
            for w, p, weights in zip(q_weights, self.p_nodes, self.p_weights)
        ]

    def to_report(self, tol: Optional[Real] = None) -> dict:
        tol = float(_lab_config().nullspace_tol if tol is None else tol)
        columns = [int(p.size) for p in self.p_nodes]
        return {
            "sigma": self.singular_values.tolist(),
            "sigma_relative": (
                (self.singular_values / self.sigma_max).tolist() if not self.degenerate else []
            ),
            "nullspace_dim": self.nullspace_dim_at(tol),
            "ratio": self.ratio,
            "degenerate": self.degenerate,
            "tol": tol,
            "unknowns": self.unknowns,
            "grids": {
                "q": [float(self.q_nodes[0]), float(self.q_nodes[-1]), int(self.q_nodes.size)],
                "p": {
                    "kind": self.p_grid,
                    "columns": [min(columns), max(columns)] if columns else [0, 0],
                },
                "x": [int(np.size(x)) for x in self.x_sample],
            },
            "kernel": self.descriptor,
        }


def _uniform_p(count: int, p_max: float, half_strip: bool) -> np.ndarray:
    if half_strip:
        return np.linspace(1.0, p_max, count)
    positive = np.linspace(1.0, p_max, max(count // 2, 1))
    return np.concatenate([-positive[::-1], positive])


def _aligned_p(q: float, extent: float, p_max: float, half_strip: bool) -> tuple:
    """Cell centres 1 + (k + ½)Δp with Δp = 2π/(|q| X) and their cell widths;
    a single cell covers [1, p_max] when Δp does not fit"""
    step = 2 * math.pi / (abs(q) * extent) if q != 0.0 and extent > 0.0 else math.inf
    cells = int((p_max - 1.0) // step) if math.isfinite(step) else 0
    if cells == 0:
        positive, weights = np.array([(1.0 + p_max) / 2]), np.array([p_max - 1.0])
    else:
        positive = 1.0 + (np.arange(cells) + 0.5) * step
        weights = np.full(cells, step)
    if half_strip:
        return positive, weights
    return (
        np.concatenate([-positive[::-1], positive]),
        np.concatenate([weights[::-1], weights]),
    )


def _extent(x_sample: tuple) -> float:
    """Largest span of the samples of one channel plus their mean spacing"""
    extents = [
        (float(x.max() - x.min())) * x.size / (x.size - 1) for x in x_sample if np.size(x) > 1
    ]
    return max(extents, default=0.0)


def _q_nodes(q_nodes, q_min: float, q_max: float) -> np.ndarray:
    if isinstance(q_nodes, Integral):
        positive = np.linspace(q_min, q_max, max(int(q_nodes) // 2, 1))
        return np.concatenate([-positive[::-1], positive])
    return np.asarray(q_nodes, dtype=float)


@beartype
def sample_supports(
    kernel: CollisionKernel, window: Sequence, count: int
) -> tuple:
    """Per channel, `count` midpoints spread over the support intervals of
    c_ℓ inside `window` in proportion to their lengths"""
    samples = []
    for channel in kernel.channels:
        intervals = channel.coefficient.support_intervals(float(window[0]), float(window[1]))
        total = sum(hi - lo for lo, hi in intervals)
        if not intervals or total == 0.0:
            samples.append(np.zeros(0))
            continue
        points = []
        for lo, hi in intervals:
            share = max(1, int(round(count * (hi - lo) / total)))
            points.append(lo + (np.arange(share) + 0.5) * (hi - lo) / share)
        samples.append(np.concatenate(points))
    return tuple(samples)


def _block_matrix(
    q: float, p: np.ndarray, weights: np.ndarray, x_sample: tuple, channels: tuple
) -> np.ndarray:
    column = np.sqrt(weights / np.abs(p))
    parts = [
        np.exp(1j * q * np.outer(x, p)) * (np.conj(channel.factor(1.0 / p)) * column)[None, :]
        for x, channel in zip(x_sample, channels)
        if x.size
    ]
    return np.vstack(parts) if parts else np.zeros((0, p.size), dtype=complex)


@beartype
def constraint_scan(
    kernel: CollisionKernel,
    q_nodes=None,
    p_nodes=None,
    x_sample=None,
    window: Optional[Sequence] = None,
    half_strip: bool = False,
) -> ConstraintScan:
    """Singular values of T for the channels of `kernel`.

    Args:
        kernel (:obj:`CollisionKernel`): coefficients and angular factors
        q_nodes: q samples, or a count split evenly over
            ±[`lab.scan_q_min`, `lab.scan_q_max`] [default: `lab.scan_q_nodes`]
        p_nodes: p samples with |p| ≥ 1 shared by all blocks, a count for a
            uniform grid up to `lab.scan_p_max`, or None for grids aligned
            with the x samples
        x_sample: points shared by all channels, one array per channel, or a
            count for :func:`sample_supports` [default: `lab.scan_x_nodes`]
        window: x range for the default samples
        half_strip (:obj:`bool`): μ ∈ [0, 1], so only p ≥ 1

    Raises:
        DomainError: a sample lies outside supp c_ℓ, or a p node inside (-1, 1)
        ParameterError: a block has fewer rows than columns, or the blocks
            exceed `lab.max_matrix_entries`
    """
    config = _lab_config()
    q = _q_nodes(
        config.scan_q_nodes if q_nodes is None else q_nodes, config.scan_q_min, config.scan_q_max
    )
    if x_sample is None or isinstance(x_sample, Integral):
        count = config.scan_x_nodes if x_sample is None else int(x_sample)
        x_sample = sample_supports(kernel, window or config.scan_window, count)
    elif isinstance(x_sample, (list, tuple)) and len(x_sample) == kernel.n and all(
        np.ndim(x) == 1 for x in x_sample
    ):
        x_sample = tuple(np.asarray(x, dtype=float) for x in x_sample)
    else:
        x_sample = (np.asarray(x_sample, dtype=float),) * kernel.n
    for channel, x in zip(kernel.channels, x_sample):
        if x.size and np.any(np.asarray(channel.coefficient(x)) == 0):
            raise DomainError("x samples must lie in the support of their coefficient")

    if p_nodes is None:
        p_grid, extent = "aligned", _extent(x_sample)
        grids = [_aligned_p(qi, extent, config.scan_p_max, half_strip) for qi in q]
    else:
        p_grid = "uniform" if isinstance(p_nodes, Integral) else "given"
        p = (
            _uniform_p(int(p_nodes), config.scan_p_max, half_strip)
            if isinstance(p_nodes, Integral)
            else np.asarray(p_nodes, dtype=float)
        )
        if np.any(np.abs(p) < 1.0) or (half_strip and np.any(p < 0)):
            raise DomainError("scan p nodes must satisfy |p| >= 1 (p >= 1 on the half strip)")
        grids = [(p, _branch_weights(p))] * q.size

    rows = sum(x.size for x in x_sample)
    columns = max(p.size for p, _ in grids)
    if 0 < rows < columns:
        raise ParameterError(
            f"a scan block has {rows} rows but {columns} p nodes; "
            "sample at least as many x points as p nodes"
        )
    entries = rows * sum(p.size for p, _ in grids)
    if entries > config.max_matrix_entries:
        factor = math.ceil(entries / config.max_matrix_entries)
        raise ParameterError(
            f"the scan needs {entries} matrix entries (limit {config.max_matrix_entries}); "
            f"decimate the grids by a factor of {factor}"
        )

    channels = tuple(kernel.channels)
    blocks = map_blocks(
        lambda k: _block_matrix(q[k], grids[k][0], grids[k][1], x_sample, channels),
        range(q.size),
    )

    def spectrum(matrix: np.ndarray) -> np.ndarray:
        return scipy.linalg.svdvals(matrix) if rows else np.zeros(0)

    singular = np.sort(np.concatenate(map_blocks(spectrum, blocks)))[::-1]
    scan = ConstraintScan(
        _describe(kernel),
        q,
        tuple(p for p, _ in grids),
        tuple(w for _, w in grids),
        p_grid,
        x_sample,
        singular,
        tuple(blocks),
        channels,
    )
    if scan.degenerate:
        logger.warning("constraint map vanishes identically; the scan is degenerate")
    else:
        logger.info(
            "constraint scan (%s p grid): %d unknowns, nullspace %d at tol %.1e, σmin/σmax %.3e",
            p_grid,
            scan.unknowns,
            scan.nullspace_dim_at(),
            config.nullspace_tol,
            scan.ratio,
        )
    return scan


@beartype
def half_strip_scan(
    kernel: CollisionKernel,
    q_nodes=None,
    p_nodes=None,
    x_sample=None,
    window: Optional[Sequence] = None,
) -> ConstraintScan:
    """Scan for the operator on the half strip μ ∈ [0, 1]

    Raises:
        ParameterError: an angular factor is supported outside [0, 1]
    """
    for channel in kernel.channels:
        lo, hi = channel.factor.support
        if lo < 0.0:
            raise ParameterError("on the half strip every angular factor lives on [0, 1]")
    return constraint_scan(kernel, q_nodes, p_nodes, x_sample, window, half_strip=True)
