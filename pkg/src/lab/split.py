"""Splitting of a finite-dimensional A + iK into the smallest A-invariant
subspace H₁ containing Ran K and its complement H₀, on which A + iK is
Hermitian. For matrices H₁ = span{Aᵐ k : m ≥ 0, k ∈ Ran K}."""

import dataclasses
import logging
import warnings
from numbers import Real
from typing import Optional

import numpy as np
import scipy.linalg
from beartype import beartype

from ..exceptions import DegenerateInputError, InvalidInputError
from ..model.functions import StripFunction
from ..warnings import CertificateWarning
from .discrete import DiscreteBoltzmann

__all__ = ["SplitResult", "OracleReport", "krylov_split", "oracle_compare"]

logger = logging.getLogger(__name__)


def _lab_config():
    from ..config import get_value

    return get_value().lab


@dataclasses.dataclass(frozen=True, eq=False)
class SplitResult:
    """Orthonormal bases of H₁ and H₀ and the residuals certifying them.

    Residuals are relative to max(‖A‖, ‖K‖):

    - `invariance`: ‖(I - P₁) A P₁‖
    - `inclusion`: ‖(I - P₁) K‖
    - `kernel`: ‖P₀ K‖
    - `hermiticity`: ‖R - R*‖ for R = P₀ (A + iK) P₀
    - `orthogonality`: ‖P₁ P₀‖
    - `completeness`: ‖I - P₁ - P₀‖
    """

    basis_h1: np.ndarray
    basis_h0: np.ndarray
    residuals: dict
    iterations: int
    converged: bool
    tol: float

    @property
    def dim_h1(self) -> int:
        return self.basis_h1.shape[1]

    @property
    def dim_h0(self) -> int:
        return self.basis_h0.shape[1]

    @property
    def certified(self) -> bool:
        return self.converged and all(value < self.tol for value in self.residuals.values())

    def project_h1(self, vector: np.ndarray) -> np.ndarray:
        return self.basis_h1 @ (self.basis_h1.conj().T @ vector)

    def project_h0(self, vector: np.ndarray) -> np.ndarray:
        return self.basis_h0 @ (self.basis_h0.conj().T @ vector)

    def summary(self) -> dict:
        return {
            "dim_h1": self.dim_h1,
            "dim_h0": self.dim_h0,
            "iterations": self.iterations,
            "converged": self.converged,
            "certified": self.certified,
            "tol": self.tol,
            **self.residuals,
        }


def _norm(matrix: np.ndarray) -> float:
    if matrix.size == 0:
        return 0.0
    return float(np.linalg.norm(matrix, 2))


def _orthogonalize(block: np.ndarray, basis: np.ndarray) -> np.ndarray:
    # two passes of classical Gram–Schmidt
    for _ in range(2):
        if basis.shape[1]:
            block = block - basis @ (basis.conj().T @ block)
    return block


def _new_directions(block: np.ndarray, threshold: float) -> np.ndarray:
    if block.shape[1] == 0:
        return block
    left, singular, _ = np.linalg.svd(block, full_matrices=False)
    return left[:, singular > threshold]


@beartype
def krylov_split(
    A: np.ndarray,
    K: np.ndarray,
    max_iter: Optional[int] = None,
    tol: Optional[Real] = None,
) -> SplitResult:
    """Blocked Krylov expansion of Ran K under A with full reorthogonalization.

    Directions whose norm after orthogonalization is below `tol / 10` times
    max(‖A‖, ‖K‖) are dropped; the expansion stops when a block adds none.
    Without convergence after `max_iter` blocks the partial result is
    returned with a :class:`CertificateWarning` and `converged` False.

    Args:
        A (:obj:`numpy.ndarray`): Hermitian matrix
        K (:obj:`numpy.ndarray`): Hermitian matrix of the same shape
        max_iter (:obj:`int`, optional): [default: `lab.krylov_max_iter`]
        tol (:obj:`float`, optional): [default: `lab.krylov_tol`]

    Returns:
        :obj:`SplitResult`: bases and certificate
    """
    config = _lab_config()
    max_iter = int(config.krylov_max_iter if max_iter is None else max_iter)
    tol = float(config.krylov_tol if tol is None else tol)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape != K.shape:
        raise InvalidInputError(f"A and K must be square of equal shape, got {A.shape} and {K.shape}")
    dim = A.shape[0]
    scale = max(_norm(A), _norm(K), np.finfo(float).tiny)
    threshold = 0.1 * tol * scale

    basis = _new_directions(K.astype(complex), threshold)
    block = basis
    converged = basis.shape[1] == 0
    iterations = 0
    while not converged and iterations < max_iter:
        iterations += 1
        new = _new_directions(_orthogonalize(A @ block, basis), threshold)
        if new.shape[1] == 0:
            converged = True
            break
        basis = np.hstack([basis, new])
        block = new
        if basis.shape[1] >= dim:
            converged = True
    if not converged:
        warnings.warn(
            f"Krylov expansion did not terminate in {max_iter} blocks (dimension {basis.shape[1]} of {dim})",
            CertificateWarning,
        )

    if basis.shape[1]:
        complement = scipy.linalg.null_space(basis.conj().T, rcond=tol)
    else:
        complement = np.eye(dim, dtype=complex)
    h1, h0 = basis, complement
    restricted = h1.conj().T @ A @ h1
    reduced = h0.conj().T @ (A + 1j * K) @ h0
    residuals = {
        "invariance": _norm(A @ h1 - h1 @ restricted) / scale,
        "inclusion": _norm(K - h1 @ (h1.conj().T @ K)) / scale,
        "kernel": _norm(h0.conj().T @ K) / scale,
        "hermiticity": _norm(reduced - reduced.conj().T) / scale,
        "orthogonality": _norm(h1.conj().T @ h0),
        "completeness": _norm(np.eye(dim) - h1 @ h1.conj().T - h0 @ h0.conj().T),
    }
    result = SplitResult(h1, h0, residuals, iterations, converged, tol)
    logger.info(
        "split: dim H1 = %d, dim H0 = %d after %d blocks (certified: %s)",
        result.dim_h1,
        result.dim_h0,
        iterations,
        result.certified,
    )
    return result


@dataclasses.dataclass(frozen=True)
class OracleReport:
    """‖P₁g‖/‖g‖ for a vector on the oracle's grids"""

    ratio: float
    g_norm: float
    dim_h1: int
    dim_h0: int
    certified: bool

    def passes(self, threshold: Optional[Real] = None) -> bool:
        if threshold is None:
            from ..config import get_value

            threshold = get_value().tolerances.oracle_ratio
        return self.ratio < float(threshold)


@beartype
def oracle_compare(
    g: StripFunction,
    operator: DiscreteBoltzmann,
    split: Optional[SplitResult] = None,
) -> OracleReport:
    """Relative size of the component of g in the discrete H₁; small values
    mean g lies close to the discrete selfadjoint subspace.

    Raises:
        InvalidInputError: g is sampled on other grids than the operator
        DegenerateInputError: g is zero
    """
    vector = operator.to_vector(g)
    norm = float(np.linalg.norm(vector))
    if norm == 0.0:
        raise DegenerateInputError("the ratio is undefined for g = 0")
    split = split or krylov_split(operator.A, operator.K)
    ratio = float(np.linalg.norm(split.project_h1(vector))) / norm
    logger.info("oracle ratio ‖P1 g‖/‖g‖ = %.3e", ratio)
    return OracleReport(ratio, norm, split.dim_h1, split.dim_h0, split.certified)
