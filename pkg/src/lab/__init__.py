"""Finite-dimensional experiments: the discretized operator, its splitting
into H₁ ⊕ H₀ and singular-value scans of the membership constraints."""

from .discrete import (
    DiscreteBoltzmann,
    assemble_discrete,
    evolve_free,
    resample_strip,
    torus_grid,
)
from .scan import ConstraintScan, constraint_scan, half_strip_scan, sample_supports
from .split import OracleReport, SplitResult, krylov_split, oracle_compare

__all__ = [
    "DiscreteBoltzmann",
    "assemble_discrete",
    "evolve_free",
    "resample_strip",
    "torus_grid",
    "ConstraintScan",
    "constraint_scan",
    "half_strip_scan",
    "sample_supports",
    "OracleReport",
    "SplitResult",
    "krylov_split",
    "oracle_compare",
]
