"""Grids, sampled functions, collision kernels and weighted norms: the
vocabulary shared by the transforms, constructions and oracles."""

from .functions import (
    LineFunction,
    PlaneFunction,
    Representation,
    SpectralDensity,
    StripFunction,
    line_norm,
    strip_norm,
    weighted_norm,
)
from .grids import AngleGrid, Grid1D, simpson_weights
from .kernel import (
    AngularFactor,
    BumpCoefficient,
    Channel,
    Coefficient,
    CollisionKernel,
    GapLatticeCoefficient,
    HatFunction,
    IntervalCoefficient,
    TestFunctionFamily,
    ZeroCoefficient,
    eval_gap_coefficient,
)

__all__ = [
    "AngleGrid",
    "AngularFactor",
    "BumpCoefficient",
    "Channel",
    "Coefficient",
    "CollisionKernel",
    "GapLatticeCoefficient",
    "Grid1D",
    "HatFunction",
    "IntervalCoefficient",
    "LineFunction",
    "PlaneFunction",
    "Representation",
    "SpectralDensity",
    "StripFunction",
    "TestFunctionFamily",
    "ZeroCoefficient",
    "eval_gap_coefficient",
    "line_norm",
    "simpson_weights",
    "strip_norm",
    "weighted_norm",
]
