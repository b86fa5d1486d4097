"""The `selfadjoint.model.schema` module contains Pydantic `BaseModel`s that
describe the JSON descriptors of grids, coefficients and kernels, and the
CSV layout used to export sampled functions.

Complex numbers are written as `[re, im]` pairs.
"""

import math
from typing import Literal, Optional, Union

import numpy as np
import pandas as pd
from beartype import beartype
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .functions import LineFunction, PlaneFunction, SpectralDensity, StripFunction
from .grids import AngleGrid, Grid1D
from .kernel import (
    AngularFactor,
    BumpCoefficient,
    Channel,
    CollisionKernel,
    GapLatticeCoefficient,
    IntervalCoefficient,
    ZeroCoefficient,
)

__all__ = [
    "CSV_COLUMNS",
    "GridDescriptor",
    "AngleDescriptor",
    "GapCoefficientDescriptor",
    "IntervalCoefficientDescriptor",
    "BumpCoefficientDescriptor",
    "ZeroCoefficientDescriptor",
    "ChannelDescriptor",
    "KernelDescriptor",
    "to_frame",
    "write_csv",
]

CSV_COLUMNS = ["x_or_q", "mu_or_p", "re", "im"]
"""Column headers of every sampled-function CSV"""

ComplexPair = tuple[float, float]
"""A complex number as `[re, im]`"""


class GridDescriptor(BaseModel):
    """Uniform grid"""

    lo: float
    hi: float
    n: int = Field(ge=2)

    model_config = ConfigDict(extra="forbid")

    @model_validator(mode="after")
    def _ordered(self):
        if not self.lo < self.hi:
            raise ValueError("lo must be smaller than hi")
        return self

    def build(self) -> Grid1D:
        return Grid1D(self.lo, self.hi, self.n)


class AngleDescriptor(BaseModel):
    """Gauss–Legendre angle grid"""

    n_angles: int = Field(default=64, ge=2, multiple_of=2)
    kind: Literal["double", "full", "graded"] = "double"
    panels: int = Field(default=1, ge=1)

    model_config = ConfigDict(extra="forbid")

    @model_validator(mode="after")
    def _even_panels(self):
        if self.kind == "graded" and self.n_angles % (2 * self.panels):
            raise ValueError("n_angles must be a multiple of 2 * panels")
        return self

    def build(self) -> AngleGrid:
        return AngleGrid(self.n_angles, self.kind, self.panels)


class GapCoefficientDescriptor(BaseModel):
    """Coefficient vanishing on the eps-vicinity of x0 + aℤ"""

    type: Literal["gap"] = "gap"
    x0: float = 0.0
    a: float = Field(gt=0)
    eps: float = Field(gt=0)

    model_config = ConfigDict(extra="forbid")

    @model_validator(mode="after")
    def _half_gap(self):
        if self.eps >= self.a / 2:
            raise ValueError(f"eps={self.eps} must be smaller than a/2={self.a / 2}")
        return self

    def build(self) -> GapLatticeCoefficient:
        return GapLatticeCoefficient(self.x0, self.a, self.eps)


class IntervalCoefficientDescriptor(BaseModel):
    """Constant coefficient on an interval; `null` ends are infinite"""

    type: Literal["interval"] = "interval"
    lo: Optional[float] = 0.0
    hi: Optional[float] = None
    value: float = 1.0

    model_config = ConfigDict(extra="forbid")

    def build(self) -> IntervalCoefficient:
        lo = -math.inf if self.lo is None else self.lo
        hi = math.inf if self.hi is None else self.hi
        return IntervalCoefficient(lo, hi, self.value)


class BumpCoefficientDescriptor(BaseModel):
    """Smooth bump coefficient"""

    type: Literal["bump"] = "bump"
    center: float = 0.0
    half_width: float = Field(default=0.5, gt=0)

    model_config = ConfigDict(extra="forbid")

    def build(self) -> BumpCoefficient:
        return BumpCoefficient(self.center, self.half_width)


class ZeroCoefficientDescriptor(BaseModel):
    """c ≡ 0"""

    type: Literal["zero"] = "zero"

    model_config = ConfigDict(extra="forbid")

    def build(self) -> ZeroCoefficient:
        return ZeroCoefficient()


CoefficientDescriptor = Union[
    GapCoefficientDescriptor,
    IntervalCoefficientDescriptor,
    BumpCoefficientDescriptor,
    ZeroCoefficientDescriptor,
]


class ChannelDescriptor(BaseModel):
    """One channel: coefficient and polynomial angular factor"""

    coefficient: CoefficientDescriptor = Field(discriminator="type")
    factor: list[ComplexPair] = [(1.0, 0.0)]
    support: tuple[float, float] = (-1.0, 1.0)

    model_config = ConfigDict(extra="forbid")

    def build(self) -> Channel:
        factor = AngularFactor(
            tuple(complex(re, im) for re, im in self.factor), tuple(self.support)
        )
        return Channel(self.coefficient.build(), factor)


class KernelDescriptor(BaseModel):
    """Collision kernel"""

    channels: list[ChannelDescriptor] = Field(min_length=1)

    model_config = ConfigDict(extra="forbid")

    def build(self) -> CollisionKernel:
        return CollisionKernel(tuple(channel.build() for channel in self.channels))


@beartype
def to_frame(
    function: Union[LineFunction, StripFunction, SpectralDensity, PlaneFunction],
) -> pd.DataFrame:
    """Long-format table of a sampled function with columns
    `x_or_q, mu_or_p, re, im`.

    Line functions put their only variable in `x_or_q` and 0 in `mu_or_p`.
    """
    if isinstance(function, LineFunction):
        first = function.grid.nodes
        second = np.zeros_like(first)
        values = function.values
    else:
        if isinstance(function, StripFunction):
            axes = (function.grid.nodes, function.angles.nodes)
        elif isinstance(function, SpectralDensity):
            axes = (function.q_grid.nodes, function.p_grid.nodes)
        else:
            axes = (function.q_grid.nodes, function.second_grid.nodes)
        first, second = (axis.ravel() for axis in np.meshgrid(*axes, indexing="ij"))
        values = function.values.ravel()
    return pd.DataFrame(
        {
            CSV_COLUMNS[0]: first,
            CSV_COLUMNS[1]: second,
            CSV_COLUMNS[2]: values.real,
            CSV_COLUMNS[3]: values.imag,
        }
    )


@beartype
def write_csv(
    function: Union[LineFunction, StripFunction, SpectralDensity, PlaneFunction],
    path: str,
) -> None:
    """Write a sampled function as CSV with an explicit header row"""
    to_frame(function).to_csv(path, index=False, float_format="%.17g")
