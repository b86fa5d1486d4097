"""The analytic family

    φ_α(z) = exp[2iα(-z/2 + 1/(1 - w(z)))] ρ(z),   w(z) = √((z - 1)/(z + 1)),

analytic off (-∞, -1] ∪ [1, ∞) and the cut J = [-ρ_a, -ρ_b] of ρ.
"""

import math
from typing import Optional

import numpy as np
import pydantic
from beartype import beartype

from ..exceptions import CutEvaluationError

__all__ = [
    "HardyParams",
    "sqrt_branch",
    "rho_factor",
    "phi_alpha",
    "half_plane_modulus",
    "half_plane_sup",
    "half_plane_stability",
]


def _default_ladder() -> list[float]:
    from ..config import get_value

    return [float(eta) for eta in get_value().hardy.eta_ladder]


class HardyParams(pydantic.BaseModel):
    """Parameters of φ_α: the exponent α, the cut [-rho_a, -rho_b] of ρ, the
    channel bound n and the η ladder for boundary values"""

    model_config = pydantic.ConfigDict(extra="forbid", frozen=True)

    alpha: float = pydantic.Field(default=2.0, gt=0)
    rho_a: float = 3.0
    rho_b: float = pydantic.Field(default=2.0, gt=1)
    n: int = pydantic.Field(default=1, ge=1)
    eta_ladder: list[float] = pydantic.Field(default_factory=_default_ladder, min_length=2)

    @pydantic.model_validator(mode="after")
    def _cut_and_ladder(self) -> "HardyParams":
        if not self.rho_a > self.rho_b:
            raise ValueError(f"rho_a={self.rho_a} must exceed rho_b={self.rho_b}")
        ladder = self.eta_ladder
        if any(eta <= 0 for eta in ladder) or any(b >= a for a, b in zip(ladder, ladder[1:])):
            raise ValueError("the η ladder must be positive and strictly decreasing")
        return self

    @property
    def cut(self) -> tuple[float, float]:
        return (-self.rho_a, -self.rho_b)

    @property
    def lambda_at_zero(self) -> float:
        return math.log(self.rho_a / self.rho_b)


def _on_real_axis(z: np.ndarray) -> np.ndarray:
    return np.imag(z) == 0.0


@beartype
def sqrt_branch(z):
    """w = √((z - 1)/(z + 1)) with Im w > 0 off the rays (-∞, -1] ∪ [1, ∞).

    Computed as i·√(-(z - 1)/(z + 1)) with the principal root, whose cut
    is exactly the pair of rays.

    Raises:
        CutEvaluationError: z lies on one of the rays
    """
    z = np.asarray(z, dtype=complex)
    real = np.real(z)
    if np.any(_on_real_axis(z) & (np.abs(real) >= 1.0)):
        raise CutEvaluationError("√((z-1)/(z+1)) is evaluated on its cut; use boundary values")
    w = 1j * np.sqrt(-(z - 1.0) / (z + 1.0))
    if np.any(np.imag(w) <= 0.0):
        raise CutEvaluationError("z is numerically on a cut: Im w is not positive")
    return w if w.ndim else complex(w)


@beartype
def rho_factor(z, params: HardyParams):
    """ρ(z) = λ(z)² (λ(z) - λ(0))^{n-1}, λ(z) = log((z + rho_a)/(z + rho_b)).

    λ is the principal logarithm, analytic off [-rho_a, -rho_b] and real at
    0. ρ vanishes to order n - 1 at 0 and is O(|z|^{-2}) at infinity.
    """
    z = np.asarray(z, dtype=complex)
    lo, hi = params.cut
    real = np.real(z)
    if np.any(_on_real_axis(z) & (real >= lo) & (real <= hi)):
        raise CutEvaluationError(f"ρ is evaluated on its cut [{lo}, {hi}]")
    lam = np.log((z + params.rho_a) / (z + params.rho_b))
    value = lam**2
    if params.n > 1:
        value = value * (lam - params.lambda_at_zero) ** (params.n - 1)
    return value if value.ndim else complex(value)


def _exponent(z: np.ndarray, alpha: float) -> np.ndarray:
    w = np.asarray(sqrt_branch(z))
    return 2j * alpha * (-z / 2.0 + 1.0 / (1.0 - w))


@beartype
def phi_alpha(z, params: HardyParams):
    """φ_α(z) off both cuts"""
    z = np.asarray(z, dtype=complex)
    value = np.exp(_exponent(z, params.alpha)) * np.asarray(rho_factor(z, params))
    return value if value.ndim else complex(value)


@beartype
def half_plane_modulus(z, params: HardyParams, side: Optional[int] = None):
    """|e^{∓iαz} φ_α(z)| with the upper sign in the upper half-plane,
    combined in the exponent so that neither factor overflows"""
    z = np.asarray(z, dtype=complex)
    sign = np.sign(np.imag(z)) if side is None else float(side)
    exponent = _exponent(z, params.alpha) - 1j * sign * params.alpha * z
    return np.exp(np.real(exponent)) * np.abs(np.asarray(rho_factor(z, params)))


def _plane_config():
    from ..config import get_value

    return get_value().hardy


@beartype
def half_plane_sup(
    params: HardyParams,
    side: int,
    per_unit: Optional[int] = None,
    x_max: Optional[float] = None,
    y_range: Optional[tuple] = None,
) -> float:
    """sup of :func:`half_plane_modulus` over x ± iy on a sample grid.

    x is uniform on [-x_max, x_max] with `per_unit` nodes per unit length,
    so the integers (±1 and the ends of an integer cut) are always nodes; y
    is log-spaced over `y_range` with `per_unit` nodes per decade. Defaults
    come from the `hardy.plane_*` configuration.
    """
    config = _plane_config()
    per_unit = int(config.plane_per_unit if per_unit is None else per_unit)
    x_max = float(config.plane_x_max if x_max is None else x_max)
    y_lo, y_hi = (float(y) for y in (config.plane_y_range if y_range is None else y_range))
    x = np.linspace(-x_max, x_max, int(round(2 * x_max * per_unit)) + 1)
    decades = math.log10(y_hi / y_lo)
    y = np.logspace(math.log10(y_lo), math.log10(y_hi), int(math.ceil(decades * per_unit)) + 1)
    sign = 1 if side > 0 else -1
    best = 0.0
    for row in y:
        best = max(best, float(np.max(half_plane_modulus(x + sign * 1j * row, params, side=sign))))
    return best


@beartype
def half_plane_stability(params: HardyParams, per_unit: Optional[int] = None) -> float:
    """Largest relative change of the half-plane sups, over both sides, when
    the sample grid is refined twofold"""
    per_unit = int(_plane_config().plane_per_unit if per_unit is None else per_unit)
    change = 0.0
    for side in (1, -1):
        coarse = half_plane_sup(params, side, per_unit)
        fine = half_plane_sup(params, side, 2 * per_unit)
        change = max(change, abs(fine - coarse) / fine)
    return change
