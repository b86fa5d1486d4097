"""Building blocks of the gap-lattice construction.

    ω₀(s)  = exp(1 - δ²/(δ² - s²)) on |s| < δ, unit peak at 0
    h(p)   = ω_ν(p - c) repeated with period 2π, c = π by default
    ξ(p)   = h(p) (ip)^n ω̂₀(p)
    f(r)   = ξ(ar) e^{-i x₀ r}
    χ(q)   = q 1_{[-b, b]}(q), or q (1 - (q/b)²)^P on [-b, b]

ξ is the Fourier transform of h convolved with ω₀^{(n)}; its inverse
transform is a comb on ℤ smeared over the δ-vicinity of every lattice point.
"""

import dataclasses
import functools
import logging
import math
from collections.abc import Sequence
from numbers import Integral, Real
from typing import Literal, Optional

import numpy as np
import scipy.special
from beartype import beartype

from ..exceptions import ParameterError
from ..transforms.fourier import SQRT_2PI

__all__ = [
    "Bump",
    "PeriodicBump",
    "Xi",
    "ScaledProfile",
    "ChiWindow",
    "WindowKind",
    "ProfileQuadrature",
    "build_bump",
    "build_periodic_h",
    "build_xi",
    "build_f",
    "build_window_chi",
    "profile_gram",
]

logger = logging.getLogger(__name__)

_BLOCK = 1024

WindowKind = Literal["indicator", "smooth"]


def _safe_band(delta: float, order: int) -> float:
    # the transform of ω₀^{(m)} decays like |p|^m exp(-√(δ|p|))
    return (33.0 + 9.0 * order) ** 2 / delta


def _construction_config():
    from ..config import get_value

    return get_value().construction


@functools.cache
def _numerator(delta: float, order: int) -> np.polynomial.Polynomial:
    """N_m with ω₀^{(m)} = N_m / (δ² - s²)^{2m} · ω₀"""
    s = np.polynomial.Polynomial([0.0, 1.0])
    r = np.polynomial.Polynomial([delta**2, 0.0, -1.0])
    numerator = np.polynomial.Polynomial([1.0])
    for m in range(order):
        numerator = (
            numerator.deriv() * r**2 + 4 * m * s * r * numerator - 2 * delta**2 * s * numerator
        )
    return numerator


@dataclasses.dataclass(frozen=True)
class Bump:
    """ω₀ supported on (-δ, δ)"""

    delta: float

    def __post_init__(self):
        if not 0.0 < self.delta < math.pi:
            raise ParameterError(f"bump half-width must lie in (0, π), got {self.delta}")
        object.__setattr__(self, "delta", float(self.delta))

    def __call__(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        out = np.zeros(s.shape)
        inside = np.abs(s) < self.delta
        d2 = self.delta**2
        out[inside] = np.exp(1.0 - d2 / (d2 - s[inside] ** 2))
        return out

    def derivative(self, s, order: int) -> np.ndarray:
        """ω₀^{(order)}(s), exact through the recursion
        N_{m+1} = N_m' r² + 4m s r N_m - 2δ² s N_m, r = δ² - s²"""
        s = np.asarray(s, dtype=float)
        if order == 0:
            return self(s)
        out = np.zeros(s.shape)
        inside = np.abs(s) < self.delta
        x = s[inside]
        r = self.delta**2 - x**2
        out[inside] = _numerator(self.delta, int(order))(x) / r ** (2 * order) * self(x)
        return out

    def hat(self, p, order: int = 0) -> np.ndarray:
        """Fourier transform of ω₀^{(order)}, equal to (ip)^order ω̂₀(p).

        The derivative itself is transformed by the trapezoid rule in s (a
        cosine sum for even orders, a sine sum for odd ones), with a spacing
        fine enough that aliased copies of the transform are negligible at
        every requested frequency. Rounding then stays at the size of the
        derivative instead of growing like |p|^order.
        """
        order = int(order)
        p = np.asarray(p, dtype=float)
        flat = p.ravel()
        values = np.empty(flat.size)
        order_index = np.argsort(np.abs(flat))
        magnitudes = np.abs(flat[order_index])
        min_nodes = int(_construction_config().bump_nodes)
        band = _safe_band(self.delta, order)
        for start in range(0, flat.size, _BLOCK):
            chunk = magnitudes[start : start + _BLOCK]
            reach = chunk[-1] + band
            nodes = max(min_nodes, int(math.ceil(self.delta * reach / (2 * math.pi))))
            spacing = self.delta / nodes
            s = spacing * np.arange(1, nodes)
            samples = self.derivative(s, order)
            if order % 2:
                transform = 2.0 * spacing * (np.sin(np.outer(chunk, s)) @ samples)
            else:
                origin = float(self.derivative(np.zeros(1), order)[0])
                transform = spacing * (origin + 2.0 * np.cos(np.outer(chunk, s)) @ samples)
            values[order_index[start : start + chunk.size]] = transform / SQRT_2PI
        values = values.reshape(p.shape)
        if order % 2:
            return -1j * np.sign(p) * values
        return values.astype(complex)


@dataclasses.dataclass(frozen=True)
class PeriodicBump:
    """2π-periodic h built from a bump of half-width ν centered at `center`"""

    nu: float
    center: float = math.pi

    def __post_init__(self):
        if not 0.0 < self.nu < math.pi:
            raise ParameterError(f"ν must lie in (0, π), got {self.nu}")
        object.__setattr__(self, "nu", float(self.nu))
        object.__setattr__(self, "center", float(self.center))

    @functools.cached_property
    def profile(self) -> Bump:
        return Bump(self.nu)

    def _offset(self, p) -> np.ndarray:
        return np.mod(np.asarray(p, dtype=float) - self.center + math.pi, 2 * math.pi) - math.pi

    def __call__(self, p) -> np.ndarray:
        return self.profile(self._offset(p))

    @property
    def zero_radius(self) -> float:
        """Largest r with h = 0 on [-r, r]"""
        nearest = abs(float(self._offset(0.0)))
        return nearest - self.nu

    def pieces(self, lo: float, hi: float) -> list[tuple[float, float]]:
        """Support intervals [c + 2πk - ν, c + 2πk + ν] meeting [lo, hi]"""
        first = math.floor((lo - self.center - self.nu) / (2 * math.pi))
        last = math.ceil((hi - self.center + self.nu) / (2 * math.pi))
        pieces = []
        for k in range(first, last + 1):
            mid = self.center + 2 * math.pi * k
            if mid + self.nu > lo and mid - self.nu < hi:
                pieces.append((mid - self.nu, mid + self.nu))
        return pieces


@dataclasses.dataclass(frozen=True)
class Xi:
    """ξ(p) = h(p) (ip)^n ω̂₀(p)"""

    h: PeriodicBump
    omega0: Bump
    n: int

    def __post_init__(self):
        if int(self.n) < 1:
            raise ParameterError(f"n must be >= 1, got {self.n}")
        object.__setattr__(self, "n", int(self.n))

    def __call__(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        window = self.h(p)
        out = np.zeros(p.shape, dtype=complex)
        active = window != 0.0
        out[active] = window[active] * self.omega0.hat(p[active], order=self.n)
        return out


@dataclasses.dataclass(frozen=True)
class ProfileQuadrature:
    """Trapezoid nodes on the support pieces of a profile, with the profile
    values at those nodes"""

    nodes: np.ndarray
    weights: np.ndarray
    values: np.ndarray

    def integrate(self, integrand: np.ndarray) -> complex:
        return complex(np.sum(self.weights * integrand))


@dataclasses.dataclass(frozen=True)
class ScaledProfile:
    """f(r) = ξ(ar) e^{-i x₀ r}"""

    xi: Xi
    a: float
    x0: float = 0.0

    def __post_init__(self):
        if not self.a > 0:
            raise ParameterError(f"lattice period must be positive, got {self.a}")
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "x0", float(self.x0))

    @property
    def n(self) -> int:
        return self.xi.n

    def __call__(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        values = self.xi(self.a * r)
        if self.x0:
            values = values * np.exp(-1j * self.x0 * r)
        return values

    def shifted(self, x0: float) -> "ScaledProfile":
        return dataclasses.replace(self, x0=float(x0))

    def unshifted(self) -> "ScaledProfile":
        return self.shifted(0.0)

    def pieces(self, lo: float, hi: float) -> list[tuple[float, float]]:
        """Support intervals of f meeting [lo, hi]"""
        return [(a / self.a, b / self.a) for a, b in self.xi.h.pieces(self.a * lo, self.a * hi)]

    def radius(self, tol: Optional[Real] = None) -> float:
        """Radius beyond which |f(r)|² |r| stays below tol² times its peak,
        judged at the support centers"""
        tol = float(_construction_config().tail_tolerance if tol is None else tol)
        h = self.xi.h
        first = abs(float(h._offset(0.0))) / self.a
        step = 2 * math.pi / self.a
        peak, quiet, k, batch = 0.0, 0, 0, 256
        while k < 200_000:
            centers = first + step * np.arange(k, k + batch)
            magnitude = np.maximum(
                np.abs(self(centers)), np.abs(self(-centers))
            ) * np.sqrt(centers)
            for offset, value in enumerate(magnitude):
                peak = max(peak, float(value))
                if peak > 0 and value < tol * peak:
                    quiet += 1
                    if quiet >= 3:
                        return float(centers[offset] + h.nu / self.a)
                else:
                    quiet = 0
            k += batch
        return float(first + step * k)

    @functools.lru_cache(maxsize=8)
    def quadrature(
        self, r_max: Optional[float] = None, nodes_per_piece: int = 128
    ) -> ProfileQuadrature:
        """Trapezoid rule on every support piece inside [-r_max, r_max].

        The profile vanishes to all orders at the piece ends, so the rule
        converges faster than any power of `nodes_per_piece`.
        """
        r_max = self.radius() if r_max is None else float(r_max)
        pieces = np.array(self.pieces(-r_max, r_max))
        fractions = np.arange(1, nodes_per_piece + 1) / (nodes_per_piece + 1)
        widths = pieces[:, 1] - pieces[:, 0]
        nodes = (pieces[:, :1] + widths[:, None] * fractions[None, :]).ravel()
        weights = np.repeat(widths / (nodes_per_piece + 1), nodes_per_piece)
        logger.debug("profile quadrature: %d pieces up to |r| = %.1f", len(pieces), r_max)
        return ProfileQuadrature(nodes, weights, self(nodes))

    def weighted_norm(self) -> float:
        """(∫ |f(r)|² |r| dr)^{1/2}"""
        rule = self.quadrature()
        return math.sqrt(
            max(rule.integrate(np.abs(rule.values) ** 2 * np.abs(rule.nodes)).real, 0.0)
        )

    def band(self, tol: Optional[Real] = None) -> float:
        """Smallest R with ∫_{|r|>R} |f(r)|² |r| dr ≤ 2 tol ∫ |f(r)|² |r| dr.

        Cutting f at R then changes its weighted norm by at most a relative
        `tol` (default `construction.band_tolerance`).
        """
        tol = float(_construction_config().band_tolerance if tol is None else tol)
        rule = self.quadrature()
        radii = np.abs(rule.nodes)
        mass = rule.weights * np.abs(rule.values) ** 2 * radii
        total = float(mass.sum())
        if total == 0.0:
            return 0.0
        order = np.argsort(radii)
        tail = total - np.cumsum(mass[order])
        first = int(np.argmax(tail <= 2 * tol * total))
        return float(radii[order][first])


@dataclasses.dataclass(frozen=True)
class ChiWindow:
    """χ on [-b, b], 0 elsewhere.

    The indicator kind is χ(q) = q with ∫ |χ(q)/q|² dq = 2b. The smooth kind
    is χ(q) = q (1 - (q/b)²)^power, which vanishes to order `power` at ±b,
    with ∫ |χ(q)/q|² dq = b B(1/2, 2 power + 1).
    """

    b: float
    kind: WindowKind = "indicator"
    power: int = 16

    def __post_init__(self):
        if not self.b > 0:
            raise ParameterError(f"window half-width must be positive, got {self.b}")
        if self.kind not in ("indicator", "smooth"):
            raise ParameterError(f"unknown window kind {self.kind!r}")
        if int(self.power) < 1:
            raise ParameterError(f"window power must be >= 1, got {self.power}")
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "power", int(self.power))

    def __call__(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        inside = np.abs(q) <= self.b
        if self.kind == "indicator":
            return np.where(inside, q, 0.0)
        taper = np.clip(1.0 - (q / self.b) ** 2, 0.0, None) ** self.power
        return np.where(inside, q * taper, 0.0)

    @property
    def over_q_norm(self) -> float:
        """(∫ |χ(q)/q|² dq)^{1/2}"""
        if self.kind == "indicator":
            return math.sqrt(2 * self.b)
        return math.sqrt(self.b * scipy.special.beta(0.5, 2 * self.power + 1))


@beartype
def build_bump(delta: Real) -> Bump:
    """ω₀ with support (-δ, δ) and unit peak"""
    return Bump(float(delta))


@beartype
def build_periodic_h(nu: Real, center: Real = math.pi) -> PeriodicBump:
    """2π-periodic h, a bump of half-width ν around every `center` + 2πk"""
    return PeriodicBump(float(nu), float(center))


@beartype
def build_xi(h: PeriodicBump, omega0: Bump, n: Integral) -> Xi:
    return Xi(h, omega0, int(n))


@beartype
def build_f(xi: Xi, a: Real, x0: Real = 0.0) -> ScaledProfile:
    """f(r) = ξ(ar), modulated by e^{-i x₀ r} for a lattice through x₀"""
    return ScaledProfile(xi, float(a), float(x0))


@beartype
def build_window_chi(b: Real, kind: WindowKind = "indicator", power: Integral = 16) -> ChiWindow:
    """χ(q) = q on [-b, b], tapered by (1 - (q/b)²)^power for the smooth kind"""
    return ChiWindow(float(b), kind, int(power))


@beartype
def profile_gram(profiles: Sequence[ScaledProfile]) -> np.ndarray:
    """G[i, j] = ∫ f_i(r) conj(f_j(r)) |r| dr.

    Each row is integrated on the support pieces of f_i, where the product
    is smooth and vanishes flatly at the piece ends.
    """
    size = len(profiles)
    gram = np.zeros((size, size), dtype=complex)
    for i, profile in enumerate(profiles):
        rule = profile.quadrature()
        for j, other in enumerate(profiles):
            gram[i, j] = rule.integrate(
                rule.values * np.conj(other(rule.nodes)) * np.abs(rule.nodes)
            )
    return (gram + gram.conj().T) / 2
