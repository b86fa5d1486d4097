"""Stages of the batch commands.

A suite receives the run configuration, its validated parameters and the
report it fills with metrics, checks and artifacts. Parameter files are
JSON objects validated by the models below; unknown keys are rejected.
"""

import json
import logging
from typing import Literal, Optional

import numpy as np
import pandas as pd
import pydantic

from ..boltzmann3d import (
    SphereGrid,
    SphereKernel,
    azimuthal_residual,
    build_azimuthal_null,
    component_factor,
    isotropic_factor,
    verify_fourier_nullity,
)
from ..config import get_value
from ..exceptions import ConfigInvalidError, DegenerateInputError
from ..gap import (
    LatticeConstructionParams,
    build_bump,
    build_f,
    build_periodic_h,
    build_window_chi,
    build_xi,
    construct_gap_bundle,
    verify_membership,
)
from ..hardy import (
    HardyParams,
    compact_support_bundle,
    f_alpha_function,
    half_plane_stability,
    half_plane_sup,
    hardy_grid,
    ladder_sensitivity,
    verify_bundle_membership,
    verify_hat_vanishes,
)
from ..lab import (
    assemble_discrete,
    constraint_scan,
    half_strip_scan,
    krylov_split,
    oracle_compare,
    resample_strip,
    torus_grid,
)
from ..model.functions import LineFunction, Representation, StripFunction
from ..model.grids import AngleGrid, Grid1D
from ..model.schema import KernelDescriptor, write_csv
from ..transforms.fourier import LineTransform
from .plot_stub import write_plot_stub
from .reports import Report, RunConfig

__all__ = [
    "SUITES",
    "SCAN_PRESETS",
    "GapRun",
    "ScanRun",
    "OracleRun",
    "HardyRun",
    "SphereRun",
]

logger = logging.getLogger(__name__)

PROPERTY1_STABILITY = 1e-4
HAT_LEAKAGE = 1e-3
BUNDLE_MEMBERSHIP = 1e-3
CONTROL_RATIO = 0.9
SPLIT_RESIDUAL = 1e-10
GAP_NULLSPACE = 3
GAP_ISOMETRY = 1e-7
BUNDLE_ISOMETRY = 1e-2
LEAKAGE_TO_BOUND = (0.01, 10.0)
ETA_HALVING = 1e-7
HALF_PLANE_STABILITY = 0.05
# points of the real axis where the η ladder is checked
LADDER_REACH = 8.0
LADDER_POINTS = 161

SCAN_PRESETS = {
    "gap": (
        {"channels": [{"coefficient": {"type": "gap", "a": 1.0, "eps": 0.25}}]},
        False,
    ),
    "halfaxis": (
        {"channels": [{"coefficient": {"type": "interval", "lo": 0.0, "hi": None}}]},
        False,
    ),
    "halfstrip": (
        {
            "channels": [
                {
                    "coefficient": {"type": "interval", "lo": 0.0, "hi": None},
                    "support": [0.0, 1.0],
                }
            ]
        },
        True,
    ),
    "two-half": (
        {
            "channels": [
                {"coefficient": {"type": "interval", "lo": 0.0, "hi": None}},
                {
                    "coefficient": {"type": "interval", "lo": None, "hi": 0.0},
                    "factor": [[0.0, 0.0], [1.0, 0.0]],
                },
            ]
        },
        False,
    ),
}
"""Kernel descriptors and half-strip flags of the scan presets"""


def _params(**fields) -> pydantic.ConfigDict:
    return pydantic.ConfigDict(extra="forbid", frozen=True, **fields)


def _write_table(report: Report, filename: str, frame: pd.DataFrame) -> str:
    frame.to_csv(report.path(filename), index=False, float_format="%.17g")
    return filename


# construct-gap


class GapRun(pydantic.BaseModel):
    """Parameters of `construct-gap`"""

    model_config = _params()

    lattice: LatticeConstructionParams = pydantic.Field(default_factory=LatticeConstructionParams)
    t_max: float = pydantic.Field(default=5.0, ge=0)
    t_count: int = pydantic.Field(default=21, ge=1)
    window: tuple[float, float] = (-4.0, 4.0)
    f_per_unit: int = pydantic.Field(default=128, ge=1)


def _scaled_lattice(
    lattice: LatticeConstructionParams, config: RunConfig
) -> LatticeConstructionParams:
    return LatticeConstructionParams(
        **{
            **lattice.model_dump(),
            "q_nodes": config.scaled(lattice.q_nodes, minimum=3),
            "p_per_unit": config.scaled(lattice.p_per_unit),
        }
    )


def construct_gap(config: RunConfig, params: GapRun, report: Report) -> None:
    """Build the gap-lattice bundle, audit its conditions and check that g
    pairs to zero with the free evolution of every channel.

    Membership is checked on the samples of g; the closed-form Fourier
    pairings are reported next to it as `membership_fourier`.
    """
    tolerances = get_value().tolerances
    bundle = construct_gap_bundle(_scaled_lattice(params.lattice, config))
    report.metrics.update(
        {
            "leakage": list(bundle.leakage),
            "F_norm": bundle.F_norm,
            "g_norm": bundle.g_norm,
            "x_nodes": bundle.g.grid.n,
            "angles": bundle.g.angles.n_angles,
        }
    )
    report.write_json("manifest.json", bundle.manifest())
    reach = bundle.f.band(bundle.params.band_tolerance)
    f_grid = Grid1D(-reach, reach, int(2 * reach * params.f_per_unit) + 1)
    csv = [
        _write_csv(report, "f.csv", LineFunction.sample(bundle.f, f_grid)),
        _write_csv(report, "F.csv", bundle.F),
        _write_csv(report, "g.csv", bundle.g),
    ]
    report.artifacts.append(write_plot_stub(config.out, config.command, csv))

    report.check(
        "condition_ii_leakage", max(bundle.leakage), config.tolerance(tolerances.leakage)
    )
    if not report.check("g_nonzero", bundle.g_norm, 0.0, relation=">"):
        raise DegenerateInputError("the constructed g vanishes")
    report.check("isometry", bundle.isometry_defect, config.tolerance(GAP_ISOMETRY))
    t_grid = np.linspace(-params.t_max, params.t_max, params.t_count)
    membership = verify_membership(bundle, t_grid=t_grid, window=params.window)
    report.metrics["membership_route"] = membership.route
    if all(channel.factor.support == (-1.0, 1.0) for channel in bundle.kernel.channels):
        fourier = verify_membership(bundle, t_grid=t_grid, window=params.window, route="fourier")
        report.metrics["membership_fourier"] = fourier.residual
    report.check("membership", membership.residual, config.tolerance(tolerances.membership))


def _write_csv(report: Report, filename: str, function) -> str:
    write_csv(function, report.path(filename))
    return filename


# scan


class ScanRun(pydantic.BaseModel):
    """Parameters of `scan`; `kernel` replaces the preset"""

    model_config = _params()

    kernel: Optional[KernelDescriptor] = None
    half_strip: bool = False
    q_nodes: Optional[int] = pydantic.Field(default=None, ge=1)
    p_nodes: Optional[int] = pydantic.Field(default=None, ge=2)
    x_nodes: Optional[int] = pydantic.Field(default=None, ge=1)
    window: Optional[tuple[float, float]] = None
    tol: Optional[float] = pydantic.Field(default=None, gt=0)


def _gap_vector(lattice: LatticeConstructionParams):
    """F(q, p) = χ(q) f(pq) for the gap construction of `lattice`, with the
    exact image of the constraint map at the x samples of a channel,

        (T F)(q, x) = χ(q)/|q| ∫_{|r| ≥ |q|} e^{ixr} f(r) conj(φ(q/r)) dr,

    integrated on the support pieces of f"""
    xi = build_xi(build_periodic_h(lattice.nu), build_bump(lattice.delta), lattice.n)
    f = build_f(xi, lattice.a, lattice.x0)
    chi = build_window_chi(lattice.b, lattice.window, lattice.window_power)
    rule = f.quadrature()

    def density(q, p):
        return chi(q) * f(p * q)

    def image(q, x, channel):
        if q == 0.0:
            return np.zeros(np.size(x), dtype=complex)
        keep = np.abs(rule.nodes) >= abs(q)
        r = rule.nodes[keep]
        weighted = rule.weights[keep] * rule.values[keep] * np.conj(channel.factor(q / r))
        return complex(chi(q)) / abs(q) * (np.exp(1j * np.outer(x, r)) @ weighted)

    return density, image


def scan(config: RunConfig, params: ScanRun, report: Report) -> None:
    """Singular-value spectrum of the constraint map.

    The gap preset scans on the uniform p grid of `lab.scan_p_nodes` nodes
    and certifies the explicit gap density with the exact image; the other
    presets use p grids aligned with the x samples unless `p_nodes` is set.
    """
    lab = get_value().lab
    if params.kernel is not None:
        if config.preset is not None:
            raise ConfigInvalidError("pass either --preset or a kernel in the parameters")
        descriptor, half_strip = params.kernel, params.half_strip
    else:
        preset = config.preset or "gap"
        if preset not in SCAN_PRESETS:
            raise ConfigInvalidError(
                f"unknown preset {preset!r}; choose from {', '.join(SCAN_PRESETS)}"
            )
        data, half_strip = SCAN_PRESETS[preset]
        descriptor = KernelDescriptor.model_validate(data)
        report.metrics["preset"] = preset
    preset = report.metrics.get("preset")
    p_nodes = params.p_nodes or (lab.scan_p_nodes if preset == "gap" else None)
    kernel = descriptor.build()
    run = half_strip_scan if half_strip else constraint_scan
    result = run(
        kernel,
        q_nodes=config.scaled(params.q_nodes or lab.scan_q_nodes, minimum=2),
        p_nodes=None if p_nodes is None else config.scaled(p_nodes, minimum=2),
        x_sample=config.scaled(params.x_nodes or lab.scan_x_nodes),
        window=params.window,
    )
    tol = config.tolerance(params.tol or lab.nullspace_tol)
    summary = result.to_report(tol)
    sigma = summary.pop("sigma")
    summary.pop("sigma_relative")
    report.metrics.update(summary)
    report.metrics["sigma_max"] = result.sigma_max
    if result.degenerate:
        raise DegenerateInputError("the constraint map vanishes; there is nothing to scan")
    if preset == "gap":
        density, image = _gap_vector(LatticeConstructionParams())
        report.metrics["gap_vector_residual"] = result.residual(density, image)
        report.metrics["gap_vector_discrete_residual"] = result.residual(density)

    frame = pd.DataFrame(
        {
            "index": np.arange(len(sigma)),
            "sigma": sigma,
            "sigma_relative": np.asarray(sigma) / result.sigma_max,
        }
    )
    csv = [_write_table(report, "sigma.csv", frame)]
    report.artifacts.append(write_plot_stub(config.out, config.command, csv))
    report.check("sigma_max", result.sigma_max, 0.0, relation=">")
    if preset == "gap":
        report.check("nullspace_dim", summary["nullspace_dim"], GAP_NULLSPACE, relation=">=")
        report.check("gap_vector_residual", report.metrics["gap_vector_residual"], tol)
    elif preset is not None:
        # presets whose operator is completely nonselfadjoint
        report.check("sigma_ratio", result.ratio, lab.ratio_threshold, relation=">")
        report.check("nullspace_dim", summary["nullspace_dim"], 0, relation="==")


# oracle


class BlockCase(pydantic.BaseModel):
    """Engineered block operator: random Hermitian blocks with a rank-one K
    acting on the first"""

    model_config = _params()

    coupled: int = pydantic.Field(default=6, ge=1)
    free: int = pydantic.Field(default=4, ge=0)


class OracleRun(pydantic.BaseModel):
    """Parameters of `oracle`"""

    model_config = _params()

    lattice: LatticeConstructionParams = pydantic.Field(default_factory=LatticeConstructionParams)
    x_nodes: Optional[int] = pydantic.Field(default=None, ge=4)
    periods: Optional[int] = pydantic.Field(default=None, ge=1)
    angles: int = pydantic.Field(default=16, ge=2, multiple_of=2)
    controls: int = pydantic.Field(default=3, ge=0)
    block: Optional[BlockCase] = None


def _random_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    matrix = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (matrix + matrix.conj().T) / 2


def _oracle_block(config: RunConfig, block: BlockCase, report: Report) -> None:
    rng = np.random.default_rng(config.require_seed())
    n = block.coupled + block.free
    A = np.zeros((n, n), dtype=complex)
    A[: block.coupled, : block.coupled] = _random_hermitian(rng, block.coupled)
    A[block.coupled :, block.coupled :] = _random_hermitian(rng, block.free)
    v = np.zeros(n, dtype=complex)
    v[: block.coupled] = rng.standard_normal(block.coupled) + 1j * rng.standard_normal(
        block.coupled
    )
    v /= np.linalg.norm(v)
    split = krylov_split(A, np.outer(v, v.conj()))
    report.metrics["split"] = split.summary()
    report.check("dim_h1", split.dim_h1, block.coupled, relation="==")
    report.check("dim_h0", split.dim_h0, block.free, relation="==")
    report.check(
        "split_residual", max(split.residuals.values()), config.tolerance(SPLIT_RESIDUAL)
    )


def _load_manifest(path: str) -> LatticeConstructionParams:
    """Lattice parameters recorded by `construct-gap`"""
    try:
        with open(path, "r") as file:
            manifest = json.load(file)
        params = manifest["params"]
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exception:
        raise ConfigInvalidError(f"cannot read the manifest {path}: {exception}")
    return LatticeConstructionParams.model_validate(params)


def oracle(config: RunConfig, params: OracleRun, report: Report) -> None:
    """Project the gap vector g onto the discrete H₁ of a periodic
    discretization, or recover the split of an engineered block operator"""
    if params.block is not None and config.manifest is None:
        report.metrics["mode"] = "block"
        _oracle_block(config, params.block, report)
        return

    lab = get_value().lab
    lattice = _load_manifest(config.manifest) if config.manifest else params.lattice
    report.metrics["mode"] = "bundle"
    seed = config.require_seed() if params.controls else None
    angles = AngleGrid(params.angles)
    periods = params.periods or lab.oracle_periods
    x_grid = torus_grid(periods * lattice.a, config.scaled(params.x_nodes or lab.oracle_x_nodes, 4))
    bundle = construct_gap_bundle(lattice, angles=angles)
    operator = assemble_discrete(bundle.kernel, x_grid, angles)
    split = krylov_split(operator.A, operator.K)
    result = oracle_compare(resample_strip(bundle.g, x_grid), operator, split)
    report.metrics.update(
        {
            "split": split.summary(),
            "ratio": result.ratio,
            "g_norm": result.g_norm,
            "grid": [x_grid.n, angles.n_angles],
        }
    )
    report.check(
        "oracle_ratio", result.ratio, config.tolerance(get_value().tolerances.oracle_ratio)
    )
    if seed is not None:
        rng = np.random.default_rng(seed)
        ratios = []
        for _ in range(params.controls):
            values = rng.standard_normal((x_grid.n, angles.n_angles)) + 1j * rng.standard_normal(
                (x_grid.n, angles.n_angles)
            )
            control = StripFunction(Representation.POSITION, x_grid, angles, values)
            ratios.append(oracle_compare(control, operator, split).ratio)
        report.metrics["control_ratios"] = ratios
        report.check("control_ratio", min(ratios), CONTROL_RATIO, relation=">=")


# hardy


class CompactCase(pydantic.BaseModel):
    """Compact-support construction on q ∈ I for a coefficient supported in
    `supp_c`"""

    model_config = _params()

    interval: tuple[float, float]
    supp_c: tuple[float, float]
    p_max: Optional[float] = pydantic.Field(default=None, gt=1)
    t_max: float = pydantic.Field(default=2.0, ge=0)
    t_count: int = pydantic.Field(default=5, ge=1)


class HardyRun(pydantic.BaseModel):
    """Parameters of `hardy`"""

    model_config = _params()

    hardy: HardyParams = pydantic.Field(default_factory=HardyParams)
    x_max: Optional[float] = pydantic.Field(default=None, gt=1)
    nodes_per_unit: Optional[int] = pydantic.Field(default=None, ge=1)
    margin: Optional[float] = pydantic.Field(default=None, gt=0)
    doubling: bool = True
    half_planes: bool = True
    hat_reach: float = pydantic.Field(default=4.0, gt=1)
    bundle: Optional[CompactCase] = None


def _hat_table(profile, alpha: float, reach: float) -> pd.DataFrame:
    """f̂_α on the dual grid of the samples, |p| ≤ reach·α"""
    transform = LineTransform(profile.grid)
    p = transform.dual.nodes
    values = transform.forward(profile.values)
    keep = np.abs(p) <= reach * alpha
    return pd.DataFrame(
        {
            "p": p[keep],
            "real": values[keep].real,
            "imag": values[keep].imag,
            "abs": np.abs(values[keep]),
        }
    )


def hardy(config: RunConfig, params: HardyRun, report: Report) -> None:
    """Sample f_α and audit its three properties: zero on (-1, 1), finite
    weighted norm stable under a wider grid, and a transform vanishing on
    [-α, α]. The boundary values are checked against a halved η ladder and
    the half-plane bounds against a refined sample grid."""
    settings = get_value().hardy
    x_max = params.x_max or settings.x_max
    nodes_per_unit = config.scaled(params.nodes_per_unit or settings.nodes_per_unit)
    profile = f_alpha_function(params.hardy, hardy_grid(x_max, nodes_per_unit))
    norm = profile.weighted_norm()
    report.metrics.update(
        {"weighted_norm": norm, "excluded_nodes": profile.excluded, "x_max": x_max}
    )
    report.check(
        "inner_residual",
        profile.inner_residual,
        config.tolerance(settings.convergence_tolerance),
    )
    if not report.check("weighted_norm", norm, 0.0, relation=">"):
        raise DegenerateInputError("f_α vanishes on the grid")
    if params.doubling:
        wide = f_alpha_function(params.hardy, hardy_grid(2 * x_max, nodes_per_unit))
        stability = abs(wide.weighted_norm() - norm) / wide.weighted_norm()
        report.check("norm_stability", stability, config.tolerance(PROPERTY1_STABILITY))

    leakage = verify_hat_vanishes(profile, params.hardy.alpha, params.margin)
    report.metrics["truncation_bound"] = leakage.truncation_bound
    report.check("hat_leakage", leakage.leakage, config.tolerance(HAT_LEAKAGE))
    if leakage.truncation_bound > 0:
        report.check(
            "leakage_to_bound",
            leakage.leakage / leakage.truncation_bound,
            LEAKAGE_TO_BOUND,
            relation="in",
        )

    ladder_points = np.linspace(-LADDER_REACH, LADDER_REACH, LADDER_POINTS)
    report.check(
        "eta_halving",
        ladder_sensitivity(ladder_points, params.hardy),
        config.tolerance(ETA_HALVING),
    )
    if params.half_planes:
        report.metrics["half_plane_sup"] = [
            half_plane_sup(params.hardy, side) for side in (1, -1)
        ]
        report.check(
            "half_plane_stability",
            half_plane_stability(params.hardy),
            config.tolerance(HALF_PLANE_STABILITY),
        )

    csv = [
        _write_csv(report, "f_alpha.csv", profile.line),
        _write_table(
            report, "f_alpha_hat.csv", _hat_table(profile, params.hardy.alpha, params.hat_reach)
        ),
    ]
    if params.bundle is not None:
        case = params.bundle
        bundle = compact_support_bundle(
            case.interval, case.supp_c, params.hardy, profile=profile, p_max=case.p_max
        )
        report.write_json("manifest.json", bundle.manifest())
        membership = verify_bundle_membership(
            bundle, t_grid=np.linspace(-case.t_max, case.t_max, case.t_count)
        )
        report.metrics.update(
            {
                "F_norm": bundle.F_norm,
                "g_norm": bundle.g_norm,
                "angles": bundle.g.angles.n_angles,
                "x_nodes": bundle.g.grid.n,
                "membership_route": membership.route,
            }
        )
        report.check(
            "bundle_membership", membership.residual, config.tolerance(BUNDLE_MEMBERSHIP)
        )
        report.check(
            "bundle_isometry", bundle.isometry_defect, config.tolerance(BUNDLE_ISOMETRY)
        )
    report.artifacts.append(write_plot_stub(config.out, config.command, csv))


# 3d


SPHERE_FACTORS = {
    "isotropic": isotropic_factor,
    "mu_1": component_factor(0),
    "mu_2": component_factor(1),
    "mu_3": component_factor(2),
}


class SphereRun(pydantic.BaseModel):
    """Parameters of `3d`"""

    model_config = _params()

    factors: list[Literal["isotropic", "mu_1", "mu_2", "mu_3"]] = pydantic.Field(
        default_factory=lambda: ["isotropic"], min_length=1
    )
    m: int = 1
    n_theta: Optional[int] = pydantic.Field(default=None, ge=1)
    m_psi: Optional[int] = None
    samples: int = pydantic.Field(default=20, ge=1)
    p_scale: float = pydantic.Field(default=1.0, gt=0)
    t_max: float = pydantic.Field(default=2.0, ge=0)

    @pydantic.model_validator(mode="after")
    def _orders(self) -> "SphereRun":
        if self.m == 0:
            raise ValueError("the azimuthal order m must be nonzero")
        if self.m_psi is not None and (self.m_psi < 16 or self.m_psi & (self.m_psi - 1)):
            raise ValueError(f"m_psi must be a power of two >= 16, got {self.m_psi}")
        return self


def sphere(config: RunConfig, params: SphereRun, report: Report) -> None:
    """Build an azimuthal-null vector at random momenta and check that the
    free evolution never reaches the channels"""
    settings = get_value()
    rng = np.random.default_rng(config.require_seed())
    grid = SphereGrid(
        config.scaled(params.n_theta or settings.sphere.n_theta),
        params.m_psi or settings.sphere.m_psi,
    )
    kernel = SphereKernel(tuple(SPHERE_FACTORS[name] for name in params.factors))
    p = rng.standard_normal((params.samples, 3)) * params.p_scale
    t = rng.uniform(-params.t_max, params.t_max, params.samples)
    u = build_azimuthal_null(kernel, p, params.m, grid)

    report.metrics["grid"] = [grid.n_theta, grid.m_psi]
    report.check(
        "azimuthal_residual",
        azimuthal_residual(u, kernel),
        config.tolerance(settings.tolerances.azimuthal),
    )
    report.check(
        "fourier_nullity",
        verify_fourier_nullity(u, kernel, t.tolist()),
        config.tolerance(settings.tolerances.fourier_null),
    )
    frame = pd.DataFrame(
        {
            "p_norm": u.frames.norm,
            "u_norm": u.norms(),
            "p_x": p[:, 0],
            "p_y": p[:, 1],
            "p_z": p[:, 2],
        }
    ).sort_values("p_norm")
    csv = [_write_table(report, "samples.csv", frame)]
    report.artifacts.append(write_plot_stub(config.out, config.command, csv))


SUITES = {
    "construct-gap": (GapRun, construct_gap),
    "scan": (ScanRun, scan),
    "oracle": (OracleRun, oracle),
    "hardy": (HardyRun, hardy),
    "3d": (SphereRun, sphere),
}
"""Parameter model and suite of every command"""
