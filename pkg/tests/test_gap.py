import math
import unittest

import numpy as np
import pydantic
import scipy.integrate
import scipy.special
from parameterized import parameterized

from selfadjoint.exceptions import (
    ConstructionViolationError,
    InvalidInputError,
    DomainError,
    ParameterError,
    ResolutionError,
)
from selfadjoint.gap import (
    Bump,
    ChiWindow,
    LatticeConstructionParams,
    PeriodicBump,
    assemble_F,
    build_bump,
    build_f,
    build_periodic_h,
    build_window_chi,
    build_xi,
    construct_gap_bundle,
    density_to_subspace,
    independence_check,
    independence_rank,
    lattice_position_grid,
    leakage_convergence,
    position_angle_grid,
    profile_gram,
    verify_condition_i,
    verify_condition_ii,
    verify_membership,
)
from selfadjoint.model.functions import (
    Representation,
    SpectralDensity,
    StripFunction,
    strip_norm,
    weighted_norm,
)
from selfadjoint.model.grids import AngleGrid, Grid1D
from selfadjoint.model.kernel import CollisionKernel, GapLatticeCoefficient

T_GRID = np.linspace(-5.0, 5.0, 21)

# grids for the parameter variants; the canonical bundle uses the configured ones
SMALL_GRIDS = {"position_nodes": 2**15, "band_tolerance": 1e-6}


def canonical_f(n=1, a=1.0, eps=0.25, nu=0.1):
    return build_f(build_xi(build_periodic_h(nu), build_bump(eps / a), n), a)


class ProfileTestCase(unittest.TestCase):
    def test_bump_values(self):
        omega0 = build_bump(0.25)
        self.assertEqual(omega0(0.0), 1.0)
        np.testing.assert_array_equal(omega0([-0.25, 0.25, 0.3]), [0.0, 0.0, 0.0])
        self.assertAlmostEqual(float(omega0(0.125)), math.exp(-1 / 3), places=14)

    def test_bump_derivative(self):
        omega0 = Bump(0.5)
        s, step = np.array([-0.3, -0.1, 0.05, 0.2]), 1e-6
        numeric = (omega0(s + step) - omega0(s - step)) / (2 * step)
        np.testing.assert_allclose(omega0.derivative(s, 1), numeric, atol=1e-6)
        numeric = (omega0.derivative(s + step, 1) - omega0.derivative(s - step, 1)) / (2 * step)
        np.testing.assert_allclose(omega0.derivative(s, 2), numeric, atol=1e-5)

    def test_bump_transform(self):
        omega0 = Bump(0.25)
        mass, _ = scipy.integrate.quad(lambda s: float(omega0(s)), -0.25, 0.25)
        self.assertAlmostEqual(omega0.hat(0.0).real, mass / math.sqrt(2 * math.pi), places=12)

        p = np.array([0.5, 3.0, 20.0])
        for order in (1, 2):
            np.testing.assert_allclose(
                omega0.hat(p, order), (1j * p) ** order * omega0.hat(p), atol=1e-10
            )

    def test_periodic_h(self):
        h = build_periodic_h(0.1)
        self.assertEqual(float(h(0.0)), 0.0)
        self.assertAlmostEqual(float(h(math.pi)), 1.0, places=14)
        self.assertAlmostEqual(float(h(3 * math.pi)), 1.0, places=14)
        self.assertAlmostEqual(float(h(math.pi - 0.05)), math.exp(-1 / 3), places=12)
        self.assertAlmostEqual(h.zero_radius, math.pi - 0.1, places=14)
        self.assertEqual(len(h.pieces(-4.0, 4.0)), 2)

    @parameterized.expand([(Bump, 0.0), (Bump, math.pi), (PeriodicBump, -0.1), (ChiWindow, 0.0)])
    def test_invalid_widths(self, cls, value):
        with self.assertRaises(ParameterError):
            cls(value)

    def test_xi_and_f(self):
        xi = build_xi(build_periodic_h(0.1), build_bump(0.25), 2)
        self.assertEqual(xi(0.0), 0.0)
        f = build_f(xi, 1.0)
        self.assertEqual(complex(f(math.pi)), complex(xi(math.pi)))
        self.assertNotEqual(complex(f(math.pi)), 0.0)

        f = build_f(xi, 2.0)
        p = np.linspace(-(math.pi - 0.1) / 2, (math.pi - 0.1) / 2, 2001)
        self.assertTrue(np.all(f(p) == 0))

        with self.assertRaises(ParameterError):
            build_xi(build_periodic_h(0.1), build_bump(0.25), 0)

    def test_chi(self):
        chi = build_window_chi(3.0)
        self.assertEqual(chi.kind, "indicator")
        np.testing.assert_array_equal(chi([0.0, 1.5, -3.0, 3.5]), [0.0, 1.5, -3.0, 0.0])
        self.assertAlmostEqual(chi.over_q_norm, math.sqrt(6.0))

    @parameterized.expand([(16,), (4,)])
    def test_smooth_chi(self, power):
        chi = build_window_chi(3.0, "smooth", power)
        np.testing.assert_allclose(
            chi([0.0, 1.5, -3.0, 3.5]), [0.0, 1.5 * 0.75**power, 0.0, 0.0], rtol=1e-14
        )
        norm2, _ = scipy.integrate.quad(
            lambda q: (1 - (q / 3.0) ** 2) ** (2 * power), -3.0, 3.0, epsabs=1e-14
        )
        self.assertAlmostEqual(chi.over_q_norm**2 / norm2, 1.0, places=10)
        with self.assertRaises(ParameterError):
            ChiWindow(3.0, "box")

    def test_band(self):
        f = canonical_f()
        rule = f.quadrature()
        mass = rule.weights * np.abs(rule.values) ** 2 * np.abs(rule.nodes)
        for tol in (1e-4, 1e-8):
            band = f.band(tol)
            tail = mass[np.abs(rule.nodes) > band].sum()
            self.assertLessEqual(tail, 2 * tol * mass.sum())
            self.assertGreater(mass[np.abs(rule.nodes) >= band].sum(), 2 * tol * mass.sum())
        self.assertLess(f.band(1e-4), f.band(1e-8))
        self.assertAlmostEqual(build_f(f.xi, 2.0).band(1e-8), f.band(1e-8) / 2, places=9)

    def test_gram(self):
        f = canonical_f()
        gram = profile_gram([f, f.shifted(0.5)])
        self.assertAlmostEqual(gram[0, 0].real, f.weighted_norm() ** 2, places=10)
        self.assertAlmostEqual(gram[0, 0].real, gram[1, 1].real, places=10)
        np.testing.assert_allclose(gram, gram.conj().T)


class ConditionTestCase(unittest.TestCase):
    def test_condition_i(self):
        f = canonical_f()
        self.assertEqual(verify_condition_i(f, 3.0), 0.0)
        self.assertGreater(verify_condition_i(f, math.pi), 0.0)
        self.assertEqual(verify_condition_i(lambda p: np.zeros_like(p), 3.0), 0.0)

    @parameterized.expand([(1,), (2,), (3,)])
    def test_canonical_leakage(self, n):
        leakage = verify_condition_ii(canonical_f(n), n, 1.0, 0.25)
        self.assertEqual(len(leakage), n)
        self.assertLess(max(leakage), 1e-6)

    def test_leakage_of_modulated_profile(self):
        f = canonical_f(2)
        np.testing.assert_allclose(
            verify_condition_ii(f.shifted(0.3), 2, 1.0, 0.25),
            verify_condition_ii(f, 2, 1.0, 0.25),
        )

    def test_leakage_against_finer_lattice(self):
        f = canonical_f(2)
        leakage = verify_condition_ii(f, 2, 1.0, 0.25)
        oracle = verify_condition_ii(f, 2, 1.0, 0.25, nodes_per_cell=4 * 2048)
        self.assertLess(max(leakage), 1e-6)
        self.assertLess(max(oracle), 1e-6)
        np.testing.assert_allclose(leakage, oracle, atol=1e-6)

    @parameterized.expand([(1,), (2,)])
    def test_convergence_order(self, n):
        leakage, orders = leakage_convergence(canonical_f(n), n, 1.0, 0.25)
        self.assertEqual(leakage.shape, (3, n))
        self.assertTrue(np.all(np.diff(leakage.max(axis=1)) < 0))
        self.assertGreaterEqual(float(orders.min()), 2.0)

    def test_coarse_lattice_is_unresolved(self):
        with self.assertRaises(ResolutionError):
            verify_condition_ii(canonical_f(), 1, 1.0, 0.25, cells=16, nodes_per_cell=16)
        with self.assertRaises(ParameterError):
            leakage_convergence(canonical_f(), 1, 1.0, 0.25, levels=(64, 32))

    def test_gaussian_leaks(self):
        leakage = verify_condition_ii(
            lambda p: np.exp(-np.asarray(p) ** 2 / 2), 1, 1.0, 0.25, cells=16, nodes_per_cell=64
        )
        self.assertGreater(leakage[0], 0.5)

    def test_zero_has_no_leakage(self):
        leakage = verify_condition_ii(
            lambda p: np.zeros_like(p), 2, 1.0, 0.25, cells=16, nodes_per_cell=64
        )
        self.assertEqual(leakage, [0.0, 0.0])

    def test_singular_powers(self):
        with self.assertRaises(DomainError):
            verify_condition_ii(
                lambda p: np.exp(-np.asarray(p) ** 2 / 2), 2, 1.0, 0.25, cells=16, nodes_per_cell=64
            )

    def test_odd_cells(self):
        with self.assertRaises(ParameterError):
            verify_condition_ii(canonical_f(), 1, 1.0, 0.25, cells=15)


class IndependenceTestCase(unittest.TestCase):
    def test_single(self):
        self.assertTrue(independence_check([build_periodic_h(0.1)], [build_window_chi(3.0)]))

    def test_engineered_cancellation(self):
        h1, chi1 = build_periodic_h(0.1), build_window_chi(3.0)
        self.assertFalse(
            independence_check(
                [h1, lambda p: 2 * h1(p)],
                [chi1, lambda q: -chi1(q) / 2],
            )
        )

    def test_translates(self):
        rng = np.random.default_rng(7)
        h_list = [PeriodicBump(0.1, center) for center in (math.pi, math.pi / 2, -math.pi / 2)]
        chi_list = []
        for c0, c1 in rng.normal(size=(3, 2)):
            chi_list.append(lambda q, c0=c0, c1=c1: (c0 + c1 * q) * (np.abs(q) <= 3.0))
        self.assertEqual(independence_rank(h_list, chi_list, tol=1e-8), 3)
        self.assertTrue(independence_check(h_list, chi_list))

    def test_unpaired(self):
        with self.assertRaises(ParameterError):
            independence_rank([build_periodic_h(0.1)], [])


class ParamsTestCase(unittest.TestCase):
    def test_defaults(self):
        params = LatticeConstructionParams()
        self.assertEqual((params.a, params.eps, params.b, params.nu, params.n), (1.0, 0.25, 3.0, 0.1, 1))
        self.assertEqual(params.delta, 0.25)
        self.assertEqual(params.p_cutoff, 64.0)
        self.assertEqual(params.window, "smooth")
        self.assertIsNone(params.position_nodes)

    @parameterized.expand(
        [
            ({"eps": 0.5},),
            ({"b": math.pi},),
            ({"nu": 0.2},),
            ({"n": 0},),
            ({"position_angles": 7},),
            ({"position_angles": 30, "position_panels": 4},),
            ({"position_nodes": 8},),
            ({"window": "box"},),
            ({"color": "red"},),
        ]
    )
    def test_hypotheses(self, data):
        with self.assertRaises(pydantic.ValidationError):
            LatticeConstructionParams(**data)

    def test_injected_pieces(self):
        params = LatticeConstructionParams()
        with self.assertRaises(ParameterError):
            construct_gap_bundle(params, omega0=Bump(0.3))
        with self.assertRaises(ParameterError):
            construct_gap_bundle(params, h=PeriodicBump(0.1, 2.0))
        with self.assertRaises(ParameterError):
            construct_gap_bundle(
                params,
                kernel=CollisionKernel.single(GapLatticeCoefficient(0.0, 1.0, 0.25), (0.0, 1.0)),
            )


class DensityTestCase(unittest.TestCase):
    def test_assemble_vanishes_inside(self):
        F = assemble_F(build_window_chi(3.0), canonical_f(), Grid1D(-3.0, 3.0, 13), Grid1D(-2.0, 2.0, 41))
        inner = np.abs(F.p_grid.nodes) < 1.0
        self.assertEqual(np.abs(F.values[:, inner]).max(), 0.0)
        self.assertEqual(np.abs(F.values[F.q_grid.index_of(0.0)]).max(), 0.0)

    def test_assemble_violation(self):
        with self.assertRaises(ConstructionViolationError):
            assemble_F(
                build_window_chi(3.5), canonical_f(), Grid1D(-3.5, 3.5, 15), Grid1D(-1.0, 1.0, 21)
            )

    def test_norm_substitution(self):
        # F = e^{-q²} p^{-3} gives u = μ e^{-q²}
        q_grid = Grid1D(-4.0, 4.0, 81)
        F = SpectralDensity.sample(
            lambda q, p: np.exp(-(q**2)) / p**3, q_grid, Grid1D.spectral(4.0, 4)
        )
        u, g = density_to_subspace(F, AngleGrid(4))
        self.assertEqual(u.rep, Representation.SPECTRAL)
        self.assertEqual(g.rep, Representation.POSITION)
        p_integral, _ = scipy.integrate.quad(lambda p: 2 * p**-5, 1.0, math.inf)
        expected = math.sqrt(float(q_grid.weights @ np.exp(-2 * q_grid.nodes**2)) * p_integral)
        self.assertAlmostEqual(strip_norm(u, "abs_mu"), expected, places=10)

    def test_zero_density(self):
        F = SpectralDensity.sample(
            lambda q, p: np.zeros_like(q), Grid1D(-2.0, 2.0, 21), Grid1D.spectral(2.0, 4)
        )
        u, g = density_to_subspace(F, AngleGrid(4))
        self.assertEqual(strip_norm(u), 0.0)
        self.assertEqual(strip_norm(g), 0.0)


class PositionGridTestCase(unittest.TestCase):
    def test_lattice_grid(self):
        grid = lattice_position_grid(600.0, 1.0, 2**18)
        self.assertTrue(grid.periodic)
        self.assertEqual(grid.n, 2**18)
        cells = grid.period / 1.0
        self.assertAlmostEqual(cells, round(cells), places=6)
        self.assertLessEqual(600.0, math.pi / grid.spacing)
        # one more lattice period would push the Nyquist band below 600
        self.assertGreater(600.0, math.pi * 2**18 / (round(cells) + 1))

    def test_lattice_grid_errors(self):
        with self.assertRaises(ResolutionError):
            lattice_position_grid(600.0, 1.0, 64)
        with self.assertRaises(InvalidInputError):
            lattice_position_grid(0.0, 1.0, 64)

    def test_angle_grid(self):
        angles = position_angle_grid()
        self.assertEqual(angles.n_angles, 160)
        self.assertEqual(angles.kind, "graded")
        self.assertEqual(position_angle_grid(16, 2).panel_edges.tolist(), [-1.0, -0.5, 0.0, 0.5, 1.0])
        with self.assertRaises(DomainError):
            position_angle_grid(30, 4)


class MembershipTestCase(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.bundle = construct_gap_bundle(LatticeConstructionParams())

    def test_bundle(self):
        bundle = self.bundle
        self.assertGreater(weighted_norm(bundle.F), 0.0)
        self.assertGreater(bundle.F_norm, 0.0)
        self.assertGreater(bundle.g_norm, 1e-6)
        self.assertLess(max(bundle.leakage), 1e-6)
        self.assertTrue(bundle.g.grid.periodic)
        manifest = bundle.manifest()
        self.assertEqual(manifest["params"]["a"], 1.0)
        self.assertEqual(manifest["angles"], 160)
        self.assertEqual(manifest["angle_panels"], 20)
        self.assertEqual(manifest["window"], "smooth")
        self.assertEqual(manifest["x_nodes"], 2**18)
        self.assertAlmostEqual(manifest["x_period"], round(manifest["x_period"]), places=6)

    def test_isometry(self):
        # ‖g‖ from the samples of g against ∫|χ/q|² · ∫|f|²|r| in closed form
        self.assertAlmostEqual(self.bundle.g_norm, strip_norm(self.bundle.g), places=14)
        self.assertLess(self.bundle.isometry_defect, 1e-7)
        self.assertLess(self.bundle.manifest()["isometry_defect"], 1e-7)

    def test_membership(self):
        report = verify_membership(self.bundle, t_grid=T_GRID)
        self.assertEqual(report.route, "direct")
        self.assertEqual(report.pairings[0].shape, (3, 21))
        self.assertLess(report.residual, 1e-5)
        self.assertTrue(report.passes())

        samples = verify_membership(self.bundle.g, self.bundle.kernel, t_grid=T_GRID)
        self.assertEqual(samples.residual, report.residual)

    def test_fourier_cross_check(self):
        report = verify_membership(self.bundle, t_grid=T_GRID, route="fourier")
        self.assertEqual(report.route, "fourier")
        self.assertLess(report.residual, 1e-8)
        with self.assertRaises(InvalidInputError):
            verify_membership(self.bundle.g, self.bundle.kernel, route="fourier")

    def test_indicator_window_misses(self):
        # the jump of the indicator window at |μ| = b/|s| spoils the angle rule
        params = LatticeConstructionParams(window="indicator", **SMALL_GRIDS)
        bundle = construct_gap_bundle(params)
        self.assertEqual(bundle.chi.kind, "indicator")
        self.assertAlmostEqual(bundle.chi.over_q_norm, math.sqrt(6.0))
        report = verify_membership(bundle, t_grid=T_GRID)
        self.assertGreater(report.residual, 1e-5)

    def test_gaussian_control(self):
        gaussian = StripFunction.sample(
            lambda x, mu: np.exp(-(x**2) / 2) + 0 * mu,
            Representation.POSITION,
            Grid1D(-20.0, 20.0, 801),
            AngleGrid(8),
        )
        report = verify_membership(gaussian, self.bundle.kernel)
        self.assertEqual(report.route, "direct")
        self.assertGreater(report.residual, 0.1)
        self.assertFalse(report.passes())

        with self.assertRaises(DomainError):
            verify_membership(gaussian, self.bundle.kernel, t_grid=[20.0])
        with self.assertRaises(InvalidInputError):
            verify_membership(gaussian)

    def test_zero_vector(self):
        zero = StripFunction.sample(
            lambda x, mu: 0 * x * mu, Representation.POSITION, Grid1D(-20.0, 20.0, 201), AngleGrid(4)
        )
        report = verify_membership(zero, self.bundle.kernel, t_grid=[0.0, 1.0])
        self.assertEqual(report.residual, 0.0)


class ConstructionTestCase(unittest.TestCase):
    @parameterized.expand(
        [
            ("n2_linear", {"n": 2}, (0.0, 1.0)),
            ("n3_quadratic", {"n": 3}, (0.5, 0.0, -1.0)),
            ("scaled", {"a": 2.0, "eps": 0.5, "b": 1.5}, (1.0,)),
            ("shifted", {"x0": 0.4}, (1.0,)),
        ]
    )
    def test_membership(self, _, overrides, factor):
        params = LatticeConstructionParams(**overrides, **SMALL_GRIDS)
        kernel = CollisionKernel.single(
            GapLatticeCoefficient(params.x0, params.a, params.eps), factor
        )
        bundle = construct_gap_bundle(params, kernel=kernel)
        self.assertGreater(bundle.g_norm, 1e-6)
        self.assertLess(bundle.isometry_defect, 1e-2)
        report = verify_membership(bundle, t_grid=T_GRID)
        self.assertEqual(report.route, "direct")
        self.assertLess(report.residual, 1e-5)

    def test_shift_translates_g(self):
        base = construct_gap_bundle(LatticeConstructionParams(**SMALL_GRIDS))
        step = base.g.grid.spacing
        nodes = int(round(0.5 / step))
        shifted = construct_gap_bundle(
            LatticeConstructionParams(x0=nodes * step, **SMALL_GRIDS), x_grid=base.g.grid
        )
        expected = np.roll(base.g.values, nodes, axis=0)
        np.testing.assert_allclose(
            shifted.g.values, expected, atol=1e-10 * np.abs(expected).max()
        )

    def test_scaling_covariance(self):
        # a → λa, ε → λε, b → b/λ maps g(x, μ) to g(x/λ, μ)/λ²
        scale = 2.0
        base = construct_gap_bundle(LatticeConstructionParams(**SMALL_GRIDS))
        grid = base.g.grid
        scaled_grid = Grid1D.centered(scale * grid.spacing, grid.n, periodic=True)
        scaled = construct_gap_bundle(
            LatticeConstructionParams(a=scale, eps=0.25 * scale, b=3.0 / scale, **SMALL_GRIDS),
            x_grid=scaled_grid,
        )
        np.testing.assert_allclose(
            scale**2 * scaled.g.values, base.g.values, atol=1e-9 * np.abs(base.g.values).max()
        )
        self.assertAlmostEqual(scaled.g_norm / base.g_norm, scale**-1.5, places=9)
        self.assertAlmostEqual(scaled.F_norm / base.F_norm, scale**-1.5, places=9)

        residuals = [verify_membership(bundle, t_grid=T_GRID).residual for bundle in (base, scaled)]
        self.assertLess(max(residuals), 1e-5)
        self.assertLess(abs(residuals[0] - residuals[1]), 1e-6)
