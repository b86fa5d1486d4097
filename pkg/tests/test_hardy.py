import math
import unittest

import numpy as np
import pydantic
import pytest
from parameterized import parameterized

from selfadjoint.exceptions import (
    BoundaryConvergenceError,
    CutEvaluationError,
    DomainError,
    InvalidInputError,
    ParameterError,
    ResolutionError,
)
from selfadjoint.hardy import (
    HardyParams,
    boundary_values,
    bundle_angle_grid,
    bundle_gram,
    bundle_x_grid,
    compact_support_bundle,
    f_alpha_function,
    gram_rank,
    half_plane_modulus,
    half_plane_stability,
    half_plane_sup,
    hardy_grid,
    ladder_sensitivity,
    phi_alpha,
    required_alpha,
    rho_factor,
    sqrt_branch,
    verify_bundle_membership,
    verify_hat_vanishes,
)
from selfadjoint.model.functions import LineFunction
from selfadjoint.model.grids import Grid1D
from selfadjoint.model.kernel import CollisionKernel, IntervalCoefficient

SMALL_GRID = dict(x_max=200.0, nodes_per_unit=10)


class BranchTestCase(unittest.TestCase):
    def test_values(self):
        w = sqrt_branch(1j)
        self.assertGreater(w.imag, 0.0)
        self.assertAlmostEqual(abs(w), 1.0, places=14)
        self.assertAlmostEqual(sqrt_branch(0.0), 1j, places=14)
        self.assertLess(abs(sqrt_branch(1e4j) - 1.0), 1e-3)

    def test_continuity(self):
        path = 0.5 * np.exp(1j * np.linspace(0.01, math.pi - 0.01, 1000)) + 0.2j
        w = sqrt_branch(path)
        self.assertTrue(np.all(w.imag > 0))
        self.assertLess(np.abs(np.diff(w)).max(), 1e-2)

    @parameterized.expand([(2.0,), (1.0,), (-1.0,), (-7.5,)])
    def test_cut(self, x):
        with self.assertRaises(CutEvaluationError):
            sqrt_branch(x)


class RhoTestCase(unittest.TestCase):
    def test_at_zero(self):
        self.assertAlmostEqual(rho_factor(0.0, HardyParams()), math.log(1.5) ** 2, places=14)
        self.assertAlmostEqual(abs(rho_factor(0.0, HardyParams(n=2))), 0.0, places=14)

    @parameterized.expand([(1,), (2,), (3,)])
    def test_decay(self, n):
        z = np.logspace(3, 5, 3) * np.exp(0.3j)
        slope = np.polyfit(np.log(np.abs(z)), np.log(np.abs(rho_factor(z, HardyParams(n=n)))), 1)[0]
        self.assertAlmostEqual(slope, -2.0, delta=0.01)

    def test_cut(self):
        with self.assertRaises(CutEvaluationError):
            rho_factor(-2.5, HardyParams())
        self.assertNotEqual(rho_factor(-2.5 + 1e-3j, HardyParams()), 0.0)

    @parameterized.expand(
        [
            ({"rho_a": 2.0, "rho_b": 3.0},),
            ({"rho_b": 1.0},),
            ({"alpha": 0.0},),
            ({"eta_ladder": [1e-4, 2e-4]},),
            ({"eta_ladder": [1e-4]},),
            ({"beta": 1.0},),
        ]
    )
    def test_invalid_params(self, data):
        with self.assertRaises(pydantic.ValidationError):
            HardyParams(**data)


class PhiTestCase(unittest.TestCase):
    def test_modulus_on_the_gap(self):
        params = HardyParams()
        z = np.linspace(-0.99, 0.99, 199) + 1e-9j
        ratio = np.abs(phi_alpha(z, params) / rho_factor(z, params))
        self.assertLessEqual(ratio.max(), 1.0 + 1e-10)

    @parameterized.expand([(1,), (-1,)])
    def test_half_planes(self, side):
        y = np.logspace(1, 4, 31)
        modulus = half_plane_modulus(side * 1j * y, HardyParams())
        self.assertTrue(np.all(np.isfinite(modulus)))
        self.assertLess(modulus.max(), 1.0)
        np.testing.assert_allclose(
            modulus, half_plane_modulus(side * 1j * y, HardyParams(), side=side)
        )


class BoundaryTestCase(unittest.TestCase):
    def test_gap_has_no_jump(self):
        pair = boundary_values([-0.5, 0.0, 0.5], HardyParams())
        np.testing.assert_allclose(pair.f_plus, pair.f_minus, rtol=1e-6)
        np.testing.assert_array_equal(pair.f_diff, np.zeros(3))
        self.assertLess(pair.certificate, 1e-8)

    @parameterized.expand([(2.0,), (-2.01,), (-5.0,)])
    def test_jump(self, x):
        pair = boundary_values(x, HardyParams())
        self.assertGreater(abs(pair.f_diff[0]), 0.0)
        self.assertEqual(pair.f_diff[0], pair.f_plus[0] - pair.f_minus[0])

    @parameterized.expand([(1.0005,), (-2.0002,), (-3.0,)])
    def test_guard_band(self, x):
        with self.assertRaises(DomainError):
            boundary_values(x, HardyParams())

    def test_convergence_error(self):
        with self.assertRaises(BoundaryConvergenceError) as context:
            boundary_values([2.0], HardyParams(), tol=1e-300)
        self.assertEqual(len(context.exception.ratios), 2)


class FAlphaTestCase(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.params = HardyParams()
        cls.profile = f_alpha_function(cls.params, hardy_grid(**SMALL_GRID))

    def test_grid(self):
        grid = hardy_grid(**SMALL_GRID)
        self.assertEqual((grid.lo, grid.hi, grid.n), (-200.0, 200.0, 4001))

    def test_properties(self):
        profile = self.profile
        x = profile.grid.nodes
        self.assertLess(profile.inner_residual, 1e-8)
        self.assertTrue(np.all(profile.values[np.abs(x) < 1.0] == 0))
        self.assertLessEqual(profile.excluded, 4)
        self.assertGreater(profile.weighted_norm(), 0.0)
        self.assertEqual(complex(profile(x[2500])), complex(profile.values[2500]))
        self.assertEqual(complex(profile(500.0)), 0.0)

    def test_wider_grid(self):
        wide = f_alpha_function(self.params, hardy_grid(400.0, 10))
        change = abs(wide.weighted_norm() - self.profile.weighted_norm()) / wide.weighted_norm()
        self.assertLess(change, 0.05)

    def test_hat_leakage(self):
        full = verify_hat_vanishes(self.profile, 2.0)
        self.assertEqual(full.margin, 0.1)
        self.assertTrue(0.0 <= full.leakage <= 1.0)
        self.assertGreater(full.truncation_bound, 0.0)

        smaller = verify_hat_vanishes(self.profile, 1.0, margin=0.1)
        self.assertLessEqual(smaller.leakage, full.leakage)

        with self.assertRaises(DomainError):
            verify_hat_vanishes(self.profile, 1.0, margin=1.0)

    def test_gaussian_control(self):
        grid = Grid1D(-20.0, 20.0, 801)
        gaussian = LineFunction.sample(lambda x: np.exp(-(x**2) / 2) + 0j, grid)
        self.assertGreater(verify_hat_vanishes(gaussian, 2.0).leakage, 0.5)


class CompactBundleTestCase(unittest.TestCase):
    # a cutoff of 16 with a quarter of the default x nodes keeps the default box
    P_MAX = 16.0
    X_NODES = 2048

    @classmethod
    def setUpClass(cls):
        cls.params = [HardyParams(alpha=2.5), HardyParams(alpha=2.5, rho_a=5.0, rho_b=4.0)]
        cls.profiles = [f_alpha_function(p, hardy_grid(**SMALL_GRID)) for p in cls.params]
        cls.angles = bundle_angle_grid(cls.params, cls.P_MAX)
        cls.x_grid = bundle_x_grid((1.0, 2.0), cls.P_MAX, cls.X_NODES)
        cls.bundles = [cls.bundle(index) for index in range(2)]

    @classmethod
    def bundle(cls, index, **kwargs):
        kwargs.setdefault("angles", cls.angles)
        kwargs.setdefault("x_grid", cls.x_grid)
        return compact_support_bundle(
            (1.0, 2.0),
            (-1.0, 1.0),
            cls.params[index],
            profile=cls.profiles[index],
            p_max=cls.P_MAX,
            **kwargs,
        )

    def test_required_alpha(self):
        self.assertAlmostEqual(required_alpha([1.0, 2.0], [-1.0, 1.0]), 2.2)
        with self.assertRaises(InvalidInputError):
            required_alpha([1.0, math.inf], [-1.0, 1.0])

    def test_alpha_margin(self):
        with self.assertRaises(ParameterError):
            compact_support_bundle((1.0, 2.0), (-1.0, 1.0), HardyParams(alpha=2.0))

    def test_mismatched_pieces(self):
        with self.assertRaises(InvalidInputError):
            compact_support_bundle(
                (1.0, 2.0), (-1.0, 1.0), self.params[1], profile=self.profiles[0]
            )
        with self.assertRaises(ParameterError):
            self.bundle(
                0,
                kernel=CollisionKernel.single(IntervalCoefficient(-1.0, 1.0), (0.0, 1.0)),
            )
        with self.assertRaises(InvalidInputError):
            short = f_alpha_function(self.params[0], hardy_grid(10.0, 10))
            compact_support_bundle(
                (1.0, 2.0), (-1.0, 1.0), self.params[0], profile=short, p_max=self.P_MAX
            )

    def test_angle_grid(self):
        edges = self.angles.panel_edges
        for mu in (-1.0, -1.0 / self.P_MAX, 0.0, 1.0 / self.P_MAX, 1.0):
            self.assertIn(mu, edges)
        # panels close in on the ends of both cuts up to the guard
        for s in (-2.0, -3.0, -4.0, -5.0):
            for end in (s - 1e-6, s + 1e-6):
                self.assertLess(np.abs(edges - 1.0 / end).min(), 1e-12)
        single = bundle_angle_grid(self.params[0], self.P_MAX)
        self.assertFalse(np.any(single.panel_edges == -0.5))
        self.assertTrue(np.all(np.diff(edges) > 0))
        self.assertFalse(np.any(self.angles.nodes == 0.0))
        self.assertEqual(self.angles.n_angles % 6, 0)

        self.assertLess(single.n_angles, self.angles.n_angles)
        with self.assertRaises(ParameterError):
            bundle_angle_grid(self.params[0], 1.0)

    def test_x_grid(self):
        grid = self.x_grid
        self.assertEqual(grid.n, self.X_NODES)
        self.assertAlmostEqual(grid.spacing, math.pi / (1.1 * 2.0 * self.P_MAX))
        self.assertAlmostEqual(grid.period, bundle_x_grid((1.0, 2.0), 64.0, 8192).period)

    def test_resolution(self):
        with self.assertRaises(ResolutionError) as context:
            self.bundle(0, x_grid=Grid1D.centered(0.5, 256, periodic=True))
        self.assertGreater(context.exception.needed, 256)

    def test_bundle(self):
        bundle = self.bundles[0]
        self.assertEqual(bundle.width, 1.0)
        self.assertEqual(bundle.p_max, self.P_MAX)
        np.testing.assert_array_equal(bundle.density([0.5, 2.5], [3.0, 3.0]), [0.0, 0.0])
        np.testing.assert_array_equal(bundle.density([1.5], [20.0]), [0.0])
        # nothing beyond the cutoff
        mu = bundle.g.angles.nodes
        self.assertTrue(np.all(bundle.amplitude[np.abs(mu) < 1.0 / self.P_MAX] == 0.0))
        manifest = bundle.manifest()
        self.assertEqual(manifest["interval"], [1.0, 2.0])
        self.assertEqual(manifest["p_max"], self.P_MAX)
        self.assertEqual(manifest["angles"], self.angles.n_angles)

    def test_isometry(self):
        for bundle in self.bundles:
            self.assertGreater(bundle.F_norm, 0.0)
            self.assertLess(bundle.isometry_defect, 1e-2)
            # sampled f_α against exact values on the angle panels
            self.assertAlmostEqual(bundle.profile_norm / bundle.F_norm, 1.0, delta=0.1)

    def test_membership(self):
        report = verify_bundle_membership(self.bundles[0], t_grid=np.linspace(-2.0, 2.0, 5))
        self.assertEqual(report.route, "direct")
        self.assertEqual(report.pairings[0].shape[1], 5)
        self.assertLess(report.residual, 1e-2)
        with self.assertRaises(DomainError):
            verify_bundle_membership(self.bundles[0], t_grid=[self.x_grid.period])

    def test_gram_rank(self):
        gram = bundle_gram(self.bundles)
        np.testing.assert_allclose(gram, gram.conj().T)
        np.testing.assert_allclose(
            np.diag(gram).real, [b.g_norm**2 for b in self.bundles], rtol=1e-10
        )
        self.assertEqual(gram_rank(gram), 2)
        self.assertEqual(gram_rank(np.ones((2, 2))), 1)
        self.assertEqual(gram_rank(np.zeros((2, 2))), 0)
        with self.assertRaises(InvalidInputError):
            bundle_gram([])
        with self.assertRaises(InvalidInputError):
            other = self.bundle(1, angles=bundle_angle_grid(self.params[1], self.P_MAX))
            bundle_gram([self.bundles[0], other])

    @pytest.mark.slow
    def test_default_cutoff(self):
        bundle = compact_support_bundle(
            (1.0, 2.0), (-1.0, 1.0), self.params[0], profile=self.profiles[0]
        )
        self.assertEqual(bundle.p_max, 64.0)
        self.assertEqual(bundle.g.grid.n, 8192)
        self.assertLess(bundle.isometry_defect, 1e-2)
        report = verify_bundle_membership(bundle, t_grid=np.linspace(-2.0, 2.0, 5))
        self.assertLess(report.residual, 1e-3)


class StabilityTestCase(unittest.TestCase):
    def test_ladder_halving(self):
        x = np.concatenate([np.linspace(-8.0, -1.05, 40), np.linspace(1.05, 8.0, 40)])
        self.assertLess(ladder_sensitivity(x, HardyParams()), 1e-7)
        # points in guard bands are skipped
        self.assertLess(ladder_sensitivity([1.0, 2.0], HardyParams()), 1e-7)

    def test_half_plane_sup(self):
        params = HardyParams()
        for side in (1, -1):
            sup = half_plane_sup(params, side)
            self.assertTrue(math.isfinite(sup))
            self.assertGreater(sup, 0.0)
            corner = half_plane_modulus(np.array([side * 0.05j]), params, side=side)
            self.assertLessEqual(float(corner[0]), sup)

    def test_half_plane_stability(self):
        self.assertLess(half_plane_stability(HardyParams()), 0.05)


@pytest.mark.slow
class CanonicalLeakageTestCase(unittest.TestCase):
    def test_leakage(self):
        leakage = verify_hat_vanishes(f_alpha_function(HardyParams()), 2.0)
        self.assertLess(leakage.leakage, 1e-3)
        self.assertGreater(leakage.truncation_bound, 0.0)
        self.assertGreaterEqual(leakage.leakage / leakage.truncation_bound, 0.01)
        self.assertLessEqual(leakage.leakage / leakage.truncation_bound, 10.0)
