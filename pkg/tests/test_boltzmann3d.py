import math
import unittest

import numpy as np
from parameterized import parameterized

from selfadjoint.boltzmann3d import (
    SphereGrid,
    SphereKernel,
    azimuthal_residual,
    build_azimuthal_null,
    component_factor,
    isotropic_factor,
    rotation_matrix,
    sample_on_sphere,
    spherical_frame,
    verify_fourier_nullity,
)
from selfadjoint.exceptions import (
    ConstructionViolationError,
    DomainError,
    InvalidInputError,
    ResolutionError,
)

GRID = SphereGrid(32, 16)
COMPONENTS = tuple(component_factor(axis) for axis in range(3))


def momenta(count=6, seed=3):
    return np.random.default_rng(seed).standard_normal((count, 3))


class SphereGridTestCase(unittest.TestCase):
    def test_weights(self):
        self.assertAlmostEqual(float(GRID.weights.sum()), 4 * math.pi, places=12)
        self.assertAlmostEqual(GRID.psi_weight, math.pi / 8)
        self.assertEqual(GRID.weights.shape, (32, 16))

    @parameterized.expand([(0, 16), (8, 24), (8, 8)])
    def test_invalid(self, n_theta, m_psi):
        with self.assertRaises(InvalidInputError):
            SphereGrid(n_theta, m_psi)

    def test_from_config(self):
        grid = SphereGrid.from_config()
        self.assertEqual((grid.n_theta, grid.m_psi), (64, 32))


class FrameTestCase(unittest.TestCase):
    def test_orthonormal(self):
        frames = spherical_frame(momenta(50))
        self.assertLess(frames.residual(), 1e-12)
        mu = frames.directions(GRID)
        self.assertEqual(mu.shape, (50, 32, 16, 3))
        np.testing.assert_allclose(np.linalg.norm(mu, axis=-1), 1.0, atol=1e-12)
        # ⟨p̂, μ⟩ = cos θ
        projection = np.einsum("nijk,nk->nij", mu, frames.e3)
        np.testing.assert_allclose(
            projection, np.broadcast_to(GRID.cos_theta[None, :, None], projection.shape), atol=1e-12
        )

    def test_fallback_on_the_axis(self):
        frames = spherical_frame([0.0, 0.0, 2.0])
        np.testing.assert_allclose(frames.e1[0], [1.0, 0.0, 0.0])
        np.testing.assert_allclose(frames.e3[0], [0.0, 0.0, 1.0])
        self.assertLess(frames.residual(), 1e-14)

        frames = spherical_frame([[1.0, 0.0, 0.0]], reference=np.array([1.0, 0.0, 0.0]))
        self.assertLess(frames.residual(), 1e-14)

    def test_errors(self):
        with self.assertRaises(DomainError):
            spherical_frame([[0.0, 0.0, 0.0]])
        with self.assertRaises(InvalidInputError):
            spherical_frame([1.0, 2.0])

    def test_rotation(self):
        rotation = rotation_matrix([0.0, 0.0, 1.0], math.pi / 2)
        np.testing.assert_allclose(rotation @ [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], atol=1e-15)
        rotation = rotation_matrix([1.0, 2.0, 2.0], 0.7)
        np.testing.assert_allclose(rotation @ rotation.T, np.eye(3), atol=1e-14)
        self.assertAlmostEqual(np.linalg.det(rotation), 1.0, places=14)


class NullityTestCase(unittest.TestCase):
    def test_isotropic(self):
        kernel = SphereKernel.isotropic()
        u = build_azimuthal_null(kernel, momenta(), 1, GRID)
        self.assertLess(azimuthal_residual(u, kernel), 1e-10)
        self.assertLess(verify_fourier_nullity(u, kernel, np.linspace(-2.0, 2.0, 9)), 1e-8)
        self.assertTrue(np.all(u.norms() > 0))

    def test_constant_profile(self):
        # ∫ e^{it|p|cos θ} dS = 4π sin(t|p|)/(t|p|)
        u = sample_on_sphere(lambda p, mu: np.ones(mu.shape[:-1]), [[0.0, 0.0, 1.0]], GRID)
        ratio = verify_fourier_nullity(u, SphereKernel.isotropic(), [1.0])
        self.assertAlmostEqual(ratio, math.sin(1.0), places=10)
        self.assertAlmostEqual(verify_fourier_nullity(u, SphereKernel.isotropic(), [0.0]), 1.0, places=12)

    def test_components_at_order_two(self):
        kernel = SphereKernel((isotropic_factor,) + COMPONENTS)
        u = build_azimuthal_null(kernel, momenta(), 2, GRID)
        self.assertLess(azimuthal_residual(u, kernel), 1e-10)
        self.assertLess(verify_fourier_nullity(u, kernel, [0.5, 1.0, 2.0]), 1e-8)

        untouched = build_azimuthal_null(SphereKernel.isotropic(), momenta(), 2, GRID)
        np.testing.assert_allclose(u.values, untouched.values, atol=1e-12)

    def test_components_absorb_order_one(self):
        kernel = SphereKernel((isotropic_factor,) + COMPONENTS)
        with self.assertRaises(ConstructionViolationError):
            build_azimuthal_null(kernel, momenta(), 1, GRID)

    def test_two_channels(self):
        kernel = SphereKernel((isotropic_factor, COMPONENTS[2]))
        u = build_azimuthal_null(kernel, momenta(), 1, GRID)
        self.assertGreater(float(u.norms().min()), 0.0)
        self.assertLess(azimuthal_residual(u, kernel), 1e-10)
        self.assertLess(verify_fourier_nullity(u, kernel, [-1.0, 1.5]), 1e-8)

    def test_rotation_covariance(self):
        p = momenta()
        rotated = p @ rotation_matrix([1.0, -1.0, 0.5], 1.1).T
        kernel = SphereKernel.isotropic()
        u = build_azimuthal_null(kernel, p, 1, GRID)
        v = build_azimuthal_null(kernel, rotated, 1, GRID)
        np.testing.assert_allclose(u.norms(), v.norms(), rtol=1e-12)
        np.testing.assert_allclose(u.frames.norm, v.frames.norm, rtol=1e-12)

    @parameterized.expand([(0,), (8,), (-9,)])
    def test_invalid_order(self, m):
        with self.assertRaises(InvalidInputError):
            build_azimuthal_null(SphereKernel.isotropic(), momenta(), m, GRID)

    def test_errors(self):
        with self.assertRaises(InvalidInputError):
            SphereKernel(())
        u = build_azimuthal_null(SphereKernel.isotropic(), [[0.0, 0.0, 1.0]], 1, SphereGrid(8, 16))
        with self.assertRaises(ResolutionError) as context:
            verify_fourier_nullity(u, SphereKernel.isotropic(), [100.0])
        self.assertEqual(context.exception.needed, 319)
