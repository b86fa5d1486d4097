import unittest

import numpy as np
import pytest
import scipy.linalg
from parameterized import parameterized

from selfadjoint.exceptions import DegenerateInputError, DomainError, InvalidInputError, ParameterError
from selfadjoint.lab import (
    assemble_discrete,
    constraint_scan,
    evolve_free,
    half_strip_scan,
    krylov_split,
    oracle_compare,
    resample_strip,
    sample_supports,
    torus_grid,
)
from selfadjoint.model.functions import Representation, StripFunction, strip_norm
from selfadjoint.model.grids import AngleGrid, Grid1D
from selfadjoint.model.kernel import (
    AngularFactor,
    Channel,
    CollisionKernel,
    GapLatticeCoefficient,
    IntervalCoefficient,
    ZeroCoefficient,
)
from selfadjoint.warnings import CertificateWarning

GAP_KERNEL = CollisionKernel.single(GapLatticeCoefficient(0.0, 1.0, 0.25))


def random_hermitian(rng, size):
    matrix = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
    return (matrix + matrix.conj().T) / 2


def gaussian_strip(grid, angles):
    return StripFunction.sample(
        lambda x, mu: np.exp(-((x - mu) ** 2)) * (1 + 0.5j * mu),
        Representation.POSITION,
        grid,
        angles,
    )


class AssemblyTestCase(unittest.TestCase):
    def setUp(self):
        self.x_grid = torus_grid(8.0, 16)
        self.angles = AngleGrid(4)

    def test_torus_grid(self):
        self.assertEqual(self.x_grid.n, 16)
        self.assertAlmostEqual(self.x_grid.spacing, 0.5)
        self.assertEqual(self.x_grid.lo, -4.0)

    def test_zero_kernel(self):
        operator = assemble_discrete(
            CollisionKernel.single(ZeroCoefficient()), self.x_grid, self.angles
        )
        self.assertEqual(operator.dim, 64)
        self.assertEqual(operator.period, 8.0)
        self.assertEqual(np.abs(operator.K).max(), 0.0)
        self.assertEqual(operator.hermiticity(), (0.0, 0.0))
        self.assertLess(np.abs(np.linalg.eigvals(operator.A).imag).max(), 1e-10)

    def test_isotropic_collisions(self):
        operator = assemble_discrete(
            CollisionKernel.single(IntervalCoefficient(-1.0, 1.0)), self.x_grid, self.angles
        )
        ones = StripFunction.sample(
            lambda x, mu: np.ones_like(x * mu), Representation.POSITION, self.x_grid, self.angles
        )
        image = operator.from_vector(operator.K @ operator.to_vector(ones))
        c = IntervalCoefficient(-1.0, 1.0)(self.x_grid.nodes)
        np.testing.assert_allclose(image.values, 2 * c[:, None] * np.ones((1, 4)), atol=1e-12)

    def test_vector_round_trip(self):
        operator = assemble_discrete(GAP_KERNEL, self.x_grid, self.angles)
        f = gaussian_strip(self.x_grid, self.angles)
        vector = operator.to_vector(f)
        self.assertAlmostEqual(np.linalg.norm(vector), np.sqrt(np.sum(
            self.x_grid.spacing * np.abs(f.values) ** 2 * self.angles.weights[None, :]
        )), places=12)
        np.testing.assert_allclose(operator.from_vector(vector).values, f.values, atol=1e-12)

        with self.assertRaises(InvalidInputError):
            operator.to_vector(gaussian_strip(torus_grid(8.0, 32), self.angles))


class EvolutionTestCase(unittest.TestCase):
    def setUp(self):
        self.f = gaussian_strip(Grid1D(-20.0, 20.0, 401), AngleGrid(4))

    def test_identity(self):
        self.assertIs(evolve_free(self.f, 0.0), self.f)

    def test_translation(self):
        moved = evolve_free(self.f, 3.0)
        x, mu = np.meshgrid(self.f.grid.nodes, self.f.angles.nodes, indexing="ij")
        expected = np.exp(-((x - 3.0 * mu - mu) ** 2)) * (1 + 0.5j * mu)
        np.testing.assert_allclose(moved.values, expected, atol=1e-10)

    def test_isometry_and_group(self):
        moved = evolve_free(self.f, 3.0)
        self.assertAlmostEqual(strip_norm(moved), strip_norm(self.f), places=10)
        np.testing.assert_allclose(evolve_free(moved, -3.0).values, self.f.values, atol=1e-8)
        np.testing.assert_allclose(
            evolve_free(evolve_free(self.f, 1.0), 2.0).values, moved.values, atol=1e-8
        )

    def test_periodic(self):
        grid = torus_grid(8.0, 64)
        f = gaussian_strip(grid, AngleGrid(2))
        mu = f.angles.nodes[1]
        # a shift by one period returns every column of the positive angle
        wrapped = evolve_free(f, 8.0 / mu, periodic=True)
        np.testing.assert_allclose(wrapped.values[:, 1], f.values[:, 1], atol=1e-10)

    def test_errors(self):
        with self.assertRaises(DomainError):
            evolve_free(self.f, 20.0)
        spectral = StripFunction(
            Representation.SPECTRAL, self.f.grid, self.f.angles, self.f.values
        )
        with self.assertRaises(InvalidInputError):
            evolve_free(spectral, 1.0)

    def test_resample(self):
        f = StripFunction.sample(
            lambda x, mu: x + 0 * mu, Representation.POSITION, Grid1D(-1.0, 1.0, 21), AngleGrid(2)
        )
        wide = Grid1D(-2.0, 2.0, 41)
        resampled = resample_strip(f, wide)
        inside = np.abs(wide.nodes) <= 1.0
        np.testing.assert_allclose(resampled.values[inside, 0], wide.nodes[inside], atol=1e-14)
        np.testing.assert_array_equal(resampled.values[~inside], 0.0)


class SplitTestCase(unittest.TestCase):
    def test_zero_collisions(self):
        rng = np.random.default_rng(0)
        split = krylov_split(random_hermitian(rng, 5), np.zeros((5, 5)))
        self.assertEqual((split.dim_h1, split.dim_h0), (0, 5))
        self.assertTrue(split.certified)

    def test_cyclic_vector(self):
        v = np.ones(6) / np.sqrt(6)
        split = krylov_split(np.diag(np.arange(1.0, 7.0)), np.outer(v, v))
        self.assertEqual((split.dim_h1, split.dim_h0), (6, 0))
        self.assertTrue(split.certified)
        self.assertEqual(split.summary()["dim_h1"], 6)

    def test_eigenvector_is_not_cyclic(self):
        e1 = np.eye(6)[0]
        split = krylov_split(np.diag(np.arange(1.0, 7.0)), np.outer(e1, e1))
        self.assertEqual((split.dim_h1, split.dim_h0), (1, 5))

    @parameterized.expand([(3, 3), (4, 2), (2, 6)])
    def test_engineered_blocks(self, coupled, free):
        rng = np.random.default_rng(coupled * 10 + free)
        A = scipy.linalg.block_diag(random_hermitian(rng, coupled), random_hermitian(rng, free))
        k = np.concatenate([rng.standard_normal(coupled), np.zeros(free)])
        split = krylov_split(A, np.outer(k, k))
        self.assertEqual((split.dim_h1, split.dim_h0), (coupled, free))
        self.assertTrue(split.certified)
        for key, value in split.residuals.items():
            self.assertLess(value, 1e-10, key)

        vector = np.zeros(coupled + free)
        vector[-1] = 1.0
        np.testing.assert_allclose(split.project_h0(vector), vector, atol=1e-10)
        np.testing.assert_allclose(split.project_h1(vector), 0.0, atol=1e-10)

    def test_not_converged(self):
        v = np.ones(6) / np.sqrt(6)
        with pytest.warns(CertificateWarning):
            split = krylov_split(np.diag(np.arange(1.0, 7.0)), np.outer(v, v), max_iter=1)
        self.assertFalse(split.converged)
        self.assertFalse(split.certified)
        self.assertEqual(split.dim_h1, 2)

    def test_shapes(self):
        with self.assertRaises(InvalidInputError):
            krylov_split(np.eye(3), np.eye(4))


class OracleTestCase(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.operator = assemble_discrete(GAP_KERNEL, torus_grid(8.0, 32), AngleGrid(4))
        cls.split = krylov_split(cls.operator.A, cls.operator.K)

    def test_split_is_certified(self):
        self.assertTrue(self.split.certified)
        self.assertEqual(self.split.dim_h1 + self.split.dim_h0, self.operator.dim)

    def test_components(self):
        rng = np.random.default_rng(1)
        vector = rng.standard_normal(self.operator.dim) + 1j * rng.standard_normal(self.operator.dim)
        inside = self.operator.from_vector(self.split.project_h0(vector))
        report = oracle_compare(inside, self.operator, self.split)
        self.assertLess(report.ratio, 1e-8)
        self.assertTrue(report.passes())

        outside = self.operator.from_vector(self.split.project_h1(vector))
        self.assertAlmostEqual(oracle_compare(outside, self.operator, self.split).ratio, 1.0, places=8)

        generic = oracle_compare(self.operator.from_vector(vector), self.operator, self.split)
        self.assertTrue(0.0 < generic.ratio < 1.0)
        self.assertEqual(generic.dim_h0, self.split.dim_h0)

    def test_errors(self):
        zero = self.operator.from_vector(np.zeros(self.operator.dim))
        with self.assertRaises(DegenerateInputError):
            oracle_compare(zero, self.operator, self.split)
        with self.assertRaises(InvalidInputError):
            oracle_compare(gaussian_strip(Grid1D(-4.0, 4.0, 33), AngleGrid(4)), self.operator)


HALF_AXIS = Channel(IntervalCoefficient(0.0), AngularFactor((1.0,)))
LEFT_AXIS = Channel(IntervalCoefficient(-np.inf, 0.0), AngularFactor((0.0, 1.0)))
UPPER_STRIP = Channel(IntervalCoefficient(0.0), AngularFactor((1.0,), (0.0, 1.0)))


class ScanTestCase(unittest.TestCase):
    def test_zero_coefficient(self):
        scan = constraint_scan(
            CollisionKernel.single(ZeroCoefficient()), q_nodes=4, p_nodes=8, x_sample=5
        )
        self.assertTrue(scan.degenerate)
        self.assertEqual(scan.sigma_max, 0.0)
        self.assertEqual(scan.nullspace_dim_at(), 32)
        report = scan.to_report()
        self.assertTrue(report["degenerate"])
        self.assertEqual(report["sigma_relative"], [])
        self.assertEqual(report["unknowns"], 32)

    def test_counts(self):
        scan = constraint_scan(GAP_KERNEL, q_nodes=6, p_nodes=10, x_sample=12)
        positive = np.linspace(0.25, 3.0, 3)
        np.testing.assert_allclose(scan.q_nodes, np.concatenate([-positive[::-1], positive]))
        self.assertEqual(scan.p_grid, "uniform")
        self.assertEqual([p.size for p in scan.p_nodes], [10] * 6)
        self.assertTrue(all(np.all(np.abs(p) >= 1.0) for p in scan.p_nodes))
        self.assertGreaterEqual(scan.rows, 10)
        # one singular value per unknown, no padding
        self.assertEqual(scan.singular_values.size, 60)
        self.assertTrue(np.all(np.diff(scan.singular_values) <= 0))
        self.assertTrue(np.all(scan.singular_values > 0))
        report = scan.to_report()
        self.assertEqual(report["grids"]["q"], [-3.0, 3.0, 6])
        self.assertEqual(report["grids"]["p"], {"kind": "uniform", "columns": [10, 10]})

    def test_aligned_grid(self):
        kernel = CollisionKernel((HALF_AXIS,))
        scan = constraint_scan(kernel, q_nodes=[-2.0, 0.2, 2.0], x_sample=64)
        self.assertEqual(scan.p_grid, "aligned")
        # one channel sampled at 64 midpoints of [0, 4]
        step = 2 * np.pi / (2.0 * 4.0)
        cells = int(7.0 // step)
        positive = 1.0 + (np.arange(cells) + 0.5) * step
        np.testing.assert_allclose(scan.p_nodes[2], np.concatenate([-positive[::-1], positive]))
        np.testing.assert_allclose(scan.p_weights[2], step)
        np.testing.assert_allclose(scan.p_nodes[0], scan.p_nodes[2])

        # the slow q = 0.2 block keeps one cell per branch over [1, 8]
        np.testing.assert_allclose(scan.p_nodes[1], [-4.5, 4.5])
        np.testing.assert_allclose(scan.p_weights[1], [7.0, 7.0])

        # one branch of the aligned block is a set of discrete Fourier modes
        block = scan.blocks[2][:, cells:] / np.sqrt(step / positive)[None, :]
        np.testing.assert_allclose(block.conj().T @ block, 64 * np.eye(cells), atol=1e-9)

    def test_q_zero_is_rank_one(self):
        kernel = CollisionKernel((HALF_AXIS,))
        scan = constraint_scan(kernel, q_nodes=[0.0], p_nodes=8, x_sample=16)
        self.assertEqual(scan.singular_values.size, 8)
        self.assertEqual(scan.nullspace_dim_at(1e-10), 7)

    @parameterized.expand(
        [
            ("halfaxis", (HALF_AXIS,), False),
            ("halfstrip", (UPPER_STRIP,), True),
            ("two_half", (HALF_AXIS, LEFT_AXIS), False),
        ]
    )
    def test_completely_nonselfadjoint(self, _, channels, half_strip):
        run = half_strip_scan if half_strip else constraint_scan
        scan = run(CollisionKernel(channels))
        self.assertEqual(scan.p_grid, "aligned")
        self.assertGreater(scan.ratio, 1e-3)
        self.assertEqual(scan.nullspace_dim_at(1e-6), 0)
        self.assertTrue(all(p.size <= scan.rows for p in scan.p_nodes))
        if half_strip:
            self.assertTrue(all(np.all(p > 1.0) for p in scan.p_nodes))

    def test_gap_contrast(self):
        gap = constraint_scan(GAP_KERNEL, p_nodes=96)
        self.assertEqual(gap.p_grid, "uniform")
        self.assertGreaterEqual(gap.nullspace_dim_at(1e-6), 3)
        half = constraint_scan(CollisionKernel((HALF_AXIS,)))
        self.assertGreater(half.ratio, 1e3 * gap.ratio)

    def test_sample_supports(self):
        (x,) = sample_supports(GAP_KERNEL, (-4.0, 4.0), 16)
        self.assertEqual(x.size, 16)
        self.assertTrue(np.all(GAP_KERNEL.channels[0].coefficient(x) == 1.0))

    def test_monotone_in_constraints(self):
        q = np.array([-2.0, -1.0, -0.5, 0.5, 1.0, 2.0])
        p = np.linspace(1.0, 4.0, 12)
        p = np.concatenate([-p[::-1], p])
        x = sample_supports(GAP_KERNEL, (-4.0, 4.0), 96)[0]
        few = constraint_scan(GAP_KERNEL, q, p, x[::2])
        many = constraint_scan(GAP_KERNEL, q, p, x)
        reference = many.sigma_max
        for tol in (1e-2, 1e-4, 1e-6):
            self.assertLessEqual(
                many.nullspace_dim_at(tol, reference), few.nullspace_dim_at(tol, reference)
            )

    def test_residual(self):
        scan = constraint_scan(GAP_KERNEL, q_nodes=4, p_nodes=8, x_sample=8)
        self.assertEqual(scan.residual(lambda q, p: np.zeros_like(q)), 0.0)
        self.assertGreater(scan.residual(lambda q, p: np.exp(-(q**2)) + 0 * p), 0.0)

        # an exact image that vanishes at the samples
        silent = scan.residual(
            lambda q, p: np.exp(-(q**2)) + 0 * p,
            lambda q, x, channel: np.zeros(x.size, dtype=complex),
        )
        self.assertEqual(silent, 0.0)

    def test_residual_bounded_by_sigma_max(self):
        scan = constraint_scan(GAP_KERNEL, q_nodes=4, p_nodes=8, x_sample=8)
        rng = np.random.default_rng(3)
        table = {}

        def density(q, p):
            key = (float(q[0]), p.size)
            if key not in table:
                table[key] = rng.standard_normal(p.size) + 1j * rng.standard_normal(p.size)
            return table[key]

        self.assertLessEqual(scan.residual(density), 1.0 + 1e-12)

    def test_errors(self):
        with self.assertRaises(DomainError):
            constraint_scan(GAP_KERNEL, q_nodes=4, p_nodes=8, x_sample=[0.0])
        with self.assertRaises(DomainError):
            constraint_scan(GAP_KERNEL, q_nodes=4, p_nodes=[0.5, 2.0], x_sample=4)
        with self.assertRaises(ParameterError):
            constraint_scan(GAP_KERNEL, q_nodes=1000, p_nodes=1000, x_sample=2000)

    def test_underdetermined(self):
        with self.assertRaises(ParameterError) as context:
            constraint_scan(GAP_KERNEL, q_nodes=4, p_nodes=32, x_sample=8)
        self.assertIn("rows", str(context.exception))

    def test_half_strip(self):
        kernel = CollisionKernel.single(IntervalCoefficient(0.0, 0.5))
        with self.assertRaises(ParameterError):
            half_strip_scan(kernel, q_nodes=4, p_nodes=8, x_sample=8)

        kernel = CollisionKernel(
            (Channel(IntervalCoefficient(0.0, 0.5), AngularFactor((1.0,), (0.0, 1.0))),)
        )
        scan = half_strip_scan(kernel, q_nodes=4, p_nodes=8, x_sample=8)
        self.assertTrue(all(np.all(p >= 1.0) for p in scan.p_nodes))
        self.assertFalse(scan.degenerate)

        zero = CollisionKernel(
            (Channel(ZeroCoefficient(), AngularFactor((1.0,), (0.0, 1.0))),)
        )
        self.assertTrue(half_strip_scan(zero, q_nodes=4, p_nodes=8, x_sample=4).degenerate)
