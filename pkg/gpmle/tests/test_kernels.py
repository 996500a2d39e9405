# -*- mode: python; coding: utf-8 -*-

import math

import numpy
from numpy import testing

from django import test

from .. import errors
from .. import kernels
from .util import random_problem

Family = kernels.Family

SPECS = [
    kernels.KernelSpec(Family.SQUARED_EXPONENTIAL, 2),
    kernels.KernelSpec(Family.RATIONAL_QUADRATIC, 2, 1.5),
    kernels.KernelSpec(Family.MATERN, 2, 0.5),
    kernels.KernelSpec(Family.MATERN, 2, 1.5),
    kernels.KernelSpec.matern52(2),
    kernels.KernelSpec(Family.MATERN, 2, 3.5),
]


class KernelSpecTests(test.SimpleTestCase):
    def test_defaults(self):
        self.assertEqual(kernels.KernelSpec('matern', 3).nu, 2.5)
        self.assertEqual(kernels.KernelSpec('rational_quadratic', 1).nu, 1.0)
        self.assertIsNone(
            kernels.KernelSpec('squared_exponential', 1, 7).nu)

    def test_from_dict(self):
        spec = kernels.KernelSpec.from_dict({'family': 'matern', 'nu': 1.5},
                                            4)

        self.assertEqual(spec, kernels.KernelSpec(Family.MATERN, 4, 1.5))
        self.assertEqual(spec.to_dict(), {'family': 'matern', 'nu': 1.5})
        self.assertEqual(str(spec), 'matern(nu=1.5)')

    def test_invalid(self):
        with self.assertRaises(errors.ContractViolation):
            kernels.KernelSpec(Family.MATERN, 0)

        with self.assertRaises(errors.ContractViolation):
            kernels.KernelSpec(Family.MATERN, 2, -1.0)

        with self.assertRaises(ValueError):
            kernels.KernelSpec('periodic', 2)


class ParamVectorTests(test.SimpleTestCase):
    def test_positive(self):
        params = kernels.ParamVector(2.0, [0.5, 3.0], 0.1, -1.0)

        self.assertEqual(params.rho, (0.5, 3.0))
        self.assertEqual(params.dim, 2)
        testing.assert_array_equal(params.positive(), [2.0, 0.5, 3.0])
        testing.assert_array_equal(params.positive(True),
                                   [2.0, 0.5, 3.0, 0.1])

    def test_rejects_non_positive(self):
        with self.assertRaises(errors.NonPositiveParam):
            kernels.ParamVector(0.0, [1.0])

        with self.assertRaises(errors.NonPositiveParam):
            kernels.ParamVector(1.0, [1.0, -2.0])

        with self.assertRaises(errors.NonPositiveParam):
            kernels.ParamVector(1.0, [1.0], noise=-1e-3)

        with self.assertRaises(errors.NonPositiveParam):
            kernels.ParamVector(math.inf, [1.0])

    def test_dimension_check(self):
        params = kernels.ParamVector(1.0, [1.0, 1.0, 1.0])

        with self.assertRaises(errors.ContractViolation):
            params.check(kernels.KernelSpec.matern52(2))

    def test_dict(self):
        params = kernels.ParamVector(2.0, [0.5], 0.0, 3.0)
        self.assertEqual(kernels.ParamVector.from_dict(params.to_dict()),
                         params)


class DatasetTests(test.SimpleTestCase):
    def test_read_only(self):
        data = kernels.Dataset([[0.0, 1.0], [1.0, 0.0]], [1.0, 2.0])

        with self.assertRaises(ValueError):
            data.X[0, 0] = 5.0

        with self.assertRaises(ValueError):
            data.z[0] = 5.0

    def test_shapes(self):
        data = kernels.Dataset([0.0, 1.0, 2.0], [[1.0], [2.0], [3.0]])

        self.assertEqual((data.n, data.d), (3, 1))
        self.assertEqual(data.z.shape, (3,))

        with self.assertRaises(errors.ContractViolation):
            kernels.Dataset([[0.0], [1.0]], [1.0])

        with self.assertRaises(errors.ContractViolation):
            kernels.Dataset([[0.0], [math.nan]], [1.0, 2.0])

    def test_without(self):
        data = kernels.Dataset([[0.0], [1.0], [2.0]], [5.0, 6.0, 7.0],
                               {'id': 'x'})
        held = data.without(1)

        testing.assert_array_equal(held.X, [[0.0], [2.0]])
        testing.assert_array_equal(held.z, [5.0, 7.0])
        self.assertEqual(held.meta, {'id': 'x', 'held_out': 1})
        self.assertEqual(data.meta, {'id': 'x'})

    def test_duplicates(self):
        self.assertTrue(kernels.Dataset([[0.0], [0.0]], [1.0, 2.0])
                        .has_duplicate_rows())
        self.assertFalse(kernels.Dataset([[0.0], [1.0]], [1.0, 1.0])
                         .has_duplicate_rows())


class DistanceTests(test.SimpleTestCase):
    def test_scaled_distance(self):
        self.assertEqual(kernels.scaled_distance([0, 0], [3, 4], [1, 1]),
                         5.0)
        self.assertAlmostEqual(
            kernels.scaled_distance([0, 0], [3, 4], [3, 4]), math.sqrt(2))
        self.assertEqual(kernels.scaled_distance([1, 2], [1, 2], [1, 1]),
                         0.0)

    def test_mismatch(self):
        with self.assertRaises(errors.ContractViolation):
            kernels.scaled_distance([0, 0], [1, 1, 1], [1, 1])

        with self.assertRaises(errors.ContractViolation):
            kernels.scaled_distance([0, 0], [1, 1], [1])

    def test_matrix(self):
        X = numpy.array([[0.0, 0.0], [3.0, 4.0], [1.0, 1.0]])
        H = kernels.scaled_distances(X, None, [1.0, 2.0])

        testing.assert_array_equal(numpy.diag(H), 0.0)
        testing.assert_array_equal(H, H.T)
        self.assertAlmostEqual(H[0, 1], math.sqrt(9 + 4))

        C = kernels.scaled_distances(X, X[:2], [1.0, 2.0])
        self.assertEqual(C.shape, (3, 2))
        testing.assert_allclose(C, H[:, :2])


class CorrelationTests(test.SimpleTestCase):
    h = numpy.linspace(0.01, 6.0, 50)
    wide = numpy.geomspace(1e-8, 20.0, 200)

    def test_unit_at_zero(self):
        for spec in SPECS:
            self.assertEqual(kernels.correlation(spec, 0.0), 1.0, spec)

    def test_decreasing(self):
        for spec in SPECS:
            r = kernels.correlation(spec, self.h)
            self.assertTrue(numpy.all(numpy.diff(r) < 0), spec)
            self.assertTrue(numpy.all(r > 0), spec)

    def test_matern_closed_forms(self):
        for nu in (0.5, 1.5, 2.5):
            spec = kernels.KernelSpec(Family.MATERN, 1, nu)

            testing.assert_allclose(kernels.correlation(spec, self.wide),
                                    kernels.matern_general(nu, self.wide),
                                    rtol=1e-10, err_msg=str(spec))

    def test_matern_far_away(self):
        self.assertEqual(kernels.matern_general(3.5, 1e4), 0.0)

    def test_derivative(self):
        eps = 1e-6

        for spec in SPECS:
            numeric = (kernels.correlation(spec, self.h + eps) -
                       kernels.correlation(spec, self.h - eps)) / (2 * eps)

            testing.assert_allclose(
                kernels.correlation_dr_over_h(spec, self.h) * self.h,
                numeric, rtol=1e-5, atol=1e-9, err_msg=str(spec))

            self.assertEqual(kernels.correlation_dr_over_h(spec, 0.0), 0.0)

    def test_negative_distance(self):
        with self.assertRaises(errors.ContractViolation):
            kernels.correlation(SPECS[0], [-1.0])


class CovarianceTests(test.SimpleTestCase):
    def test_matrix(self):
        data, params = random_problem(1, noise=0.25)
        spec = kernels.KernelSpec.matern52(2)
        K = kernels.covariance_matrix(spec, params, data.X)

        testing.assert_array_equal(K, K.T)
        testing.assert_allclose(numpy.diag(K), params.sigma2 + 0.25)
        self.assertTrue(numpy.all(numpy.linalg.eigvalsh(K) > 0))

    def test_cross_covariance(self):
        data, params = random_problem(2)
        spec = kernels.KernelSpec.matern52(2)
        K = kernels.covariance_matrix(spec, params, data.X)

        k = kernels.cross_covariance(spec, params, data.X, data.X[2])
        self.assertEqual(k.shape, (data.n,))
        testing.assert_allclose(k, K[:, 2])

        block = kernels.cross_covariance(spec, params, data.X, data.X[:3])
        self.assertEqual(block.shape, (data.n, 3))
        testing.assert_allclose(block, K[:, :3])

    def test_gradient(self):
        data, params = random_problem(3, noise=0.1)
        eps = 1e-6

        for spec in SPECS:
            grads = kernels.covariance_gradient(spec, params, data.X)
            self.assertEqual(len(grads), params.dim + 2)

            def K(p):
                return kernels.covariance_matrix(spec, p, data.X)

            numeric = [(K(params.replace(sigma2=params.sigma2 + eps)) -
                        K(params.replace(sigma2=params.sigma2 - eps))) /
                       (2 * eps)]

            for k in range(params.dim):
                up = list(params.rho)
                down = list(params.rho)
                up[k] += eps
                down[k] -= eps
                numeric.append((K(params.replace(rho=up)) -
                                K(params.replace(rho=down))) / (2 * eps))

            numeric.append((K(params.replace(noise=params.noise + eps)) -
                            K(params.replace(noise=params.noise - eps))) /
                           (2 * eps))

            for analytic, approx in zip(grads, numeric):
                testing.assert_allclose(analytic, approx, rtol=1e-5,
                                        atol=1e-7, err_msg=str(spec))
