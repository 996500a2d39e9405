# -*- mode: python; coding: utf-8 -*-

import math

import numpy
from numpy import testing

from django import test

from .. import errors
from .. import kernels
from .. import linalg
from .util import random_problem


class JitterPolicyTests(test.SimpleTestCase):
    def test_jitters(self):
        policy = linalg.JitterPolicy((1e-6, 1e-3), 1e-8)
        testing.assert_allclose(policy.jitters(4.0), (1e-8, 4e-6, 4e-3))

    def test_invalid(self):
        with self.assertRaises(errors.ContractViolation):
            linalg.JitterPolicy((1e-3, 1e-6))

        with self.assertRaises(errors.ContractViolation):
            linalg.JitterPolicy((0.0, 1e-6))

        with self.assertRaises(errors.ContractViolation):
            linalg.JitterPolicy(minimal=-1.0)


class CholeskyTests(test.SimpleTestCase):
    def _matrix(self, seed=0):
        data, params = random_problem(seed)
        spec = kernels.KernelSpec.matern52(2)
        return kernels.covariance_matrix(spec, params, data.X), params

    def test_first_attempt(self):
        K, params = self._matrix()
        chol = linalg.cholesky_with_jitter(K, params.sigma2)

        self.assertEqual(chol.attempts, 1)
        self.assertEqual(chol.jitter_used, linalg.MINIMAL_JITTER)
        testing.assert_allclose(chol.reconstruct(),
                                K + 1e-8 * numpy.eye(len(K)),
                                rtol=1e-12, atol=1e-12)

    def test_minimal_jitter_rescues_rank_one(self):
        chol = linalg.cholesky_with_jitter(4.0 * numpy.ones((2, 2)), 4.0)

        self.assertEqual(chol.attempts, 1)
        self.assertEqual(chol.jitter_used, 1e-8)

    def test_escalation(self):
        policy = linalg.JitterPolicy(minimal=0.0)
        chol = linalg.cholesky_with_jitter(4.0 * numpy.ones((2, 2)), 4.0,
                                           policy)

        self.assertEqual(chol.attempts, 2)
        self.assertEqual(chol.jitter_used, 4e-6)
        testing.assert_allclose(chol.reconstruct(),
                                4.0 * numpy.ones((2, 2)) + 4e-6 * numpy.eye(2))

    def test_all_failed(self):
        policy = linalg.JitterPolicy((1e-6, 1e-3), 0.0)

        with self.assertRaises(errors.AllJitterFailed) as cm:
            linalg.cholesky_with_jitter(-numpy.eye(3), 1.0, policy)

        self.assertEqual(cm.exception.attempts, 3)
        self.assertEqual(cm.exception.last_jitter, 1e-3)

        # callers catching numpy errors see it too
        with self.assertRaises(numpy.linalg.LinAlgError):
            linalg.cholesky_with_jitter(-numpy.eye(3), 1.0, policy)

    def test_non_finite(self):
        K = numpy.eye(2)
        K[0, 1] = K[1, 0] = math.nan

        with self.assertRaises(errors.AllJitterFailed):
            linalg.cholesky_with_jitter(K, 1.0)

    def test_contract(self):
        with self.assertRaises(errors.ContractViolation):
            linalg.cholesky_with_jitter(numpy.ones((2, 3)), 1.0)

        with self.assertRaises(errors.ContractViolation):
            linalg.cholesky_with_jitter(numpy.eye(2), 0.0)

    def test_solve_and_log_det(self):
        K, params = self._matrix(1)
        chol = linalg.cholesky_with_jitter(K, params.sigma2)
        A = K + chol.jitter_used * numpy.eye(len(K))
        b = numpy.arange(len(K), dtype=float)

        testing.assert_allclose(A @ linalg.solve(chol, b), b, atol=1e-7)
        testing.assert_allclose(A @ chol.inverse(), numpy.eye(len(K)),
                                atol=1e-7)
        self.assertAlmostEqual(linalg.log_det(chol),
                               numpy.linalg.slogdet(A)[1], places=9)

        with self.assertRaises(errors.ContractViolation):
            linalg.solve(chol, numpy.ones(len(K) + 1))


class ConditioningTests(test.SimpleTestCase):
    def test_diagonal(self):
        report = linalg.conditioning_report(numpy.diag([1.0, 2.0, 4.0]))

        testing.assert_allclose(report.eigenvalues, [4.0, 2.0, 1.0])
        self.assertAlmostEqual(report.kappa, 4.0)
        self.assertAlmostEqual(report.log_det, math.log(8.0))
        self.assertAlmostEqual(report.kappa_logdet, 5.25 / math.log(8.0))
        self.assertAlmostEqual(report.lower_bound, 4.0 / math.log(8.0))
        self.assertAlmostEqual(report.upper_bound, 12.0 / math.log(8.0))

    def test_scaled_identity(self):
        report = linalg.conditioning_report(math.e * numpy.eye(2))

        self.assertAlmostEqual(report.kappa, 1.0)
        self.assertAlmostEqual(report.kappa_logdet, 1.0)

    def test_bounds_hold(self):
        rng = numpy.random.default_rng(0)

        for _ in range(100):
            n = int(rng.integers(2, 31))
            Q, _ = numpy.linalg.qr(rng.normal(size=(n, n)))
            K = (Q * 10.0 ** rng.uniform(-2.0, 2.0, n)) @ Q.T
            report = linalg.conditioning_report(0.5 * (K + K.T))

            self.assertLessEqual(report.lower_bound, report.kappa_logdet, n)
            self.assertLessEqual(report.kappa_logdet, report.upper_bound, n)
            self.assertGreaterEqual(report.kappa, 1.0)

    def test_bounds_hold_for_kernels(self):
        for seed in range(5):
            data, params = random_problem(seed, n=8)
            K = kernels.covariance_matrix(kernels.KernelSpec.matern52(2),
                                          params, data.X)
            report = linalg.conditioning_report(K)

            self.assertLessEqual(report.lower_bound, report.kappa_logdet)
            self.assertLessEqual(report.kappa_logdet, report.upper_bound)

    def test_degenerate(self):
        with self.assertRaises(errors.DegenerateLogDet):
            linalg.conditioning_report(numpy.eye(3))

        with self.assertRaises(errors.NotPositiveDefinite):
            linalg.conditioning_report(numpy.diag([1.0, -1.0]))


class NumericalNoiseTests(test.SimpleTestCase):
    def test_smooth(self):
        estimate = linalg.measure_numerical_noise(
            lambda t: 3.0 + t + 2.0 * t ** 2, 0.0, 0.5)

        self.assertLess(estimate.delta, 1e-12)
        self.assertEqual(estimate.t.shape, (linalg.DEFAULT_NUM_POINTS,))
        self.assertEqual(estimate.transect.num_points, 100)
        self.assertAlmostEqual(estimate.t[0], -0.5)
        self.assertAlmostEqual(estimate.t[-1], 0.5)

    def test_noisy(self):
        def f(t):
            # alternating +-1e-6 on top of a constant
            return 1.0 + 1e-6 * (-1) ** round(t * 99 / 2.0 + 49.5)

        estimate = linalg.measure_numerical_noise(f, 0.0, 1.0, 100)

        self.assertGreater(estimate.delta, 5e-7)
        self.assertLess(estimate.delta, 2e-6)

    def test_contract(self):
        with self.assertRaises(errors.ContractViolation):
            linalg.measure_numerical_noise(lambda t: 1.0, 0.0, 1e-5, 5)

        with self.assertRaises(errors.ContractViolation):
            linalg.measure_numerical_noise(lambda t: 0.0, 0.0)

        with self.assertRaises(errors.NonFiniteObjective):
            linalg.measure_numerical_noise(lambda t: math.nan, 0.0)
