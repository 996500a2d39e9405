import logging
import sys

import numpy

from django.test import override_settings, runner

from .. import kernels


class TestRunner(runner.DiscoverRunner):
    '''
    A Django test runner that enables output buffering.
    '''

    def __init__(self, *args, **kwargs):
        kwargs.setdefault('pattern', 'test_*.py')
        super().__init__(*args, **kwargs)

    def get_test_runner_kwargs(self):
        kwargs = super().get_test_runner_kwargs()

        kwargs.update(
            buffer=True,
        )

        return kwargs

    def setup_test_environment(self, **kwargs):
        super().setup_test_environment(**kwargs)
        self.log_stream_handler = logging.StreamHandler(sys.stdout)
        self.log_stream_handler.setLevel(logging.DEBUG)

        logging.getLogger('gpmle').addHandler(self.log_stream_handler)

    def teardown_test_environment(self, **kwargs):
        super().teardown_test_environment(**kwargs)
        logging.getLogger('gpmle').removeHandler(self.log_stream_handler)

    @override_settings(TESTING=True)
    def run_tests(self, *args, **kwargs):
        return super().run_tests(*args, **kwargs)


def random_problem(seed, n=6, d=2, noise=0.0):
    '''A random dataset with well separated points and parameters'''
    rng = numpy.random.default_rng(seed)

    X = rng.uniform(0.0, 1.0, (n, d))
    z = numpy.sin(3.0 * X).sum(axis=1) + 0.1 * rng.normal(size=n)
    params = kernels.ParamVector(
        sigma2=rng.uniform(0.5, 2.0),
        rho=rng.uniform(0.3, 1.0, d),
        noise=noise,
        mu=rng.normal(),
    )

    return kernels.Dataset(X, z), params


def far_apart(z):
    '''A 1-d dataset whose points are so distant that any unit-range
    correlation between them underflows to exactly zero'''
    z = numpy.asarray(z, dtype=float)
    return kernels.Dataset(100.0 * numpy.arange(z.size), z)


def dense_nll(K, z, mu):
    '''The NLL from an explicit determinant and inverse'''
    r = z - mu
    sign, logdet = numpy.linalg.slogdet(K)
    assert sign > 0
    return (0.5 * r @ numpy.linalg.inv(K) @ r + 0.5 * logdet +
            0.5 * len(z) * numpy.log(2 * numpy.pi))
