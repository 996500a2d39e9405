# -*- mode: python; coding: utf-8 -*-
'''Posterior prediction, interpolation metrics and leave-one-out.'''

import collections
import concurrent.futures
import dataclasses
import logging
import math
import threading

import numpy
from scipy import linalg as sla

from . import errors
from . import kernels
from . import linalg
from . import mle

logger = logging.getLogger(__name__)

#: negative variances above this fraction of sigma2 are round-off
VARIANCE_GUARD = 1e-8


class Tally:
    '''Thread-safe counter of numerical events'''

    def __init__(self):
        self._counter = collections.Counter()
        self._lock = threading.Lock()

    def add(self, key, count=1):
        with self._lock:
            self._counter[key] += count

    def __getitem__(self, key):
        with self._lock:
            return self._counter[key]

    def as_dict(self):
        with self._lock:
            return dict(self._counter)


@dataclasses.dataclass(frozen=True, eq=False)
class FittedGP:
    spec: kernels.KernelSpec
    params: kernels.ParamVector
    data: kernels.Dataset
    chol: linalg.JitteredCholesky
    alpha: numpy.ndarray
    diagnostics: Tally = dataclasses.field(default_factory=Tally)

    @classmethod
    def build(cls, spec, params, data, jitter=linalg.DEFAULT_POLICY):
        K = kernels.covariance_matrix(spec, params, data.X)
        chol = linalg.cholesky_with_jitter(K, params.sigma2, jitter)
        alpha = chol.solve(data.z - params.mu)
        alpha.flags.writeable = False
        return cls(spec, params, data, chol, alpha)

    def _whitened(self, x):
        k = kernels.cross_covariance(self.spec, self.params, self.data.X, x)
        return sla.solve_triangular(self.chol.L, k, lower=True,
                                    check_finite=False)

    def _clamp(self, variance):
        variance = numpy.asarray(variance, dtype=float)
        negative = variance < 0

        if numpy.any(negative):
            self.diagnostics.add('clamped_variance',
                                 int(numpy.count_nonzero(negative)))

            worst = float(variance.min())
            if worst < -VARIANCE_GUARD * self.params.sigma2:
                logger.warning('clamped posterior variance %g, beyond '
                               'round-off for sigma2=%g',
                               worst, self.params.sigma2)

        return numpy.where(negative, 0.0, variance)


def posterior_mean(model, x):
    '''``mu + k(X, x)' K^-1 (z - mu)``; a single point gives a float'''
    k = kernels.cross_covariance(model.spec, model.params, model.data.X, x)
    mean = model.params.mu + k.T @ model.alpha
    return float(mean) if numpy.ndim(mean) == 0 else mean


def posterior_covariance(model, x, y):
    x = numpy.asarray(x, dtype=float)
    y = numpy.asarray(y, dtype=float)

    prior = model.params.sigma2 * kernels.correlation(
        model.spec,
        kernels.scaled_distance(x, y, model.params.rho_array),
    )

    vx = model._whitened(x)
    vy = vx if numpy.array_equal(x, y) else model._whitened(y)
    covariance = float(prior - vx @ vy)

    if numpy.array_equal(x, y):
        covariance = float(model._clamp(covariance))

    return covariance


def posterior_variance(model, points):
    points = numpy.atleast_2d(numpy.asarray(points, dtype=float))
    V = model._whitened(points)
    return model._clamp(model.params.sigma2 - numpy.sum(V ** 2, axis=0))


def ermspe(model, test_X, test_z):
    test_z = numpy.asarray(test_z, dtype=float).ravel()
    test_X = numpy.atleast_2d(numpy.asarray(test_X, dtype=float))

    if test_z.size < 1 or test_X.shape[0] != test_z.size:
        raise errors.ContractViolation(
            'need matching non-empty test points and values')

    residual = test_z - posterior_mean(model, test_X)
    return float(numpy.sqrt(numpy.mean(residual ** 2)))


def normalized_interp_error(model):
    '''sqrt(SSR / SST) at the training points'''
    z = model.data.z
    scale = numpy.std(z)

    if model.data.n < 2 or scale == 0:
        raise errors.ConstantData('observations are constant')

    residual = z - posterior_mean(model, model.data.X)
    return float(numpy.sqrt(numpy.mean(residual ** 2)) / scale)


@dataclasses.dataclass(frozen=True)
class LooRecord:
    index: int
    nll: float
    sq_error: float
    prediction: float
    params: kernels.ParamVector = None
    error: str = None

    @property
    def failed(self):
        return self.error is not None


def loo_refit(scheme, spec, data, jitter=linalg.DEFAULT_POLICY, jobs=1):
    '''Hold out each point in turn, re-run the whole scheme on the rest
    and predict the held-out value.

    A failed fold is recorded with NaN values; the sweep goes on.
    '''
    if data.n < 3:
        raise errors.ContractViolation('leave-one-out needs n >= 3')

    def fold(index):
        train = data.without(index)

        try:
            result = mle.fit(scheme, spec, train, jitter)
            model = FittedGP.build(spec, result.params, train, jitter)
            prediction = posterior_mean(model, data.X[index])
        except (errors.GpMleError, numpy.linalg.LinAlgError) as exc:
            logger.exception('fold %d of %s failed', index, data.name)
            return LooRecord(index, math.nan, math.nan, math.nan,
                             error=str(exc))

        return LooRecord(index, result.nll,
                         (data.z[index] - prediction) ** 2, prediction,
                         result.params)

    if jobs > 1:
        with concurrent.futures.ThreadPoolExecutor(jobs) as executor:
            return list(executor.map(fold, range(data.n)))

    return [fold(index) for index in range(data.n)]


def loo_summary(records, data):
    squared = numpy.array([r.sq_error for r in records if not r.failed])
    mse = float(numpy.mean(squared)) if squared.size else math.nan
    scale = float(numpy.std(data.z))

    return {
        'loo_mse': mse,
        'std_z': scale,
        'ratio': mse / scale if scale > 0 else math.nan,
        'n_folds': len(records),
        'n_failed': sum(1 for r in records if r.failed),
    }
