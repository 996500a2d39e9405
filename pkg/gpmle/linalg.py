# -*- mode: python; coding: utf-8 -*-
'''Cholesky factorization with an adaptive jitter ladder, plus the
conditioning and numerical-noise diagnostics.'''

import dataclasses
import enum
import logging

import numpy
from scipy import linalg

from . import errors

logger = logging.getLogger(__name__)

#: relative jitter levels, multiplied by sigma2, tried in order
DEFAULT_LADDER = (1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1e0, 1e1, 1e2)

#: the narrower escalation used by GPy
GPY_LADDER = (1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1)

#: absolute jitter always on the diagonal of the first attempt
MINIMAL_JITTER = 1e-8

#: below this the log-determinant condition number is undefined
LOGDET_FLOOR = 1e-12

DEFAULT_HALF_WIDTH = 1e-5
DEFAULT_NUM_POINTS = 100


@dataclasses.dataclass(frozen=True)
class JitterPolicy:
    '''The first attempt adds ``minimal``; attempt ``k + 1`` replaces it
    with ``levels[k] * sigma2``.'''

    levels: tuple = DEFAULT_LADDER
    minimal: float = MINIMAL_JITTER

    def __post_init__(self):
        levels = tuple(float(v) for v in self.levels)

        if any(v <= 0 for v in levels):
            raise errors.ContractViolation('jitter levels must be positive')
        if any(b <= a for a, b in zip(levels, levels[1:])):
            raise errors.ContractViolation(
                'jitter levels must be strictly increasing')
        if not float(self.minimal) >= 0:
            raise errors.ContractViolation('minimal jitter must be >= 0')

        object.__setattr__(self, 'levels', levels)
        object.__setattr__(self, 'minimal', float(self.minimal))

    def jitters(self, sigma2):
        return (self.minimal,) + tuple(v * sigma2 for v in self.levels)


DEFAULT_POLICY = JitterPolicy()


@dataclasses.dataclass(frozen=True, eq=False)
class JitteredCholesky:
    '''Lower factor ``L`` with ``L L^T = K + jitter_used I``'''

    L: numpy.ndarray
    jitter_used: float
    attempts: int

    def __post_init__(self):
        self.L.flags.writeable = False

    @property
    def n(self):
        return self.L.shape[0]

    def solve(self, b):
        return solve(self, b)

    def log_det(self):
        return log_det(self)

    def inverse(self):
        return linalg.cho_solve((self.L, True), numpy.eye(self.n),
                                check_finite=False)

    def reconstruct(self):
        return self.L @ self.L.T


def _factorize(A):
    try:
        L = linalg.cholesky(A, lower=True, check_finite=False)
    except linalg.LinAlgError:
        return None

    pivots = numpy.diag(L)
    if not (numpy.all(numpy.isfinite(L)) and numpy.all(pivots > 0)):
        return None

    return L


def cholesky_with_jitter(K, sigma2, policy=DEFAULT_POLICY):
    K = numpy.asarray(K, dtype=float)

    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise errors.ContractViolation(
            'expected a square matrix, got shape {}'.format(K.shape))
    if not sigma2 > 0:
        raise errors.ContractViolation('sigma2 must be positive')
    if not numpy.all(numpy.isfinite(K)):
        raise errors.AllJitterFailed('covariance matrix is not finite')

    diagonal = numpy.diag_indices_from(K)
    jitter = None

    for attempt, jitter in enumerate(policy.jitters(sigma2), 1):
        A = K.copy()
        A[diagonal] += jitter

        L = _factorize(A)

        if L is not None:
            if attempt > 1:
                logger.debug('factorized %dx%d matrix with jitter %g '
                             'after %d attempts',
                             K.shape[0], K.shape[0], jitter, attempt)
            return JitteredCholesky(L, jitter, attempt)

    raise errors.AllJitterFailed(
        'no jitter up to {:g} gives a positive definite matrix'
        .format(jitter),
        attempts=len(policy.levels) + 1,
        last_jitter=jitter,
    )


def solve(chol, b):
    b = numpy.asarray(b, dtype=float)

    if b.ndim not in (1, 2) or b.shape[0] != chol.n:
        raise errors.ContractViolation(
            'right-hand side of shape {} for a {}x{} factor'
            .format(b.shape, chol.n, chol.n))

    return linalg.cho_solve((chol.L, True), b, check_finite=False)


def log_det(chol):
    return 2.0 * float(numpy.sum(numpy.log(numpy.diag(chol.L))))


@dataclasses.dataclass(frozen=True, eq=False)
class ConditioningReport:
    eigenvalues: numpy.ndarray
    kappa: float
    kappa_logdet: float
    lower_bound: float
    upper_bound: float

    @property
    def log_det(self):
        return float(numpy.sum(numpy.log(self.eigenvalues)))

    def to_dict(self):
        return {
            'kappa': self.kappa,
            'kappa_logdet': self.kappa_logdet,
            'lower_bound': self.lower_bound,
            'upper_bound': self.upper_bound,
        }


def conditioning_report(K):
    '''Condition numbers of ``K`` and of its log-determinant.

    The latter is ``||K^-1||_F ||K||_F / |log det K|``, sandwiched
    between ``kappa / |log det K|`` and ``n kappa / |log det K|``.
    '''
    K = numpy.asarray(K, dtype=float)

    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise errors.ContractViolation(
            'expected a square matrix, got shape {}'.format(K.shape))

    eigenvalues = linalg.eigh(K, eigvals_only=True, check_finite=False)
    eigenvalues = eigenvalues[::-1].copy()

    if not eigenvalues[-1] > 0:
        raise errors.NotPositiveDefinite(
            'smallest eigenvalue is {:g}'.format(eigenvalues[-1]))

    kappa = float(eigenvalues[0] / eigenvalues[-1])
    logdet = float(numpy.sum(numpy.log(eigenvalues)))

    if abs(logdet) < LOGDET_FLOOR:
        raise errors.DegenerateLogDet(
            'log-determinant {:g} is too close to zero'.format(logdet))

    n = K.shape[0]
    lower = kappa / abs(logdet)
    upper = n * kappa / abs(logdet)

    value = float(linalg.norm(1.0 / eigenvalues) * linalg.norm(eigenvalues) /
                  abs(logdet))

    eigenvalues.flags.writeable = False

    return ConditioningReport(eigenvalues, kappa, value, lower, upper)


class NoiseQuantity(enum.Enum):
    QUADRATIC_FORM = 'quadratic_form'
    LOG_DET = 'log_det'
    FULL_NLL = 'full_nll'


@dataclasses.dataclass(frozen=True)
class Transect:
    center: float
    half_width: float
    num_points: int
    label: str = ''

    def points(self):
        return numpy.linspace(self.center - self.half_width,
                              self.center + self.half_width,
                              self.num_points)


@dataclasses.dataclass(frozen=True, eq=False)
class NoiseEstimate:
    delta: float
    transect: Transect
    quantity: NoiseQuantity
    t: numpy.ndarray = None
    values: numpy.ndarray = None
    fitted: numpy.ndarray = None


def measure_numerical_noise(f, center, half_width=DEFAULT_HALF_WIDTH,
                            num_points=DEFAULT_NUM_POINTS,
                            quantity=NoiseQuantity.FULL_NLL, label=''):
    '''Relative standard deviation of ``f`` around a local quadratic fit.

    ``f`` is sampled on ``num_points`` equispaced points of
    ``[center - half_width, center + half_width]``.
    '''
    if num_points < 10:
        raise errors.ContractViolation('at least 10 transect points needed')
    if not half_width > 0:
        raise errors.ContractViolation('half width must be positive')

    transect = Transect(float(center), float(half_width), int(num_points),
                        label)
    t = transect.points()
    values = numpy.array([f(ti) for ti in t], dtype=float)

    if not numpy.all(numpy.isfinite(values)):
        raise errors.NonFiniteObjective(
            'non-finite value on the transect around {:g}'.format(center))

    scale = abs(numpy.mean(values))
    if scale == 0:
        raise errors.ContractViolation(
            'relative noise is undefined for a zero-mean transect')

    fitted = numpy.polynomial.Polynomial.fit(t, values, 2)(t)
    delta = float(numpy.std(values - fitted) / scale)

    return NoiseEstimate(delta, transect, NoiseQuantity(quantity),
                         t, values, fitted)
