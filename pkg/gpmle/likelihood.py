# -*- mode: python; coding: utf-8 -*-
'''Negative log-likelihood, its gradient, and mean/variance profiling.

The optimizer works on a flat vector: the positive parameters
``(sigma2, rho_1..rho_d[, noise])`` mapped through a :class:`Reparam`,
followed by the untransformed mean ``mu``.
'''

import dataclasses
import enum
import logging
import math

import numpy
from scipy import optimize

from . import errors
from . import kernels
from . import linalg

logger = logging.getLogger(__name__)

LOG_2PI = math.log(2.0 * math.pi)

#: doublings of sigma2 tried when bracketing the profiled variance
MAX_BRACKET_STEPS = 60


class ReparamKind(enum.Enum):
    LOG = 'log'
    INV_SOFTPLUS = 'invsoftplus'


@dataclasses.dataclass(frozen=True)
class Reparam:
    '''Maps positive parameters to the real line.

    ``log``: theta' = log(theta)
    ``invsoftplus``: theta' = log(exp(theta / s) - 1)

    For invsoftplus, ``scales=None`` means s = 1 for every coordinate.
    '''

    kind: ReparamKind = ReparamKind.LOG
    scales: tuple = None

    def __post_init__(self):
        kind = ReparamKind(self.kind)
        scales = self.scales

        if kind is ReparamKind.LOG:
            if scales is not None:
                raise errors.ContractViolation('log takes no scales')
        elif scales is not None:
            scales = tuple(float(s) for s in scales)
            if not all(s > 0 and math.isfinite(s) for s in scales):
                raise errors.ContractViolation(
                    'invsoftplus scales must be positive, got {!r}'
                    .format(scales))

        object.__setattr__(self, 'kind', kind)
        object.__setattr__(self, 'scales', scales)

    @classmethod
    def log(cls):
        return cls(ReparamKind.LOG)

    @classmethod
    def invsoftplus(cls, scales=None):
        return cls(ReparamKind.INV_SOFTPLUS, scales)

    def _scales(self, size):
        if self.scales is None:
            return numpy.ones(size)
        if len(self.scales) != size:
            raise errors.ContractViolation(
                '{} scales for {} parameters'
                .format(len(self.scales), size))
        return numpy.array(self.scales)

    def forward(self, theta):
        theta = numpy.asarray(theta, dtype=float)

        if not numpy.all(theta > 0):
            raise errors.NonPositiveParam(
                'cannot transform non-positive parameters {!r}'
                .format(theta.tolist()))

        if self.kind is ReparamKind.LOG:
            return numpy.log(theta)

        x = theta / self._scales(theta.size).reshape(theta.shape)
        # log(exp(x) - 1) without overflow or cancellation
        return x + numpy.log(-numpy.expm1(-x))

    def backward(self, theta_p):
        theta_p = numpy.asarray(theta_p, dtype=float)

        if self.kind is ReparamKind.LOG:
            return numpy.exp(theta_p)

        s = self._scales(theta_p.size).reshape(theta_p.shape)
        return s * numpy.logaddexp(0.0, theta_p)

    def derivative(self, theta):
        '''d theta / d theta', as a function of theta'''
        theta = numpy.asarray(theta, dtype=float)

        if self.kind is ReparamKind.LOG:
            return theta.copy()

        s = self._scales(theta.size).reshape(theta.shape)
        return -s * numpy.expm1(-theta / s)

    def describe(self):
        if self.kind is ReparamKind.LOG:
            return 'log'
        if self.scales is None:
            return 'invsoftplus(s=1)'
        return 'invsoftplus(s={})'.format(
            ','.join('{:g}'.format(s) for s in self.scales))


def reparam_forward(reparam, theta):
    return reparam.forward(theta)


def reparam_backward(reparam, theta_p):
    return reparam.backward(theta_p)


def pack(params, reparam, estimate_noise=False):
    if reparam is None:
        positive = params.positive(estimate_noise)
    else:
        positive = reparam.forward(params.positive(estimate_noise))
    return numpy.append(positive, params.mu)


def unpack(vector, template, reparam, estimate_noise=False):
    '''Inverse of :func:`pack`; fixed fields come from ``template``'''
    vector = numpy.asarray(vector, dtype=float)
    size = template.dim + 1 + (1 if estimate_noise else 0)

    if vector.shape != (size + 1,):
        raise errors.ContractViolation(
            'expected {} coordinates, got {}'.format(size + 1, vector.shape))

    positive = vector[:size]
    if reparam is not None:
        positive = reparam.backward(positive)

    noise = positive[-1] if estimate_noise else template.noise

    return kernels.ParamVector(positive[0], positive[1:template.dim + 1],
                               noise, vector[-1])


@dataclasses.dataclass(frozen=True)
class NllValueGrad:
    value: float
    grad: numpy.ndarray


def _factorize(spec, params, data, jitter):
    K = kernels.covariance_matrix(spec, params, data.X)
    chol = linalg.cholesky_with_jitter(K, params.sigma2, jitter)
    residual = data.z - params.mu
    return chol, residual, chol.solve(residual)


def _value(chol, residual, a):
    quad = float(residual @ a)
    return 0.5 * quad + 0.5 * chol.log_det() + 0.5 * len(a) * LOG_2PI


def nll_terms(spec, params, data, jitter=linalg.DEFAULT_POLICY):
    '''The quadratic form and log-determinant separately, plus the factor'''
    chol, residual, a = _factorize(spec, params, data, jitter)
    return float(residual @ a), chol.log_det(), chol


def nll(spec, params, data, jitter=linalg.DEFAULT_POLICY):
    return _value(*_factorize(spec, params, data, jitter))


def nll_grad(spec, params, data, reparam=None, jitter=linalg.DEFAULT_POLICY,
             estimate_noise=False):
    '''Value and gradient over the packed vector.

    ``reparam=None`` differentiates in the natural coordinates.
    '''
    chol, residual, a = _factorize(spec, params, data, jitter)
    value = _value(chol, residual, a)

    dK = kernels.covariance_gradient(spec, params, data.X)
    if not estimate_noise:
        dK = dK[:-1]

    # 1/2 tr(K^-1 dK) - 1/2 a' dK a, with dK symmetric
    W = chol.inverse() - numpy.outer(a, a)
    grad = numpy.array([0.5 * numpy.sum(W * D) for D in dK])

    if reparam is not None:
        grad *= reparam.derivative(params.positive(estimate_noise))

    grad = numpy.append(grad, -numpy.sum(a))

    return NllValueGrad(value, grad)


def _gls(spec, rho, alpha, data, sigma2, jitter):
    '''Factor, mean and whitened residual on ``sigma2 (R + alpha I)``'''
    params = kernels.ParamVector(sigma2, rho, noise=alpha * sigma2)
    K = kernels.covariance_matrix(spec, params, data.X)
    chol = linalg.cholesky_with_jitter(K, sigma2, jitter)

    ones = numpy.ones(data.n)
    solved = chol.solve(numpy.column_stack([ones, data.z]))

    mu = float((ones @ solved[:, 1]) / (ones @ solved[:, 0]))
    residual = data.z - mu
    return chol, mu, residual, chol.solve(residual)


def _variance_slope(chol, residual, a):
    '''Twice sigma2 times dNLL/dsigma2 with an absolute jitter ``j``.

    K = sigma2 A + j I gives K^-1 A = (I - j K^-1) / sigma2.
    '''
    j = chol.jitter_used
    trace = numpy.trace(chol.inverse())
    return (len(a) - j * trace) - (residual @ a - j * (a @ a))


def _refine_variance(spec, rho, alpha, data, sigma2, jitter):
    '''Root of the variance derivative of the NLL that is actually
    factorized, bracketed by doubling away from ``sigma2``.'''

    def slope(t):
        chol, _, residual, a = _gls(spec, rho, alpha, data, math.exp(t),
                                    jitter)
        return _variance_slope(chol, residual, a)

    t0 = math.log(sigma2)
    f0 = slope(t0)

    if f0 == 0:
        return sigma2

    step = math.log(2.0) if f0 < 0 else -math.log(2.0)
    t1 = t0

    for _ in range(MAX_BRACKET_STEPS):
        t1 += step
        if slope(t1) * f0 <= 0:
            break
    else:
        logger.debug('no sign change of the variance derivative near %g, '
                     'keeping the closed form', sigma2)
        return sigma2

    t = optimize.brentq(slope, min(t0, t1), max(t0, t1), xtol=1e-14)
    return math.exp(t)


def profile_mean_var(spec, rho, alpha, data, jitter=linalg.DEFAULT_POLICY):
    '''Generalized least squares mean and variance for fixed ranges.

    The correlation matrix is ``R + alpha I``. The closed form ignores
    the absolute minimal jitter; when the factorization of
    ``sigma2 (R + alpha I)`` carries one, sigma2 is moved to the
    stationary point of that NLL.
    '''
    if not alpha >= 0:
        raise errors.ContractViolation('alpha must be non-negative')

    z = data.z
    n = data.n

    if numpy.ptp(z) == 0:
        raise errors.DegenerateProfile(
            'observations are constant, the variance profiles to zero')

    unit = kernels.ParamVector(1.0, rho, noise=alpha)
    K = kernels.covariance_matrix(spec, unit, data.X)
    chol = linalg.cholesky_with_jitter(K, 1.0, jitter)

    ones = numpy.ones(n)
    solved = chol.solve(numpy.column_stack([ones, z]))

    mu = float((ones @ solved[:, 1]) / (ones @ solved[:, 0]))
    residual = z - mu
    sigma2 = float(residual @ chol.solve(residual) / n)

    if not (math.isfinite(mu) and math.isfinite(sigma2) and sigma2 > 0):
        raise errors.DegenerateProfile(
            'profiled variance {!r} is not positive'.format(sigma2))

    chol, mu, _, _ = _gls(spec, rho, alpha, data, sigma2, jitter)

    # escalated jitter is relative to sigma2, the closed form is exact
    if chol.jitter_used == 0 or chol.attempts > 1:
        return mu, sigma2

    sigma2 = _refine_variance(spec, rho, alpha, data, sigma2, jitter)
    _, mu, _, _ = _gls(spec, rho, alpha, data, sigma2, jitter)

    return mu, sigma2


def profiled_params(spec, rho, alpha, data, jitter=linalg.DEFAULT_POLICY):
    mu, sigma2 = profile_mean_var(spec, rho, alpha, data, jitter)
    return kernels.ParamVector(sigma2, rho, alpha * sigma2, mu)


def profiled_nll(spec, rho, alpha, data, jitter=linalg.DEFAULT_POLICY):
    params = profiled_params(spec, rho, alpha, data, jitter)
    return nll(spec, params, data, jitter), params


def nll_profile(spec, data, start, end, reparam, steps,
                jitter=linalg.DEFAULT_POLICY):
    '''NLL along the straight line from ``start`` to ``end`` in the
    coordinates of ``reparam``; failed points are NaN.'''
    a = pack(start, reparam)
    b = pack(end, reparam)

    values = []

    for t in numpy.asarray(steps, dtype=float):
        try:
            params = unpack((1.0 - t) * a + t * b, start, reparam)
            values.append(nll(spec, params, data, jitter))
        except (errors.GpMleError, numpy.linalg.LinAlgError):
            values.append(math.nan)

    return numpy.array(values)
