# -*- mode: python; coding: utf-8 -*-
'''Stationary covariance kernels and covariance assembly.

Every kernel has the form ``k(x, y) = sigma2 * r(h)`` where ``h`` is the
anisotropic scaled distance

    h^2 = sum_k (x_k - y_k)^2 / rho_k^2

and ``r`` the stationary correlation function of the family.
'''

import dataclasses
import enum
import math

import numpy
from scipy import special
from scipy.spatial import distance

from . import errors


SQRT3 = math.sqrt(3.0)
SQRT5 = math.sqrt(5.0)


class Family(enum.Enum):
    SQUARED_EXPONENTIAL = 'squared_exponential'
    RATIONAL_QUADRATIC = 'rational_quadratic'
    MATERN = 'matern'


DEFAULT_NU = {
    Family.RATIONAL_QUADRATIC: 1.0,
    Family.MATERN: 2.5,
}


@dataclasses.dataclass(frozen=True)
class KernelSpec:
    family: Family
    dim: int
    nu: float = None

    def __post_init__(self):
        family = Family(self.family)

        if int(self.dim) != self.dim or self.dim < 1:
            raise errors.ContractViolation(
                'kernel dimension must be a positive integer, got {!r}'
                .format(self.dim))

        if family is Family.SQUARED_EXPONENTIAL:
            nu = None
        else:
            nu = DEFAULT_NU[family] if self.nu is None else float(self.nu)

            if not nu > 0 or not math.isfinite(nu):
                raise errors.ContractViolation(
                    'nu must be positive, got {!r}'.format(self.nu))

        object.__setattr__(self, 'family', family)
        object.__setattr__(self, 'dim', int(self.dim))
        object.__setattr__(self, 'nu', nu)

    @classmethod
    def matern52(cls, dim):
        return cls(Family.MATERN, dim, 2.5)

    @classmethod
    def from_dict(cls, data, dim):
        return cls(Family(data.get('family', Family.MATERN.value)), dim,
                   data.get('nu'))

    def to_dict(self):
        data = {'family': self.family.value}
        if self.nu is not None:
            data['nu'] = self.nu
        return data

    def __str__(self):
        if self.nu is None:
            return self.family.value
        return '{}(nu={:g})'.format(self.family.value, self.nu)


@dataclasses.dataclass(frozen=True)
class ParamVector:
    '''Covariance parameters plus the constant mean.

    ``noise`` is the observation noise variance; zero means
    interpolation.
    '''

    sigma2: float
    rho: tuple
    noise: float = 0.0
    mu: float = 0.0

    def __post_init__(self):
        rho = tuple(float(r) for r in numpy.ravel(self.rho))
        sigma2 = float(self.sigma2)
        noise = float(self.noise)
        mu = float(self.mu)

        if not (sigma2 > 0 and math.isfinite(sigma2)):
            raise errors.NonPositiveParam(
                'sigma2 must be positive and finite, got {!r}'.format(sigma2))
        if not rho or not all(r > 0 and math.isfinite(r) for r in rho):
            raise errors.NonPositiveParam(
                'ranges must be positive and finite, got {!r}'.format(rho))
        if not (noise >= 0 and math.isfinite(noise)):
            raise errors.NonPositiveParam(
                'noise variance must be non-negative, got {!r}'.format(noise))
        if not math.isfinite(mu):
            raise errors.ContractViolation('mean must be finite')

        object.__setattr__(self, 'sigma2', sigma2)
        object.__setattr__(self, 'rho', rho)
        object.__setattr__(self, 'noise', noise)
        object.__setattr__(self, 'mu', mu)

    @property
    def dim(self):
        return len(self.rho)

    @property
    def rho_array(self):
        return numpy.array(self.rho)

    def positive(self, with_noise=False):
        '''The positive parameters (sigma2, rho_1..rho_d[, noise])'''
        values = (self.sigma2,) + self.rho
        if with_noise:
            values += (self.noise,)
        return numpy.array(values)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def check(self, spec):
        if self.dim != spec.dim:
            raise errors.ContractViolation(
                '{} ranges given for a {}-dimensional kernel'
                .format(self.dim, spec.dim))

    def to_dict(self):
        return {
            'sigma2': self.sigma2,
            'rho': list(self.rho),
            'noise': self.noise,
            'mu': self.mu,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(data['sigma2'], data['rho'], data.get('noise', 0.0),
                   data.get('mu', 0.0))


@dataclasses.dataclass(frozen=True, eq=False)
class Dataset:
    '''Design points ``X`` (n x d) and observations ``z`` (n).

    ``meta`` records provenance: test function, design kind and seed.
    Arrays are stored read-only.
    '''

    X: numpy.ndarray
    z: numpy.ndarray
    meta: dict = None

    def __post_init__(self):
        X = numpy.array(self.X, dtype=float)
        z = numpy.array(self.z, dtype=float).ravel()

        if X.ndim == 1:
            X = X[:, numpy.newaxis]

        if X.ndim != 2 or X.shape[0] < 1:
            raise errors.ContractViolation('X must be a non-empty n x d '
                                           'matrix')
        if X.shape[0] != z.shape[0]:
            raise errors.ContractViolation(
                '{} design points but {} observations'
                .format(X.shape[0], z.shape[0]))
        if not (numpy.all(numpy.isfinite(X)) and
                numpy.all(numpy.isfinite(z))):
            raise errors.ContractViolation('dataset contains non-finite '
                                           'values')

        X.flags.writeable = False
        z.flags.writeable = False

        object.__setattr__(self, 'X', X)
        object.__setattr__(self, 'z', z)
        object.__setattr__(self, 'meta', dict(self.meta or {}))

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def d(self):
        return self.X.shape[1]

    @property
    def name(self):
        return self.meta.get('id') or self.meta.get('function') or 'dataset'

    def has_duplicate_rows(self):
        return numpy.unique(self.X, axis=0).shape[0] < self.n

    def without(self, index):
        '''The dataset with point ``index`` held out'''
        keep = numpy.arange(self.n) != index
        meta = dict(self.meta, held_out=int(index))
        return Dataset(self.X[keep], self.z[keep], meta)


def _as_points(X, dim):
    X = numpy.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[numpy.newaxis, :]
    if X.ndim != 2 or X.shape[1] != dim:
        raise errors.ContractViolation(
            'expected points of dimension {}, got shape {}'
            .format(dim, X.shape))
    return X


def _check_ranges(rho):
    rho = numpy.asarray(rho, dtype=float)
    if not numpy.all(rho > 0):
        raise errors.ContractViolation('ranges must be positive')
    return rho


def scaled_distance(x, y, rho):
    x = numpy.asarray(x, dtype=float)
    y = numpy.asarray(y, dtype=float)
    rho = _check_ranges(rho)

    if not (x.ndim == y.ndim == rho.ndim == 1 and
            x.shape == y.shape == rho.shape):
        raise errors.ContractViolation(
            'dimension mismatch: x {}, y {}, rho {}'
            .format(x.shape, y.shape, rho.shape))

    return float(numpy.sqrt(numpy.sum(((x - y) / rho) ** 2)))


def scaled_distances(X, Y, rho):
    '''Pairwise scaled distances; ``Y=None`` gives the symmetric n x n
    matrix of ``X`` against itself with an exactly zero diagonal.'''
    rho = _check_ranges(rho)
    X = _as_points(X, rho.shape[0])

    if Y is None:
        return distance.squareform(distance.pdist(X / rho))

    Y = _as_points(Y, rho.shape[0])
    return distance.cdist(X / rho, Y / rho)


def matern_general(nu, h):
    '''The Bessel-function form of the Matérn correlation, any nu > 0'''
    h = numpy.asarray(h, dtype=float)
    scaled = numpy.atleast_1d(math.sqrt(2.0 * nu) * h)
    r = numpy.ones_like(scaled)

    pos = scaled > 0
    s = scaled[pos]
    r[pos] = (2.0 ** (1.0 - nu) / special.gamma(nu) *
              s ** nu * special.kv(nu, s))

    # kv underflows far out; the limit is zero
    r[pos & ~numpy.isfinite(r)] = 0.0

    return r.reshape(h.shape)


def _matern_dr_over_h(nu, h):
    shape = numpy.shape(h)
    h = numpy.atleast_1d(h)
    scaled = math.sqrt(2.0 * nu) * h
    out = numpy.zeros_like(h)

    pos = h > 0
    s = scaled[pos]
    out[pos] = -(2.0 ** (1.0 - nu) / special.gamma(nu) * 2.0 * nu *
                 s ** (nu - 1.0) * special.kv(nu - 1.0, s))
    out[pos & ~numpy.isfinite(out)] = 0.0

    return out.reshape(shape)


def correlation(spec, h):
    h = numpy.asarray(h, dtype=float)

    if numpy.any(h < 0):
        raise errors.ContractViolation('scaled distances must be >= 0')

    family = spec.family

    if family is Family.SQUARED_EXPONENTIAL:
        r = numpy.exp(-0.5 * h ** 2)
    elif family is Family.RATIONAL_QUADRATIC:
        r = (1.0 + h ** 2) ** -spec.nu
    elif spec.nu == 0.5:
        r = numpy.exp(-h)
    elif spec.nu == 1.5:
        r = (1.0 + SQRT3 * h) * numpy.exp(-SQRT3 * h)
    elif spec.nu == 2.5:
        r = (1.0 + SQRT5 * h + 5.0 / 3.0 * h ** 2) * numpy.exp(-SQRT5 * h)
    else:
        r = matern_general(spec.nu, h)

    return r[()] if r.ndim == 0 else r


def correlation_dr_over_h(spec, h):
    '''r'(h) / h, defined as 0 at h = 0.

    The range gradient is ``-sigma2 * r'(h)/h * (x_k - y_k)^2 / rho_k^3``
    and vanishes wherever h does, so the value at zero never matters.
    '''
    h = numpy.asarray(h, dtype=float)
    family = spec.family

    with numpy.errstate(divide='ignore', invalid='ignore'):
        if family is Family.SQUARED_EXPONENTIAL:
            g = -numpy.exp(-0.5 * h ** 2)
        elif family is Family.RATIONAL_QUADRATIC:
            g = -2.0 * spec.nu * (1.0 + h ** 2) ** (-spec.nu - 1.0)
        elif spec.nu == 0.5:
            g = -numpy.exp(-h) / h
        elif spec.nu == 1.5:
            g = -3.0 * numpy.exp(-SQRT3 * h)
        elif spec.nu == 2.5:
            g = -5.0 / 3.0 * (1.0 + SQRT5 * h) * numpy.exp(-SQRT5 * h)
        else:
            g = _matern_dr_over_h(spec.nu, h)

    g = numpy.where(h > 0, g, 0.0)
    return g[()] if g.ndim == 0 else g


def covariance_matrix(spec, params, X):
    params.check(spec)
    X = _as_points(X, spec.dim)

    K = params.sigma2 * correlation(
        spec, scaled_distances(X, None, params.rho_array))
    if params.noise:
        K[numpy.diag_indices_from(K)] += params.noise

    return K


def cross_covariance(spec, params, X, x):
    '''Covariances between the rows of ``X`` and ``x``.

    A single point gives an n-vector; an m x d block gives n x m. The
    noise variance never enters.
    '''
    params.check(spec)
    X = _as_points(X, spec.dim)
    x = numpy.asarray(x, dtype=float)

    k = params.sigma2 * correlation(
        spec, scaled_distances(X, x, params.rho_array))

    return k[:, 0] if x.ndim == 1 else k


def covariance_gradient(spec, params, X):
    '''dK/dtheta for theta = (sigma2, rho_1..rho_d, noise), in order'''
    params.check(spec)
    X = _as_points(X, spec.dim)
    rho = params.rho_array

    H = scaled_distances(X, None, rho)
    R = correlation(spec, H)
    G = correlation_dr_over_h(spec, H)

    grads = [R]

    for k in range(spec.dim):
        diff2 = (X[:, k, numpy.newaxis] - X[numpy.newaxis, :, k]) ** 2
        grads.append(-params.sigma2 * G * diff2 / rho[k] ** 3)

    grads.append(numpy.eye(X.shape[0]))

    return grads
