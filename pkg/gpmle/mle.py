# -*- mode: python; coding: utf-8 -*-
'''Maximum likelihood estimation: initializations, the L-BFGS-B core
and restart / multi-start orchestration.'''

import concurrent.futures
import dataclasses
import enum
import logging
import math
import time

import numpy
from scipy import optimize

from . import errors
from . import kernels
from . import likelihood
from . import linalg
from . import schemes

logger = logging.getLogger(__name__)

EPS = numpy.finfo(float).eps


#
# Initialization
#

def init_constant(data):
    '''mu = 0, sigma2 = 1 and unit ranges'''
    return kernels.ParamVector(1.0, numpy.ones(data.d), 0.0, 0.0)


def moment_ranges(data):
    rho = numpy.std(data.X, axis=0)

    if not numpy.all(rho > 0):
        raise errors.DegenerateDesign(
            'input coordinates {} are constant'.format(
                numpy.flatnonzero(rho <= 0).tolist()))

    return rho


def init_moment_based(data):
    '''Empirical moments, population convention throughout.'''
    if data.n < 2:
        raise errors.ContractViolation('moments need at least two points')

    rho = moment_ranges(data)
    sigma2 = float(numpy.var(data.z))

    if not sigma2 > 0:
        raise errors.ConstantData('observations are constant')

    return kernels.ParamVector(sigma2, rho, 0.0, float(numpy.mean(data.z)))


def init_profiled(spec, data, rho=None, alpha=0.0,
                  jitter=linalg.DEFAULT_POLICY):
    if rho is None:
        rho = moment_ranges(data)
    return likelihood.profiled_params(spec, rho, alpha, data, jitter)


def grid_multipliers(levels=5, grid_min=0.02, grid_max=2.0):
    return numpy.geomspace(grid_min, grid_max, levels)


def grid_base_ranges(data):
    '''sqrt(d) times the extent of each coordinate'''
    extent = numpy.ptp(data.X, axis=0)

    if not numpy.all(extent > 0):
        raise errors.DegenerateDesign(
            'input coordinates {} are constant'.format(
                numpy.flatnonzero(extent <= 0).tolist()))

    return math.sqrt(data.d) * extent


def init_grid_search(spec, data, levels=5, grid_min=0.02, grid_max=2.0,
                     alpha=0.0, jitter=linalg.DEFAULT_POLICY, extra=()):
    '''Profile (mu, sigma2) on every scaled range vector of the grid and
    keep the one with the lowest NLL.

    ``extra`` appends candidate range vectors to the grid.
    '''
    if levels < 2:
        raise errors.ContractViolation('grid search needs two levels')

    base = grid_base_ranges(data)
    candidates = [a * base for a in grid_multipliers(levels, grid_min,
                                                     grid_max)]
    candidates.extend(numpy.asarray(rho, dtype=float) for rho in extra)

    best = None

    for rho in candidates:
        try:
            value, params = likelihood.profiled_nll(spec, rho, alpha, data,
                                                    jitter)
        except (errors.GpMleError, numpy.linalg.LinAlgError) as exc:
            logger.debug('grid point %s failed: %s', rho, exc)
            continue

        if best is None or value < best[0]:
            best = value, params

    if best is None:
        raise errors.InitFailed('every grid point failed to factorize')

    return best[1]


def initial_params(scheme, spec, data, jitter=linalg.DEFAULT_POLICY):
    init = scheme.init

    if init.kind is schemes.InitKind.CONSTANT:
        params = init_constant(data)
    elif init.kind is schemes.InitKind.MOMENT:
        params = init_moment_based(data)
    elif init.kind is schemes.InitKind.PROFILED:
        params = init_profiled(spec, data, alpha=init.alpha, jitter=jitter)
    else:
        params = init_grid_search(spec, data, init.levels, init.grid_min,
                                  init.grid_max, init.alpha, jitter)

    if not scheme.estimate_noise:
        params = params.replace(noise=0.0)

    return params


def make_reparam(reparam_id, data, estimate_noise=False):
    if reparam_id is schemes.ReparamId.LOG:
        return likelihood.Reparam.log()
    if reparam_id is schemes.ReparamId.INV_SOFTPLUS:
        return likelihood.Reparam.invsoftplus()

    std = numpy.std(data.X, axis=0)
    if not numpy.all(std > 0):
        raise errors.DegenerateDesign('cannot standardize constant inputs')

    scales = [1.0] + std.tolist() + ([1.0] if estimate_noise else [])
    return likelihood.Reparam.invsoftplus(scales)


#
# Optimizer core
#

class Termination(enum.Enum):
    PGTOL = 'pgtol'
    FACTR = 'factr'
    MAXITER = 'maxiter'
    LINE_SEARCH_FAILURE = 'line_search_failure'


def termination_from_message(message):
    if isinstance(message, bytes):
        message = message.decode('ascii', 'replace')

    message = message.upper().replace('_', ' ')

    if 'PROJECTED GRADIENT' in message:
        return Termination.PGTOL
    elif 'REDUCTION OF F' in message:
        return Termination.FACTR
    elif 'ITERATIONS' in message or 'EVALUATIONS' in message:
        return Termination.MAXITER
    else:
        return Termination.LINE_SEARCH_FAILURE


def projected_gradient(x, grad, lower, upper):
    '''The gradient with components pushing out of the box removed'''
    x = numpy.asarray(x, dtype=float)
    grad = numpy.asarray(grad, dtype=float)

    proj = numpy.clip(x - grad, lower, upper) - x
    return proj


@dataclasses.dataclass(frozen=True, eq=False)
class MinimizeResult:
    x: numpy.ndarray
    fun: float
    termination: Termination
    n_iter: int
    n_evals: int
    message: str = ''


def minimize(objective, start, stopping=schemes.SOFT, bounds=None):
    '''L-BFGS-B on ``objective(x) -> (value, gradient)``.

    A non-finite value away from the start is treated as a failed step
    and reported to the line search as ``inf``.
    '''
    start = numpy.array(start, dtype=float)
    size = start.shape[0]

    if bounds is None:
        lower = numpy.full(size, -numpy.inf)
        upper = numpy.full(size, numpy.inf)
    else:
        lower, upper = (numpy.array(b, dtype=float)
                        for b in zip(*bounds))

    if numpy.any(start < lower) or numpy.any(start > upper):
        raise errors.ContractViolation('start lies outside the box')

    value, _ = objective(start)
    if not math.isfinite(value):
        raise errors.NonFiniteObjective(
            'objective is {!r} at the start'.format(value))

    evals = [1]

    def wrapped(x):
        evals[0] += 1
        f, g = objective(x)
        if not math.isfinite(f):
            return math.inf, numpy.zeros(size)
        return f, g

    result = optimize.minimize(
        wrapped, start, jac=True, method='L-BFGS-B',
        bounds=optimize.Bounds(lower, upper),
        options={
            'maxiter': stopping.maxiter,
            'ftol': stopping.factr * EPS,
            'gtol': stopping.pgtol,
            'maxcor': 10,
            'maxls': 20,
        },
    )

    x = result.x
    fun = float(result.fun)

    if not math.isfinite(fun) or fun > value:
        x, fun = start, value

    termination = termination_from_message(result.message)

    logger.debug('L-BFGS-B stopped after %d iterations: %s (f=%r)',
                 result.nit, termination.value, fun)

    return MinimizeResult(x, fun, termination, int(result.nit), evals[0],
                          str(result.message))


#
# Fit
#

class Objective:
    '''The NLL and its gradient over the optimizer vector'''

    def __init__(self, spec, data, template, reparam,
                 jitter=linalg.DEFAULT_POLICY, estimate_noise=False):
        self.spec = spec
        self.data = data
        self.template = template
        self.reparam = reparam
        self.jitter = jitter
        self.estimate_noise = estimate_noise

    def params(self, vector):
        return likelihood.unpack(vector, self.template, self.reparam,
                                 self.estimate_noise)

    def __call__(self, vector):
        try:
            result = likelihood.nll_grad(
                self.spec, self.params(vector), self.data, self.reparam,
                self.jitter, self.estimate_noise)
        except (errors.GpMleError, numpy.linalg.LinAlgError) as exc:
            logger.debug('objective failed: %s', exc)
            return math.inf, numpy.zeros(len(vector))

        if not numpy.all(numpy.isfinite(result.grad)):
            return math.inf, numpy.zeros(len(vector))

        return result.value, result.grad


@dataclasses.dataclass(frozen=True)
class RunTrace:
    index: int
    start: kernels.ParamVector
    nll: float
    termination: Termination = None
    n_iter: int = 0
    n_evals: int = 0
    wall_time: float = 0.0
    error: str = None

    @property
    def failed(self):
        return self.error is not None

    def to_dict(self):
        return {
            'index': self.index,
            'start': self.start.to_dict(),
            'nll': self.nll,
            'termination': (self.termination.value
                            if self.termination else None),
            'n_iter': self.n_iter,
            'n_evals': self.n_evals,
            'error': self.error,
        }


@dataclasses.dataclass(frozen=True)
class FitResult:
    params: kernels.ParamVector
    nll: float
    n_nll_evals: int
    n_grad_evals: int
    wall_time: float
    runs: tuple
    scheme: str = ''
    best_run: int = 0

    @property
    def termination(self):
        return self.runs[self.best_run].termination

    def to_dict(self):
        return {
            'scheme': self.scheme,
            'params': self.params.to_dict(),
            'nll': self.nll,
            'termination': self.termination.value,
            'n_nll_evals': self.n_nll_evals,
            'n_grad_evals': self.n_grad_evals,
            'wall_time': self.wall_time,
            'runs': [run.to_dict() for run in self.runs],
        }


def perturbation_factors(rng, sigma_eta, size):
    '''Multipliers 10**eta with eta ~ N(0, sigma_eta**2)'''
    return 10.0 ** rng.normal(0.0, sigma_eta, size)


def run_rng(seed, index):
    return numpy.random.default_rng([int(seed), int(index)])


def perturbed_start(spec, data, init, scheme, index,
                    jitter=linalg.DEFAULT_POLICY):
    '''Multi-start run ``index``: ranges scaled by random powers of ten,
    then mean and variance profiled again.'''
    rng = run_rng(scheme.seed, index)
    rho = init.rho_array * perturbation_factors(
        rng, scheme.restart.sigma_eta, init.dim)

    params = likelihood.profiled_params(spec, rho, scheme.init.alpha, data,
                                        jitter)

    if not scheme.estimate_noise:
        params = params.replace(noise=0.0)

    return params


class _Fit:
    def __init__(self, scheme, spec, data, jitter):
        self.scheme = scheme
        self.spec = spec
        self.data = data
        self.jitter = jitter
        self.reparam = make_reparam(scheme.reparam, data,
                                    scheme.estimate_noise)

        if scheme.bounds is None:
            self.bounds = None
            return

        # sigma2, one range per input and the noise variance if estimated
        size = 1 + spec.dim + (1 if scheme.estimate_noise else 0)
        if len(scheme.bounds) != size:
            raise errors.ContractViolation(
                '{} has {} bounds but {} positive parameters in {} '
                'dimension(s)'.format(scheme.name, len(scheme.bounds), size,
                                      spec.dim))

        self.bounds = list(scheme.bounds) + [(-math.inf, math.inf)]

    def run(self, index, start):
        started = time.perf_counter()

        objective = Objective(self.spec, self.data, start, self.reparam,
                              self.jitter, self.scheme.estimate_noise)

        try:
            vector = likelihood.pack(start, self.reparam,
                                     self.scheme.estimate_noise)
            if self.bounds is not None:
                lower, upper = zip(*self.bounds)
                vector = numpy.clip(vector, lower, upper)

            outcome = minimize(objective, vector, self.scheme.stopping,
                               self.bounds)
        except errors.GpMleError as exc:
            logger.warning('run %d of %s failed: %s',
                           index, self.scheme.name, exc)
            trace = RunTrace(index, start, math.nan,
                             wall_time=time.perf_counter() - started,
                             error=str(exc))
            return trace, None

        trace = RunTrace(index, start, outcome.fun, outcome.termination,
                         outcome.n_iter, outcome.n_evals,
                         time.perf_counter() - started)

        logger.debug('run %d of %s: nll=%r (%s)', index, self.scheme.name,
                     outcome.fun, outcome.termination.value)

        return trace, (objective.params(outcome.x), outcome.fun)

    def single(self, init):
        trace, outcome = self.run(0, init)
        return [trace], [outcome]

    def restart(self, init):
        policy = self.scheme.restart
        traces = []
        outcomes = []
        incumbent = init
        best = None

        for index in range(policy.n_opt):
            trace, outcome = self.run(index, incumbent)
            traces.append(trace)
            outcomes.append(outcome)

            if outcome is None:
                break

            improved = (best is None or
                        outcome[1] < best[1] - schemes.RESTART_IMPROVEMENT)

            if best is None or outcome[1] < best[1]:
                best = outcome

            if index > 0 and not improved and not policy.exhaust:
                break

            incumbent = best[0]

        return traces, outcomes

    def multistart(self, init, jobs):
        policy = self.scheme.restart

        def job(index):
            if index == 0:
                return self.run(0, init)
            try:
                start = perturbed_start(self.spec, self.data, init,
                                        self.scheme, index, self.jitter)
            except (errors.GpMleError, numpy.linalg.LinAlgError) as exc:
                logger.warning('start %d of %s failed: %s',
                               index, self.scheme.name, exc)
                return RunTrace(index, init, math.nan, error=str(exc)), None
            return self.run(index, start)

        if jobs > 1:
            with concurrent.futures.ThreadPoolExecutor(jobs) as executor:
                results = list(executor.map(job, range(policy.n_opt)))
        else:
            results = [job(index) for index in range(policy.n_opt)]

        traces, outcomes = zip(*results)
        return list(traces), list(outcomes)


def fit(scheme, spec, data, jitter=linalg.DEFAULT_POLICY, jobs=1):
    '''Estimate the parameters of ``data`` under ``scheme``.

    Ties between runs go to the lowest run index, so the result does not
    depend on ``jobs``.
    '''
    started = time.perf_counter()

    if data.has_duplicate_rows() and not scheme.estimate_noise:
        logger.warning('%s has duplicate design points, the covariance '
                       'matrix is singular without jitter', data.name)

    worker = _Fit(scheme, spec, data, jitter)
    init = initial_params(scheme, spec, data, jitter)
    init_time = time.perf_counter() - started

    kind = scheme.restart.kind

    if kind is schemes.RestartKind.RESTART:
        traces, outcomes = worker.restart(init)
    elif kind is schemes.RestartKind.MULTISTART:
        traces, outcomes = worker.multistart(init, jobs)
    else:
        traces, outcomes = worker.single(init)

    candidates = [
        (outcome[1], index)
        for index, outcome in enumerate(outcomes)
        if outcome is not None
    ]

    if not candidates:
        raise errors.FitFailed(
            'all {} runs of {} failed'.format(len(traces), scheme.name),
            traces)

    _, best = min(candidates)
    params = outcomes[best][0]
    value = likelihood.nll(spec, params, data, jitter)

    evals = sum(trace.n_evals for trace in traces)
    wall_time = init_time + sum(trace.wall_time for trace in traces)

    logger.info('fitted %s with %s: nll=%r after %d run(s)',
                data.name, scheme.name, value, len(traces))

    return FitResult(params, value, evals, evals, wall_time, tuple(traces),
                     scheme.name, best)
