# -*- mode: python; coding: utf-8 -*-
'''Benchmark experiments over optimization schemes.

A matrix runs every scheme on every dataset (repeatedly for stochastic
schemes) plus a brute-force reference scheme once per dataset. Schemes
are compared through the empirical distribution of their NLL excess
over the reference, summarized by the area under that ECDF.
'''

import collections
import concurrent.futures
import csv
import dataclasses
import enum
import logging
import math
import os
import time

import numpy
import openpyxl
from django.core.exceptions import ValidationError

from . import errors
from . import kernels
from . import likelihood
from . import linalg
from . import mle
from . import predict
from . import schemes
from . import testbed
from . import util

logger = logging.getLogger(__name__)

DEFAULT_NLL_MAX = 100.0
DEFAULT_KERNEL = {'family': 'matern', 'nu': 2.5}
DEFAULT_RATIOS = (0.0, 1e-8, 1e-6, 1e-4, 1e-2)

#: a difference below this counts as the scheme beating the reference
NEGATIVE_DIFF = -1e-6


class Format(enum.Enum):
    CSV = 'csv'
    JSON = 'json'
    XLSX = 'xlsx'


class Aggregate(enum.Enum):
    POOL = 'pool'
    MEAN = 'mean'


def budget(scheme):
    if scheme.restart.kind is schemes.RestartKind.MULTISTART:
        return scheme.restart.n_opt
    return 1


def dataset_seed(master, dataset_id):
    return util.derive_seed(master, 'dataset', dataset_id)


def cell_seed(master, dataset_id, repetition):
    '''Shared by every scheme, so multi-start runs with the same index
    start from the same point whatever the budget'''
    return util.derive_seed(master, 'cell', dataset_id, repetition)


#
# Experiment matrix
#

MATRIX_KEYS = ('schemes', 'reference', 'datasets', 'repetitions', 'seed',
               'kernel', 'design')


@dataclasses.dataclass(frozen=True)
class Cell:
    scheme: str
    dataset: str
    repetition: int

    @property
    def key(self):
        return self.scheme, self.dataset, self.repetition


KERNEL_KEYS = ('family', 'nu')


def parse_kernel(data):
    '''Check a kernel description; the dimension is fixed per dataset'''
    schemes.check_keys(data, KERNEL_KEYS, 'kernel')

    try:
        kernels.KernelSpec.from_dict(data, 1)
    except (ValueError, TypeError) as exc:
        raise ValidationError('invalid kernel: %(error)s',
                              params={'error': exc}, code='invalid')

    return dict(data)


@dataclasses.dataclass(frozen=True)
class ExperimentMatrix:
    schemes: tuple
    reference: schemes.SchemeConfig
    datasets: tuple
    repetitions: int = 1
    seed: int = 0
    kernel: dict = dataclasses.field(
        default_factory=lambda: dict(DEFAULT_KERNEL), compare=False)
    design: testbed.DesignKind = testbed.DesignKind.LHS_MDU
    # datasets of pending functions were dropped
    incomplete: bool = False

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValidationError('repetitions must be at least 1',
                                  code='invalid')
        if not self.datasets:
            raise ValidationError('the matrix has no datasets',
                                  code='invalid')

        largest = max((budget(s) for s in self.schemes), default=1)
        if budget(self.reference) < largest:
            raise ValidationError(
                'reference %(name)s has a smaller multi-start budget than '
                'the schemes it judges',
                params={'name': self.reference.name}, code='invalid')

    @classmethod
    def from_config(cls, data, seed=None, repetitions=None,
                    reference=None, kernel=None, default_seed=0):
        '''Build a matrix from its JSON form; keyword arguments supply
        defaults for missing keys, ``seed`` overrides the config.'''
        schemes.check_keys(data, MATRIX_KEYS, 'matrix')

        try:
            scheme_list = tuple(schemes.get_scheme(s)
                                for s in data['schemes'])
        except KeyError:
            raise ValidationError('the matrix needs a schemes list',
                                  code='required')
        except TypeError:
            raise ValidationError('schemes must be a list',
                                  code='invalid')

        ids = data.get('datasets', 'corpus')
        incomplete = False

        if ids == 'corpus':
            ids = testbed.corpus_ids()
            incomplete = not testbed.corpus_complete()

        datasets = []

        for dataset_id in ids:
            try:
                testbed.parse_dataset_id(dataset_id)
            except errors.UnknownFunction as exc:
                name = dataset_id.rsplit('-', 1)[0]
                if name not in testbed.PENDING_FUNCTIONS:
                    raise ValidationError(str(exc), code='invalid')
                logger.warning('skipping %s: %s', dataset_id, exc)
                incomplete = True
                continue
            except (errors.ContractViolation, TypeError, AttributeError):
                raise ValidationError('invalid dataset id %(id)r',
                                      params={'id': dataset_id},
                                      code='invalid')

            datasets.append(dataset_id)

        if seed is None:
            seed = data.get('seed', default_seed)

        return cls(
            schemes=scheme_list,
            reference=schemes.get_scheme(
                data.get('reference', reference or 'reference')),
            datasets=tuple(datasets),
            repetitions=int(data.get('repetitions', repetitions or 1)),
            seed=int(seed),
            kernel=parse_kernel(
                data.get('kernel', kernel or DEFAULT_KERNEL)),
            design=schemes.parse_enum(
                testbed.DesignKind, data.get('design', 'lhs-mdu'), 'design'),
            incomplete=incomplete,
        )

    def to_dict(self):
        return {
            'schemes': [s.to_dict() for s in self.schemes],
            'reference': self.reference.to_dict(),
            'datasets': list(self.datasets),
            'repetitions': self.repetitions,
            'seed': self.seed,
            'kernel': self.kernel,
            'design': self.design.value,
        }

    def cells(self):
        cells = [Cell(self.reference.name, d, 0) for d in self.datasets]

        for scheme in self.schemes:
            reps = self.repetitions if scheme.stochastic else 1
            cells.extend(Cell(scheme.name, d, r)
                         for d in self.datasets for r in range(reps))

        return sorted(cells, key=lambda c: c.key)

    def scheme(self, name):
        for scheme in (self.reference,) + self.schemes:
            if scheme.name == name:
                return scheme
        raise KeyError(name)


#
# Result rows
#

@dataclasses.dataclass(frozen=True)
class ResultRow:
    scheme: str
    dataset: str
    repetition: int
    nll: float
    termination: str = None
    n_evals: int = 0
    sigma2: float = None
    rho: tuple = None
    mu: float = None
    error: str = None
    wall_time: float = dataclasses.field(default=math.nan, compare=False)

    COLUMNS = ('scheme', 'dataset', 'repetition', 'nll', 'termination',
               'n_evals', 'sigma2', 'rho', 'mu', 'error')
    TIMING_COLUMNS = ('scheme', 'dataset', 'repetition', 'wall_time')

    @property
    def key(self):
        return self.scheme, self.dataset, self.repetition

    @property
    def failed(self):
        return self.error is not None

    def as_dict(self):
        return {f.name: getattr(self, f.name)
                for f in dataclasses.fields(self)}

    @classmethod
    def from_dict(cls, data):
        rho = data.get('rho')
        if isinstance(rho, str):
            rho = tuple(float(v) for v in rho.split(';'))
        elif isinstance(rho, (int, float)):
            rho = (float(rho),)
        elif rho is not None:
            rho = tuple(rho)

        def number(key):
            value = data.get(key)
            return math.nan if value is None else float(value)

        return cls(
            scheme=str(data['scheme']),
            dataset=str(data['dataset']),
            repetition=int(data['repetition']),
            nll=number('nll'),
            termination=data.get('termination'),
            n_evals=int(data.get('n_evals') or 0),
            sigma2=data.get('sigma2'),
            rho=rho,
            mu=data.get('mu'),
            error=data.get('error'),
            wall_time=number('wall_time'),
        )


def run_cell(cell, scheme, kernel, dataset, jitter=linalg.DEFAULT_POLICY):
    '''Fit one cell; any failure becomes a row carrying the error'''
    started = time.perf_counter()

    try:
        spec = kernels.KernelSpec.from_dict(kernel, dataset.d)
        result = mle.fit(scheme, spec, dataset, jitter)
    except Exception as exc:
        logger.exception('cell %s/%s/%d failed', *cell.key)
        return ResultRow(*cell.key, nll=math.nan,
                         error='{}: {}'.format(type(exc).__name__, exc),
                         wall_time=time.perf_counter() - started)

    return ResultRow(
        *cell.key,
        nll=result.nll,
        termination=result.termination.value,
        n_evals=result.n_nll_evals,
        sigma2=result.params.sigma2,
        rho=result.params.rho,
        mu=result.params.mu,
        wall_time=result.wall_time,
    )


def run_matrix(matrix, jobs=1, jitter=linalg.DEFAULT_POLICY,
               progress=False):
    '''Run every cell of ``matrix``; rows come back sorted by cell key.'''
    datasets = {
        dataset_id: testbed.build_dataset(
            dataset_id, dataset_seed(matrix.seed, dataset_id),
            matrix.design)
        for dataset_id in matrix.datasets
    }

    cells = matrix.cells()

    def run(cell):
        scheme = matrix.scheme(cell.scheme).replace(
            seed=cell_seed(matrix.seed, cell.dataset, cell.repetition))
        return run_cell(cell, scheme, matrix.kernel,
                        datasets[cell.dataset], jitter)

    logger.info('running %d cells on %d datasets with %d job(s)',
                len(cells), len(datasets), jobs)

    bar = util.progress_bar('Fitting', len(cells), progress)
    rows = []

    try:
        with concurrent.futures.ThreadPoolExecutor(jobs) as executor:
            for row in executor.map(run, cells):
                rows.append(row)
                if bar:
                    bar.next()
    finally:
        if bar:
            bar.finish()

    failed = sum(1 for row in rows if row.failed)
    if failed:
        logger.warning('%d of %d cells failed', failed, len(rows))

    return sorted(rows, key=lambda row: row.key)


#
# ECDF of NLL differences
#

@dataclasses.dataclass(frozen=True, eq=False)
class EcdfReport:
    scheme: str
    reference: str
    diffs: numpy.ndarray
    aggregate: Aggregate = Aggregate.POOL
    n_failed: int = 0

    @property
    def n_negative(self):
        return int(numpy.count_nonzero(self.diffs < NEGATIVE_DIFF))

    def ecdf(self, e):
        '''Fraction of differences <= e'''
        counts = numpy.searchsorted(self.diffs, e, side='right')
        return counts / self.diffs.size

    def steps(self):
        '''(difference, ECDF) at every jump, failures excluded'''
        finite = self.diffs[numpy.isfinite(self.diffs)]
        values = numpy.unique(finite)
        return [(float(v), float(self.ecdf(v))) for v in values]


def _as_rows(rows):
    return [row if isinstance(row, ResultRow) else ResultRow.from_dict(row)
            for row in rows]


def ecdf_of_differences(rows, scheme, reference,
                        aggregate=Aggregate.POOL):
    '''NLL of ``scheme`` minus the reference NLL of the same dataset.

    A failed cell counts as an infinite difference. ``MEAN`` averages
    the repetitions of each dataset before building the distribution.
    '''
    rows = _as_rows(rows)
    aggregate = Aggregate(aggregate)

    references = {
        row.dataset: row.nll
        for row in rows
        if row.scheme == reference and row.repetition == 0
    }

    per_dataset = collections.defaultdict(list)
    failed = 0

    for row in rows:
        if row.scheme != scheme:
            continue

        base = references.get(row.dataset)
        if base is None or not math.isfinite(base):
            raise errors.MissingReference(
                'no reference result for dataset {}'.format(row.dataset))

        if row.failed or not math.isfinite(row.nll):
            failed += 1
            per_dataset[row.dataset].append(math.inf)
        else:
            per_dataset[row.dataset].append(row.nll - base)

    if not per_dataset:
        raise errors.ContractViolation(
            'no results for scheme {!r}'.format(scheme))

    if aggregate is Aggregate.MEAN:
        diffs = [numpy.mean(v) for k, v in sorted(per_dataset.items())]
    else:
        diffs = [d for k, v in sorted(per_dataset.items()) for d in v]

    return EcdfReport(scheme, reference, numpy.sort(numpy.array(diffs)),
                      aggregate, failed)


def area_under_ecdf(report, nll_max=DEFAULT_NLL_MAX):
    '''Integral of the ECDF over [0, nll_max], scaled to [0, 100].

    Each difference contributes the length of the window to its right;
    negative differences count as zero.
    '''
    if not nll_max > 0:
        raise errors.ContractViolation('nll_max must be positive')

    credit = numpy.clip(nll_max - numpy.maximum(report.diffs, 0.0),
                        0.0, nll_max)
    return float(numpy.mean(credit) * 100.0 / nll_max)


def area_vs_runtime(rows, reference, scheme_names=None,
                    nll_max=DEFAULT_NLL_MAX, aggregate=Aggregate.POOL):
    '''One row per scheme: area under the ECDF and mean run times'''
    rows = _as_rows(rows)

    if scheme_names is None:
        scheme_names = sorted({row.scheme for row in rows})

    table = []

    for name in scheme_names:
        report = ecdf_of_differences(rows, name, reference, aggregate)
        mine = [row for row in rows if row.scheme == name]
        times = numpy.array([row.wall_time for row in mine])
        reps = len({row.repetition for row in mine})

        table.append({
            'scheme': name,
            'area': area_under_ecdf(report, nll_max),
            'n_diffs': int(report.diffs.size),
            'n_negative': report.n_negative,
            'n_failed': report.n_failed,
            'mean_fit_time': float(numpy.mean(times)),
            'mean_total_time': float(numpy.sum(times) / reps),
        })

        if report.n_negative:
            logger.warning('%s beats reference %s on %d cell(s)',
                           name, reference, report.n_negative)

    return table


def ecdf_step_rows(reports):
    return [
        {'scheme': report.scheme, 'diff': diff, 'ecdf': value}
        for report in reports
        for diff, value in report.steps()
    ]


#
# Jitter study
#

JITTER_COLUMNS = ('ratio', 'jitter_used', 'kappa', 'kappa_logdet',
                  'delta_quad', 'delta_logdet', 'nll',
                  'normalized_interp_error')

TRANSECT_COLUMNS = ('ratio', 'quantity', 't', 'value', 'fitted')


#: ratio at which the stalled model is matched to its interpolation error
STALL_RATIO = 1e-2

#: normalized interpolation error of the stalled model at ``STALL_RATIO``
STALL_ERROR = 0.75

#: bisection steps on the log of the range multiplier
STALL_STEPS = 60


def _ridge_point(spec, data, rho, scale, jitter):
    '''Mean and variance profiled at ranges ``scale * rho``'''
    return likelihood.profiled_params(spec, rho * scale, 0.0, data, jitter)


def _stall_error(spec, data, params, jitter):
    stalled = params.replace(noise=STALL_RATIO * params.sigma2)
    model = predict.FittedGP.build(spec, stalled, data, jitter)
    return predict.normalized_interp_error(model)


def stall_scenario(seed, n=20, scheme=schemes.DEFAULT, kernel=None,
                   jitter=linalg.DEFAULT_POLICY, target=STALL_ERROR):
    '''A Branin LHS sample and a stalled fit on it.

    The ranges of the fit found by ``scheme`` are stretched by a common
    factor along the profiled likelihood, toward the flat and badly
    conditioned region where optimizers stall, until the model with
    noise ratio ``STALL_RATIO`` has normalized interpolation error
    ``target``.
    '''
    data = testbed.build_dataset('branin-n{}'.format(n), seed)
    spec = kernels.KernelSpec.from_dict(kernel or DEFAULT_KERNEL, data.d)
    result = mle.fit(scheme.replace(seed=seed), spec, data, jitter)

    rho = result.params.rho_array

    def error(log_scale):
        params = _ridge_point(spec, data, rho, math.exp(log_scale), jitter)
        return _stall_error(spec, data, params, jitter) - target

    # the error grows toward 1 as the ranges go to infinity
    step = math.log(2.0)
    lo = hi = 0.0

    if error(0.0) < 0:
        while error(hi) < 0:
            hi += step
            if hi > STALL_STEPS * step:
                raise errors.GpMleError(
                    'no range multiplier reaches interpolation error {:g}'
                    .format(target))
    else:
        while error(lo) >= 0:
            lo -= step
            if lo < -STALL_STEPS * step:
                raise errors.GpMleError(
                    'no range multiplier gets below interpolation error {:g}'
                    .format(target))

    for _ in range(STALL_STEPS):
        if hi - lo < 1e-6:
            break
        middle = 0.5 * (lo + hi)
        if error(middle) < 0:
            lo = middle
        else:
            hi = middle

    scale = math.exp(hi if abs(error(hi)) <= abs(error(lo)) else lo)
    params = _ridge_point(spec, data, rho, scale, jitter)

    logger.info('stalled %s at %g times the fitted ranges',
                data.name, scale)

    return spec, data, params


def _range_transect(spec, data, params, jitter, term):
    rho = params.rho_array

    def f(t):
        quad, logdet, _ = likelihood.nll_terms(
            spec, params.replace(rho=rho * math.exp(t)), data, jitter)
        return quad if term == 'quad' else logdet

    return f


def jitter_study(spec, data, params, ratios=DEFAULT_RATIOS,
                 jitter=linalg.DEFAULT_POLICY,
                 half_width=linalg.DEFAULT_HALF_WIDTH,
                 num_points=linalg.DEFAULT_NUM_POINTS, transects=None):
    '''Diagnostics of ``params`` as the noise-to-variance ratio grows.

    Only the noise variance changes, to ``ratio * sigma2``. Transect
    samples are appended to ``transects`` when given.
    '''
    table = []

    for ratio in sorted(ratios):
        scenario = params.replace(noise=ratio * params.sigma2)

        K = kernels.covariance_matrix(spec, scenario, data.X)
        chol = linalg.cholesky_with_jitter(K, scenario.sigma2, jitter)
        report = linalg.conditioning_report(
            K + chol.jitter_used * numpy.eye(data.n))

        noise = {}

        for quantity, term in ((linalg.NoiseQuantity.QUADRATIC_FORM, 'quad'),
                               (linalg.NoiseQuantity.LOG_DET, 'logdet')):
            estimate = linalg.measure_numerical_noise(
                _range_transect(spec, data, scenario, jitter, term),
                0.0, half_width, num_points, quantity,
                label='log-range shift')
            noise[term] = estimate.delta

            if transects is not None:
                transects.extend(
                    {'ratio': ratio, 'quantity': quantity.value, 't': t,
                     'value': v, 'fitted': fv}
                    for t, v, fv in zip(estimate.t.tolist(),
                                        estimate.values.tolist(),
                                        estimate.fitted.tolist()))

        model = predict.FittedGP.build(spec, scenario, data, jitter)

        table.append({
            'ratio': ratio,
            'jitter_used': chol.jitter_used,
            'kappa': report.kappa,
            'kappa_logdet': report.kappa_logdet,
            'delta_quad': noise['quad'],
            'delta_logdet': noise['logdet'],
            'nll': likelihood.nll(spec, scenario, data, jitter),
            'normalized_interp_error':
                predict.normalized_interp_error(model),
        })

    return table


#
# Scheme comparison, likelihood profiles and leave-one-out
#

COMPARE_COLUMNS = ('scheme', 'sigma2', 'rho', 'mu', 'nll', 'ermspe',
                   'termination', 'wall_time')


def compare_schemes(fn, n_train, n_test, scheme_list, seed, kernel=None,
                    jitter=linalg.DEFAULT_POLICY):
    '''Fit each scheme on one uniform sample; score on a test sample'''
    train, test = testbed.uniform_split(fn, n_train, n_test, seed)
    spec = kernels.KernelSpec.from_dict(kernel or DEFAULT_KERNEL, fn.d)

    table = []

    for scheme in scheme_list:
        result = mle.fit(scheme.replace(seed=seed), spec, train, jitter)
        model = predict.FittedGP.build(spec, result.params, train, jitter)

        table.append({
            'scheme': scheme.name,
            'sigma2': result.params.sigma2,
            'rho': result.params.rho,
            'mu': result.params.mu,
            'nll': result.nll,
            'ermspe': predict.ermspe(model, test.X, test.z),
            'termination': result.termination.value,
            'wall_time': result.wall_time,
        })

    return table


PROFILE_COLUMNS = ('t', 'log', 'invsoftplus')


def reparam_profiles(spec, data, start, end, num_points=101,
                     jitter=linalg.DEFAULT_POLICY):
    '''NLL on the straight path from ``start`` to ``end``, once in log
    coordinates and once in invsoftplus coordinates.'''
    steps = numpy.linspace(0.0, 1.0, num_points)

    log_values = likelihood.nll_profile(
        spec, data, start, end, likelihood.Reparam.log(), steps, jitter)
    isp_values = likelihood.nll_profile(
        spec, data, start, end, likelihood.Reparam.invsoftplus(), steps,
        jitter)

    return [
        {'t': t, 'log': a, 'invsoftplus': b}
        for t, a, b in zip(steps.tolist(), log_values.tolist(),
                           isp_values.tolist())
    ]


LOO_COLUMNS = ('scheme', 'repetition', 'index', 'nll', 'sq_error',
               'prediction', 'sigma2', 'rho', 'mu', 'error')

LOO_SUMMARY_COLUMNS = ('scheme', 'repetitions', 'loo_mse_mean',
                       'loo_mse_std', 'ratio_mean', 'n_failed')


def loo_study(fn, n, scheme_list, seed, repetitions=1, kernel=None,
              jitter=linalg.DEFAULT_POLICY, jobs=1):
    '''Leave-one-out with refits, repeated over fresh LHS samples'''
    spec = kernels.KernelSpec.from_dict(kernel or DEFAULT_KERNEL, fn.d)

    folds = []
    summaries = collections.defaultdict(list)

    for rep in range(repetitions):
        data_seed = util.derive_seed(seed, 'loo', fn.name, n, rep)
        data = testbed.make_dataset(
            fn, testbed.DesignSpec(testbed.DesignKind.LHS_MDU, n, data_seed))

        for scheme in scheme_list:
            records = predict.loo_refit(scheme.replace(seed=data_seed),
                                        spec, data, jitter, jobs)
            summaries[scheme.name].append(predict.loo_summary(records,
                                                              data))

            for record in records:
                params = record.params
                folds.append({
                    'scheme': scheme.name,
                    'repetition': rep,
                    'index': record.index,
                    'nll': record.nll,
                    'sq_error': record.sq_error,
                    'prediction': record.prediction,
                    'sigma2': params.sigma2 if params else None,
                    'rho': params.rho if params else None,
                    'mu': params.mu if params else None,
                    'error': record.error,
                })

    summary = []

    for scheme in scheme_list:
        runs = summaries[scheme.name]
        mse = numpy.array([s['loo_mse'] for s in runs])

        summary.append({
            'scheme': scheme.name,
            'repetitions': len(runs),
            'loo_mse_mean': float(numpy.mean(mse)),
            'loo_mse_std': float(numpy.std(mse)),
            'ratio_mean': float(numpy.mean([s['ratio'] for s in runs])),
            'n_failed': sum(s['n_failed'] for s in runs),
        })

    return folds, summary


#
# Output
#

def _row_dict(row):
    return row.as_dict() if hasattr(row, 'as_dict') else dict(row)


def emit(rows, path, fmt=Format.CSV, columns=None):
    '''Write ``rows`` (dicts or result rows) to ``path``.

    Columns keep the given order; floats use their shortest round-trip
    text, so identical rows give identical files.
    '''
    fmt = Format(fmt)
    rows = [_row_dict(row) for row in rows]

    if columns is None:
        columns = list(rows[0]) if rows else []

    try:
        if fmt is Format.CSV:
            with open(path, 'w', newline='') as fp:
                writer = csv.writer(fp, lineterminator='\n')
                writer.writerow(columns)
                for row in rows:
                    writer.writerow([util.format_value(row.get(c))
                                     for c in columns])

        elif fmt is Format.JSON:
            with open(path, 'w', newline='\n') as fp:
                fp.write(util.dump_json(
                    [{c: row.get(c) for c in columns} for row in rows],
                    indent=2))
                fp.write('\n')

        else:
            wb = openpyxl.Workbook()
            ws = wb.active
            ws.title = os.path.splitext(os.path.basename(path))[0][:31]
            ws.append(list(columns))
            for row in rows:
                ws.append([_cell_value(row.get(c)) for c in columns])
            wb.save(path)

    except OSError as exc:
        raise OSError(exc.errno, 'cannot write {}: {}'.format(
            path, exc.strerror or exc), str(path)) from exc


def _cell_value(value):
    if isinstance(value, (list, tuple, numpy.ndarray)):
        return util.format_value(value)
    elif isinstance(value, enum.Enum):
        return value.value
    elif isinstance(value, float) and not math.isfinite(value):
        return util.format_value(value)
    return value


def read_rows(path):
    '''Rows of a CSV written by :func:`emit`, with numbers parsed'''
    try:
        with open(path, newline='') as fp:
            reader = csv.DictReader(fp)
            return [{k: util.parse_value(v) for k, v in row.items()}
                    for row in reader]
    except OSError as exc:
        raise OSError(exc.errno, 'cannot read {}: {}'.format(
            path, exc.strerror or exc), str(path)) from exc


RESULTS_FILE = 'results.csv'
TIMINGS_FILE = 'timings.csv'
MATRIX_FILE = 'matrix.json'


def write_results(rows, directory):
    '''The deterministic columns and the wall times, in two files'''
    os.makedirs(directory, exist_ok=True)

    emit(rows, os.path.join(directory, RESULTS_FILE),
         columns=ResultRow.COLUMNS)
    emit(rows, os.path.join(directory, TIMINGS_FILE),
         columns=ResultRow.TIMING_COLUMNS)


def read_results(directory):
    rows = read_rows(os.path.join(directory, RESULTS_FILE))
    timings_path = os.path.join(directory, TIMINGS_FILE)

    if os.path.exists(timings_path):
        timings = {
            (str(t['scheme']), str(t['dataset']), int(t['repetition'])):
            t['wall_time']
            for t in read_rows(timings_path)
        }
        for row in rows:
            key = (str(row['scheme']), str(row['dataset']),
                   int(row['repetition']))
            row['wall_time'] = timings.get(key)

    return [ResultRow.from_dict(row) for row in rows]
