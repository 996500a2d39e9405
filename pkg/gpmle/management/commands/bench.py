import json
import logging
import os
import sys

from django.conf import settings
from django.core import exceptions
from django.core.management import base

from ... import bench
from ... import errors
from ... import kernels
from ... import linalg
from ... import mle
from ... import schemes
from ... import testbed
from ... import util

logger = logging.getLogger(__name__)

CONFIG_ERROR = 2
FAILURE = 1


def ratio_list(value):
    return [float(v) for v in value.split(',') if v.strip()]


def _scheme(value):
    '''A preset name or the path of a JSON scheme file'''
    if os.path.isfile(value):
        with open(value) as fp:
            return schemes.SchemeConfig.from_dict(json.load(fp))
    return schemes.get_preset(value)


def _function(name):
    try:
        return testbed.get_function(name)
    except errors.UnknownFunction as exc:
        raise base.CommandError(str(exc), returncode=CONFIG_ERROR)


def jitter_policy():
    return linalg.JitterPolicy(settings.GPMLE_JITTER_LADDER,
                               settings.GPMLE_MINIMAL_JITTER)


class Command(base.BaseCommand):
    help = 'Benchmark maximum likelihood schemes for GP interpolation'

    def add_arguments(self, parser):
        sub = parser.add_subparsers(dest='action', required=True)

        p = sub.add_parser('run', help='run an experiment matrix')
        p.add_argument('--config', required=True,
                       help='JSON description of the matrix')
        p.add_argument('--out', required=True, help='output directory')
        p.add_argument('--jobs', type=int, default=None,
                       help='cells to fit in parallel')
        p.add_argument('--seed', type=int, default=None,
                       help='master seed, overriding the config')
        p.add_argument('--format', dest='fmt', default='csv',
                       choices=[f.value for f in bench.Format],
                       help='format of the result table')

        p = sub.add_parser('ecdf', help='ECDF and area tables of a run')
        p.add_argument('--in', dest='indir', required=True,
                       help='directory written by "run"')
        p.add_argument('--reference', default=None,
                       help='name of the reference scheme')
        p.add_argument('--out', required=True, help='area table (CSV)')
        p.add_argument('--nll-max', type=float, default=None)
        p.add_argument('--aggregate', default='pool',
                       choices=[a.value for a in bench.Aggregate],
                       help='how repetitions enter the distribution')
        p.add_argument('--scheme', action='append', dest='scheme_names',
                       help='restrict to the given schemes')

        p = sub.add_parser('jitter', help='influence of the jitter')
        p.add_argument('--function', default='branin')
        p.add_argument('--n', type=int, default=20)
        p.add_argument('--ratios', type=ratio_list,
                       default=list(bench.DEFAULT_RATIOS))
        p.add_argument('--scheme', default='default',
                       help='scheme that picks the ranges of the scenario')
        p.add_argument('--seed', type=int, default=None)
        p.add_argument('--half-width', type=float,
                       default=linalg.DEFAULT_HALF_WIDTH)
        p.add_argument('--points', type=int,
                       default=linalg.DEFAULT_NUM_POINTS)
        p.add_argument('--transect-out', default=None,
                       help='write the raw transect samples here')
        p.add_argument('--out', required=True)

        p = sub.add_parser('loo', help='leave-one-out with refits')
        p.add_argument('--function', default='borehole')
        size = p.add_mutually_exclusive_group()
        size.add_argument('--n-mult', type=int, default=3,
                          help='points per input dimension')
        size.add_argument('--n', type=int, default=None)
        p.add_argument('--scheme', action='append', dest='scheme_names')
        p.add_argument('--repetitions', type=int, default=1)
        p.add_argument('--seed', type=int, default=None)
        p.add_argument('--jobs', type=int, default=None)
        p.add_argument('--summary-out', default=None)
        p.add_argument('--out', required=True)

        p = sub.add_parser('fit', help='fit one dataset, print JSON')
        p.add_argument('--data', required=True, help='dataset CSV')
        p.add_argument('--scheme', default='improved')
        p.add_argument('--seed', type=int, default=None)

        p = sub.add_parser('compare', help='schemes on a train/test split')
        p.add_argument('--function', default='branin')
        p.add_argument('--n', type=int, default=50)
        p.add_argument('--test', type=int, default=500)
        p.add_argument('--scheme', action='append', dest='scheme_names')
        p.add_argument('--seed', type=int, default=None)
        p.add_argument('--out', required=True)

        p = sub.add_parser('profile',
                           help='NLL along the start to optimum path')
        p.add_argument('--function', default='branin')
        p.add_argument('--n', type=int, default=20)
        p.add_argument('--scheme', default='improved')
        p.add_argument('--points', type=int, default=101)
        p.add_argument('--seed', type=int, default=None)
        p.add_argument('--out', required=True)

    def handle(self, *args, action, **options):
        if options.get('jobs') is None:
            options['jobs'] = settings.BENCH_JOBS

        # run falls back to the seed of its config file
        if options.get('seed') is None and action != 'run':
            options['seed'] = settings.BENCH_MASTER_SEED

        try:
            return getattr(self, 'handle_' + action)(**options)
        except exceptions.ValidationError as exc:
            raise base.CommandError(
                'invalid configuration: ' + '; '.join(exc.messages),
                returncode=CONFIG_ERROR)
        except errors.FitFailed as exc:
            raise base.CommandError(str(exc), returncode=FAILURE)

    def _emit(self, rows, path, columns, fmt='csv'):
        bench.emit(rows, path, fmt, columns)
        self.stderr.write('wrote {} row(s) to {}'.format(len(rows), path))

    def handle_run(self, config, out, jobs, seed, fmt, verbosity,
                   **kwargs):
        try:
            with open(config) as fp:
                data = json.load(fp)
        except (OSError, ValueError) as exc:
            raise base.CommandError(
                'cannot read {}: {}'.format(config, exc),
                returncode=CONFIG_ERROR)

        matrix = bench.ExperimentMatrix.from_config(
            data,
            seed=seed,
            default_seed=settings.BENCH_MASTER_SEED,
            repetitions=settings.BENCH_REPETITIONS,
            reference=settings.BENCH_REFERENCE,
            kernel=settings.GPMLE_KERNEL,
        )

        if matrix.incomplete:
            logger.warning('pending test functions were skipped, the '
                           'matrix is incomplete')

        rows = bench.run_matrix(matrix, jobs, jitter_policy(),
                                settings.BENCH_PROGRESS and verbosity > 0)

        os.makedirs(out, exist_ok=True)
        bench.write_results(rows, out)

        if fmt != 'csv':
            self._emit(rows, os.path.join(out, 'results.' + fmt),
                       bench.ResultRow.COLUMNS, fmt)

        with open(os.path.join(out, bench.MATRIX_FILE), 'w') as fp:
            fp.write(util.dump_json(dict(matrix.to_dict(),
                                         incomplete=matrix.incomplete),
                                    indent=2))
            fp.write('\n')

        failed = [row for row in rows if row.failed]
        if failed:
            raise base.CommandError(
                '{} of {} cells failed'.format(len(failed), len(rows)),
                returncode=FAILURE)

    def handle_ecdf(self, indir, reference, out, nll_max, aggregate,
                    scheme_names, **kwargs):
        reference = reference or settings.BENCH_REFERENCE
        nll_max = nll_max or settings.BENCH_NLL_MAX

        rows = bench.read_results(indir)

        if not scheme_names:
            scheme_names = sorted({row.scheme for row in rows} - {reference})

        try:
            table = bench.area_vs_runtime(rows, reference, scheme_names,
                                          nll_max, aggregate)
            reports = [bench.ecdf_of_differences(rows, name, reference,
                                                 aggregate)
                       for name in scheme_names]
        except errors.MissingReference as exc:
            raise base.CommandError(str(exc), returncode=FAILURE)

        self._emit(table, out, ('scheme', 'area', 'n_diffs', 'n_negative',
                                'n_failed', 'mean_fit_time',
                                'mean_total_time'))

        stem, ext = os.path.splitext(out)
        self._emit(bench.ecdf_step_rows(reports), stem + '-steps' + ext,
                   ('scheme', 'diff', 'ecdf'))

    def handle_jitter(self, function, n, ratios, scheme, seed, half_width,
                      points, transect_out, out, **kwargs):
        if function != 'branin':
            raise base.CommandError(
                'the jitter study is defined on branin only',
                returncode=CONFIG_ERROR)

        policy = jitter_policy()
        spec, data, params = bench.stall_scenario(
            seed, n, _scheme(scheme), settings.GPMLE_KERNEL, policy)

        transects = [] if transect_out else None
        table = bench.jitter_study(spec, data, params, ratios, policy,
                                   half_width, points, transects)

        self._emit(table, out, bench.JITTER_COLUMNS)

        if transect_out:
            self._emit(transects, transect_out, bench.TRANSECT_COLUMNS)

    def handle_loo(self, function, n_mult, n, scheme_names, repetitions,
                   seed, jobs, summary_out, out, **kwargs):
        fn = _function(function)
        folds, summary = bench.loo_study(
            fn, n or n_mult * fn.d,
            [_scheme(s) for s in scheme_names or ['default', 'improved']],
            seed, repetitions, settings.GPMLE_KERNEL, jitter_policy(), jobs)

        self._emit(folds, out, bench.LOO_COLUMNS)

        if not summary_out:
            stem, ext = os.path.splitext(out)
            summary_out = stem + '-summary' + ext

        self._emit(summary, summary_out, bench.LOO_SUMMARY_COLUMNS)

    def handle_fit(self, data, scheme, seed, **kwargs):
        try:
            dataset = testbed.read_dataset_csv(data)
        except (OSError, ValueError) as exc:
            raise base.CommandError('cannot read {}: {}'.format(data, exc),
                                    returncode=CONFIG_ERROR)

        spec = kernels.KernelSpec.from_dict(settings.GPMLE_KERNEL, dataset.d)
        config = _scheme(scheme).replace(seed=seed)

        try:
            result = mle.fit(config, spec, dataset, jitter_policy())
        except errors.GpMleError as exc:
            raise base.CommandError(str(exc), returncode=FAILURE)

        self.stdout.write(util.dump_json(dict(result.to_dict(),
                                              kernel=spec.to_dict()),
                                         indent=2))

    def handle_compare(self, function, n, test, scheme_names, seed, out,
                       **kwargs):
        table = bench.compare_schemes(
            _function(function), n, test,
            [_scheme(s) for s in scheme_names or ['default', 'improved']],
            seed, settings.GPMLE_KERNEL, jitter_policy())

        self._emit(table, out, bench.COMPARE_COLUMNS)

    def handle_profile(self, function, n, scheme, points, seed, out,
                       **kwargs):
        fn = _function(function)
        policy = jitter_policy()

        data = testbed.build_dataset('{}-n{}'.format(fn.name, n), seed)
        spec = kernels.KernelSpec.from_dict(settings.GPMLE_KERNEL, fn.d)

        start = mle.init_constant(data)
        end = mle.fit(_scheme(scheme).replace(seed=seed), spec, data,
                      policy).params

        self._emit(bench.reparam_profiles(spec, data, start, end, points,
                                          policy),
                   out, bench.PROFILE_COLUMNS)


def main(argv=None):
    '''Entry point of the ``bench`` console script'''
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'benchsite.settings')

    from django.core.management import execute_from_command_line

    argv = sys.argv if argv is None else argv
    execute_from_command_line([argv[0], 'bench'] + list(argv[1:]))
