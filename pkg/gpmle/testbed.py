# -*- mode: python; coding: utf-8 -*-
'''Test functions, space-filling designs and the benchmark corpus.

Datasets are named ``<function>-<k>d`` (n = k times the dimension) or
``<function>-n<n>``.
'''

import csv
import dataclasses
import enum
import math
import re

import numpy
from scipy.spatial import distance

from . import errors
from . import kernels


#: design sizes of the corpus, as multiples of the dimension
SIZE_MULTIPLIERS = (3, 5, 10, 20)

#: Latin hypercubes drawn per maximin design
MDU_CANDIDATES = 200


@dataclasses.dataclass(frozen=True)
class TestFunction:
    name: str
    lower: tuple
    upper: tuple
    func: object = dataclasses.field(repr=False, compare=False)

    @property
    def d(self):
        return len(self.lower)

    @property
    def domain(self):
        return numpy.array(self.lower), numpy.array(self.upper)


def _branin(x):
    x1, x2 = x
    b = 5.1 / (4.0 * math.pi ** 2)
    c = 5.0 / math.pi
    t = 1.0 / (8.0 * math.pi)
    return ((x2 - b * x1 ** 2 + c * x1 - 6.0) ** 2 +
            10.0 * (1.0 - t) * math.cos(x1) + 10.0)


def _borehole(x):
    rw, r, tu, hu, tl, hl, length, kw = x
    log_ratio = math.log(r / rw)
    return (2.0 * math.pi * tu * (hu - hl) /
            (log_ratio * (1.0 + 2.0 * length * tu /
                          (log_ratio * rw ** 2 * kw) + tu / tl)))


def _welded_beam(x):
    h, length, t, b = x
    return 1.10471 * h ** 2 * length + 0.04811 * t * b * (14.0 + length)


def _g10(x):
    return x[0] + x[1] + x[2]


BRANIN = TestFunction('branin', (-5.0, 0.0), (10.0, 15.0), _branin)

BOREHOLE = TestFunction(
    'borehole',
    (0.05, 100.0, 63070.0, 990.0, 63.1, 700.0, 1120.0, 9855.0),
    (0.15, 50000.0, 115600.0, 1110.0, 116.0, 820.0, 1680.0, 12045.0),
    _borehole,
)

WELDED_BEAM = TestFunction(
    'welded_beam',
    (0.125, 0.1, 0.1, 0.125),
    (5.0, 10.0, 10.0, 5.0),
    _welded_beam,
)

G10 = TestFunction(
    'g10',
    (100.0, 1000.0, 1000.0) + (10.0,) * 5,
    (10000.0, 10000.0, 10000.0) + (1000.0,) * 5,
    _g10,
)

FUNCTIONS = {f.name: f for f in (BRANIN, BOREHOLE, WELDED_BEAM, G10)}

# registered, but their closed forms have not been transcribed yet
PENDING_FUNCTIONS = ('g10mod', 'g10modmod')


def get_function(name):
    try:
        return FUNCTIONS[name]
    except KeyError:
        pass

    if name in PENDING_FUNCTIONS:
        raise errors.UnknownFunction(
            '{} is registered but its closed form is not available yet'
            .format(name))

    raise errors.UnknownFunction('unknown test function {!r}'.format(name))


def evaluate(fn, x):
    x = numpy.asarray(x, dtype=float)
    lower, upper = fn.domain

    if x.shape != (fn.d,):
        raise errors.ContractViolation(
            '{} takes {} inputs, got shape {}'.format(fn.name, fn.d,
                                                      x.shape))

    slack = 1e-12 * (upper - lower)
    if numpy.any(x < lower - slack) or numpy.any(x > upper + slack):
        raise errors.OutOfDomain(
            '{} is outside the domain of {}'.format(x.tolist(), fn.name))

    return float(fn.func(x))


def evaluate_all(fn, X):
    return numpy.array([evaluate(fn, x) for x in numpy.atleast_2d(X)])


class DesignKind(enum.Enum):
    LHS_MDU = 'lhs-mdu'
    LHS = 'lhs'
    UNIFORM = 'uniform'


@dataclasses.dataclass(frozen=True)
class DesignSpec:
    kind: DesignKind
    n: int
    seed: int = 0
    candidates: int = MDU_CANDIDATES

    def __post_init__(self):
        object.__setattr__(self, 'kind', DesignKind(self.kind))

        if self.n < 1:
            raise errors.ContractViolation('a design needs n >= 1')
        if self.candidates < 1:
            raise errors.ContractViolation('need at least one candidate')


def latin_hypercube(n, d, rng):
    '''One point per stratum ``[i/n, (i+1)/n)`` in every coordinate'''
    strata = numpy.column_stack([rng.permutation(n) for _ in range(d)])
    return (strata + rng.random((n, d))) / n


def min_distance(points):
    if points.shape[0] < 2:
        return math.inf
    return float(distance.pdist(points).min())


def is_latin(unit_points):
    unit_points = numpy.asarray(unit_points, dtype=float)
    n = unit_points.shape[0]
    strata = numpy.minimum(numpy.floor(unit_points * n), n - 1).astype(int)

    return all(
        numpy.array_equal(numpy.sort(column), numpy.arange(n))
        for column in strata.T
    )


def unit_design(spec, d):
    rng = numpy.random.default_rng(spec.seed)

    if spec.kind is DesignKind.UNIFORM:
        return rng.random((spec.n, d))

    if spec.kind is DesignKind.LHS:
        return latin_hypercube(spec.n, d, rng)

    # the first candidate is the plain LHS of the same seed
    best = latin_hypercube(spec.n, d, rng)
    best_score = min_distance(best)

    for _ in range(spec.candidates - 1):
        candidate = latin_hypercube(spec.n, d, rng)
        score = min_distance(candidate)

        if score > best_score:
            best, best_score = candidate, score

    return best


def generate_design(spec, domain):
    lower, upper = (numpy.asarray(b, dtype=float) for b in domain)
    return lower + unit_design(spec, lower.shape[0]) * (upper - lower)


def make_dataset(fn, spec, dataset_id=None):
    X = generate_design(spec, fn.domain)
    z = evaluate_all(fn, X)

    meta = {
        'function': fn.name,
        'n': spec.n,
        'seed': spec.seed,
        'design': spec.kind.value,
    }
    if dataset_id:
        meta['id'] = dataset_id

    return kernels.Dataset(X, z, meta)


def uniform_split(fn, n_train, n_test, seed):
    '''Independent uniform training and test sets'''
    train = make_dataset(fn, DesignSpec(DesignKind.UNIFORM, n_train, seed))
    test = make_dataset(fn, DesignSpec(DesignKind.UNIFORM, n_test,
                                       seed + 1))
    return train, test


#
# Corpus
#

DATASET_ID = re.compile(r'^(?P<function>[a-z0-9_]+)-'
                        r'(?:(?P<mult>\d+)d|n(?P<n>\d+))$')


def parse_dataset_id(dataset_id):
    '''``(function, n)`` for a dataset id'''
    match = DATASET_ID.match(dataset_id)

    if not match:
        raise errors.ContractViolation(
            'invalid dataset id {!r}'.format(dataset_id))

    fn = get_function(match.group('function'))

    if match.group('mult'):
        n = int(match.group('mult')) * fn.d
    else:
        n = int(match.group('n'))

    if n < 1:
        raise errors.ContractViolation(
            'dataset {!r} has no points'.format(dataset_id))

    return fn, n


def corpus_ids(functions=None, multipliers=SIZE_MULTIPLIERS):
    '''Ids of every dataset whose function is available'''
    names = sorted(FUNCTIONS) if functions is None else functions
    return ['{}-{}d'.format(name, k)
            for name in names if name in FUNCTIONS
            for k in multipliers]


def corpus_complete():
    return not PENDING_FUNCTIONS


def build_dataset(dataset_id, seed, kind=DesignKind.LHS_MDU):
    fn, n = parse_dataset_id(dataset_id)
    return make_dataset(fn, DesignSpec(kind, n, seed), dataset_id)


#
# CSV
#

META_ORDER = ('function', 'n', 'seed', 'design')


def write_dataset_csv(dataset, path):
    keys = [k for k in META_ORDER if k in dataset.meta]
    keys += sorted(k for k in dataset.meta if k not in META_ORDER)

    with open(path, 'w', newline='') as fp:
        for key in keys:
            fp.write('# {}: {}\n'.format(key, dataset.meta[key]))

        writer = csv.writer(fp, lineterminator='\n')
        writer.writerow(['x_{}'.format(k + 1) for k in range(dataset.d)] +
                        ['z'])

        for x, z in zip(dataset.X, dataset.z):
            writer.writerow([repr(float(v)) for v in x] + [repr(float(z))])


def _meta_value(value):
    try:
        return int(value)
    except ValueError:
        return value


def read_dataset_csv(path):
    meta = {}
    lines = []

    with open(path, newline='') as fp:
        for line in fp:
            if line.startswith('#'):
                key, _, value = line[1:].partition(':')
                meta[key.strip()] = _meta_value(value.strip())
            elif line.strip():
                lines.append(line)

    rows = list(csv.reader(lines))

    if not rows or rows[0][-1] != 'z':
        raise errors.ContractViolation(
            '{}: expected a header ending in a z column'.format(path))

    values = numpy.array(rows[1:], dtype=float).reshape(-1, len(rows[0]))

    return kernels.Dataset(values[:, :-1], values[:, -1], meta)
