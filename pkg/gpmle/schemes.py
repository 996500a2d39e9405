# -*- mode: python; coding: utf-8 -*-
'''Optimization schemes: how a fit is initialized, parameterized,
stopped and restarted, plus the named presets.

Schemes are read from and written to plain dicts so experiment matrices
can be described in JSON; see ``docs/overview.rst`` for the schema.
'''

import dataclasses
import enum
import math

from django.core.exceptions import ValidationError


class InitKind(enum.Enum):
    CONSTANT = 'constant'
    MOMENT = 'moment'
    PROFILED = 'profiled'
    GRID = 'grid'


class ReparamId(enum.Enum):
    LOG = 'log'
    INV_SOFTPLUS = 'invsoftplus'
    # scales set to the per-coordinate standard deviation of the inputs
    INV_SOFTPLUS_STD = 'invsoftplus-std'


class RestartKind(enum.Enum):
    NONE = 'none'
    RESTART = 'restart'
    MULTISTART = 'multistart'


#: about 95% of the 10**eta range multipliers fall within [1/5, 5]
SIGMA_ETA = math.log10(5.0) / 1.96

#: a restart must lower the NLL by more than this to count
RESTART_IMPROVEMENT = 1e-9


def check_keys(data, allowed, where):
    if not isinstance(data, dict):
        raise ValidationError('%(where)s must be an object',
                              params={'where': where}, code='invalid')

    unknown = sorted(set(data) - set(allowed))
    if unknown:
        raise ValidationError(
            'unknown key %(key)r in %(where)s',
            params={'key': unknown[0], 'where': where},
            code='unknown_key',
        )


def parse_enum(cls, value, where):
    try:
        return cls(value)
    except ValueError:
        raise ValidationError(
            'invalid %(where)s %(value)r, expected one of %(choices)s',
            params={
                'where': where,
                'value': value,
                'choices': ', '.join(m.value for m in cls),
            },
            code='invalid_choice',
        )


def _number(data, key, where, cast=float, default=None):
    value = data.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError('%(where)s.%(key)s must be a number',
                              params={'where': where, 'key': key},
                              code='invalid')
    return cast(value)


@dataclasses.dataclass(frozen=True)
class StoppingRule:
    maxiter: int = 1000
    factr: float = 1e7
    pgtol: float = 1e-5

    def __post_init__(self):
        if not (self.maxiter >= 1 and self.factr > 0 and self.pgtol > 0):
            raise ValidationError('stopping rule values must be positive',
                                  code='invalid')

    @classmethod
    def from_value(cls, value):
        if isinstance(value, str):
            try:
                return STOPPING_RULES[value]
            except KeyError:
                raise ValidationError(
                    'unknown stopping rule %(value)r',
                    params={'value': value}, code='invalid_choice')

        check_keys(value, ('maxiter', 'factr', 'pgtol'), 'stopping')
        return cls(
            _number(value, 'maxiter', 'stopping', int, 1000),
            _number(value, 'factr', 'stopping', float, 1e7),
            _number(value, 'pgtol', 'stopping', float, 1e-5),
        )

    def to_value(self):
        for name, rule in STOPPING_RULES.items():
            if rule == self:
                return name
        return dataclasses.asdict(self)


SOFT = StoppingRule(1000, 1e7, 1e-5)
STRICT = StoppingRule(1000, 10.0, 1e-20)

STOPPING_RULES = {
    'soft': SOFT,
    'strict': STRICT,
}


@dataclasses.dataclass(frozen=True)
class InitStrategy:
    '''``alpha`` is the prescribed noise-to-variance ratio used while
    profiling; ``levels``, ``grid_min`` and ``grid_max`` describe the
    log-spaced multipliers of the grid search.'''

    kind: InitKind = InitKind.GRID
    alpha: float = 0.0
    levels: int = 5
    grid_min: float = 0.02
    grid_max: float = 2.0

    def __post_init__(self):
        object.__setattr__(self, 'kind', InitKind(self.kind))

        if not self.alpha >= 0:
            raise ValidationError('init.alpha must be non-negative',
                                  code='invalid')
        if self.levels < 2:
            raise ValidationError('init.levels must be at least 2',
                                  code='invalid')
        if not 0 < self.grid_min < self.grid_max:
            raise ValidationError(
                'init grid bounds must satisfy 0 < grid_min < grid_max',
                code='invalid')

    @classmethod
    def from_value(cls, value):
        if isinstance(value, str):
            return cls(parse_enum(InitKind, value, 'init'))

        check_keys(value, ('kind', 'alpha', 'levels', 'grid_min',
                           'grid_max'), 'init')
        return cls(
            parse_enum(InitKind, value.get('kind', 'grid'), 'init'),
            _number(value, 'alpha', 'init', float, 0.0),
            _number(value, 'levels', 'init', int, 5),
            _number(value, 'grid_min', 'init', float, 0.02),
            _number(value, 'grid_max', 'init', float, 2.0),
        )

    def to_value(self):
        if self == InitStrategy(self.kind):
            return self.kind.value
        data = dataclasses.asdict(self)
        data['kind'] = self.kind.value
        return data


@dataclasses.dataclass(frozen=True)
class RestartPolicy:
    kind: RestartKind = RestartKind.NONE
    n_opt: int = 1
    sigma_eta: float = SIGMA_ETA
    # keep restarting after a non-improving run until n_opt is spent
    exhaust: bool = False

    def __post_init__(self):
        object.__setattr__(self, 'kind', RestartKind(self.kind))

        if self.n_opt < 1:
            raise ValidationError('restart.n_opt must be at least 1',
                                  code='invalid')
        if not self.sigma_eta > 0:
            raise ValidationError('restart.sigma_eta must be positive',
                                  code='invalid')

    @classmethod
    def from_value(cls, value):
        if isinstance(value, str):
            return cls(parse_enum(RestartKind, value, 'restart'))

        check_keys(value, ('kind', 'n_opt', 'sigma_eta', 'exhaust'),
                   'restart')

        exhaust = value.get('exhaust', False)
        if not isinstance(exhaust, bool):
            raise ValidationError('restart.exhaust must be a boolean',
                                  code='invalid')

        return cls(
            parse_enum(RestartKind, value.get('kind', 'none'),
                       'restart'),
            _number(value, 'n_opt', 'restart', int, 1),
            _number(value, 'sigma_eta', 'restart', float, SIGMA_ETA),
            exhaust,
        )

    def to_value(self):
        if self.kind is RestartKind.NONE:
            return self.kind.value
        data = dataclasses.asdict(self)
        data['kind'] = self.kind.value
        return data


@dataclasses.dataclass(frozen=True)
class SchemeConfig:
    name: str
    init: InitStrategy = InitStrategy()
    reparam: ReparamId = ReparamId.LOG
    stopping: StoppingRule = SOFT
    restart: RestartPolicy = RestartPolicy()
    # (lower, upper) per optimized positive parameter, in the
    # transformed space; None means unbounded
    bounds: tuple = None
    seed: int = 0
    estimate_noise: bool = False

    def __post_init__(self):
        object.__setattr__(self, 'reparam', ReparamId(self.reparam))

        if self.bounds is not None:
            bounds = tuple(
                (-math.inf if lo is None else float(lo),
                 math.inf if hi is None else float(hi))
                for lo, hi in self.bounds
            )
            if any(not lo < hi for lo, hi in bounds):
                raise ValidationError('every bound needs lower < upper',
                                      code='invalid')
            object.__setattr__(self, 'bounds', bounds)

        if self.seed < 0:
            raise ValidationError('seed must be non-negative',
                                  code='invalid')

    @property
    def stochastic(self):
        return self.restart.kind is RestartKind.MULTISTART

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    @classmethod
    def from_dict(cls, data, name=None):
        '''Build a scheme from its JSON form.

        ``{"preset": "improved", ...}`` starts from a preset and
        overrides the remaining keys.
        '''
        check_keys(data, ('name', 'preset', 'init', 'reparam', 'stopping',
                          'restart', 'bounds', 'seed', 'estimate_noise'),
                   'scheme')

        if 'preset' in data:
            base = get_preset(data['preset'])
        else:
            base = cls(name or data.get('name', 'custom'))

        changes = {}

        if 'name' in data or name:
            changes['name'] = name or data['name']
        if 'init' in data:
            changes['init'] = InitStrategy.from_value(data['init'])
        if 'reparam' in data:
            changes['reparam'] = parse_enum(ReparamId, data['reparam'],
                                            'reparam')
        if 'stopping' in data:
            changes['stopping'] = StoppingRule.from_value(data['stopping'])
        if 'restart' in data:
            changes['restart'] = RestartPolicy.from_value(data['restart'])
        if 'bounds' in data:
            changes['bounds'] = (None if data['bounds'] is None
                                 else tuple(map(tuple, data['bounds'])))
        if 'seed' in data:
            changes['seed'] = _number(data, 'seed', 'scheme', int)
        if 'estimate_noise' in data:
            changes['estimate_noise'] = bool(data['estimate_noise'])

        return base.replace(**changes)

    def to_dict(self):
        data = {
            'name': self.name,
            'init': self.init.to_value(),
            'reparam': self.reparam.value,
            'stopping': self.stopping.to_value(),
            'restart': self.restart.to_value(),
            'seed': self.seed,
        }
        if self.bounds is not None:
            data['bounds'] = [list(b) for b in self.bounds]
        if self.estimate_noise:
            data['estimate_noise'] = True
        return data


DEFAULT = SchemeConfig(
    'default',
    init=InitStrategy(InitKind.CONSTANT),
    reparam=ReparamId.INV_SOFTPLUS,
    stopping=SOFT,
)

IMPROVED = SchemeConfig(
    'improved',
    init=InitStrategy(InitKind.GRID),
    reparam=ReparamId.LOG,
    stopping=SOFT,
    restart=RestartPolicy(RestartKind.RESTART, 5),
)

REFERENCE = SchemeConfig(
    'reference',
    init=InitStrategy(InitKind.GRID),
    reparam=ReparamId.LOG,
    stopping=STRICT,
    restart=RestartPolicy(RestartKind.MULTISTART, 50),
)

REPARAM_PREFIXES = {
    'log': ReparamId.LOG,
    'isp': ReparamId.INV_SOFTPLUS,
    'isps': ReparamId.INV_SOFTPLUS_STD,
}

BUDGETS = (1, 2, 5, 10, 20)


def _build_presets():
    presets = {s.name: s for s in (DEFAULT, IMPROVED, REFERENCE)}

    for prefix, reparam in REPARAM_PREFIXES.items():
        for init in (InitKind.MOMENT, InitKind.PROFILED, InitKind.GRID):
            name = '{}-{}'.format(prefix, init.value)
            base = SchemeConfig(name, InitStrategy(init), reparam, SOFT)
            presets[name] = base
            presets[name + '-strict'] = base.replace(
                name=name + '-strict', stopping=STRICT)

    for n_opt in BUDGETS:
        name = 'restart-{}'.format(n_opt)
        presets[name] = IMPROVED.replace(
            name=name, restart=RestartPolicy(RestartKind.RESTART, n_opt))

        name = 'multistart-{}'.format(n_opt)
        presets[name] = IMPROVED.replace(
            name=name, restart=RestartPolicy(RestartKind.MULTISTART, n_opt))

    return presets


PRESETS = _build_presets()


def get_preset(name):
    try:
        return PRESETS[name]
    except (KeyError, TypeError):
        raise ValidationError(
            'unknown scheme preset %(name)r', params={'name': name},
            code='unknown_preset')


def get_scheme(value):
    '''A preset name, or a scheme dict'''
    if isinstance(value, SchemeConfig):
        return value
    if isinstance(value, str):
        return get_preset(value)
    return SchemeConfig.from_dict(value)
