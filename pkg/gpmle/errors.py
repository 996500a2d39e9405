# -*- mode: python; coding: utf-8 -*-
'''Exceptions raised by the numerical core.

Every error derives from :class:`GpMleError` and from the closest
builtin, so callers may catch either.
'''

import numpy


class GpMleError(Exception):
    pass


class ContractViolation(GpMleError, ValueError):
    '''Shapes or arguments violate an operation's preconditions.'''


class AllJitterFailed(GpMleError, numpy.linalg.LinAlgError):
    '''No level of the jitter ladder gave a successful factorization.'''

    def __init__(self, msg, attempts=0, last_jitter=None):
        super().__init__(msg)
        self.attempts = attempts
        self.last_jitter = last_jitter


class NotPositiveDefinite(GpMleError, numpy.linalg.LinAlgError):
    pass


class DegenerateLogDet(GpMleError, ArithmeticError):
    pass


class DegenerateProfile(GpMleError, ArithmeticError):
    pass


class DegenerateDesign(GpMleError, ValueError):
    pass


class ConstantData(GpMleError, ValueError):
    pass


class NonPositiveParam(GpMleError, ValueError):
    pass


class NonFiniteObjective(GpMleError, FloatingPointError):
    pass


class InitFailed(GpMleError):
    pass


class FitFailed(GpMleError):
    '''Every optimization run of a fit failed.

    ``traces`` holds one :class:`gpmle.mle.RunTrace` per attempted run.
    '''

    def __init__(self, msg, traces=()):
        super().__init__(msg)
        self.traces = list(traces)


class OutOfDomain(GpMleError, ValueError):
    pass


class UnknownFunction(GpMleError, LookupError):
    pass


class MissingReference(GpMleError, LookupError):
    pass
