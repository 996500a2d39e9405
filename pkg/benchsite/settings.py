"""
Django settings for the benchsite project.

The project carries no database, templates or URLs; Django provides the
settings layer, the management commands and the test runner.

Every tunable below may be overridden in local_settings.py next to this
file; see local_settings-example.py.
"""

import os


# Build paths inside the project like this: os.path.join(BASE_DIR, ...)
BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

DEBUG = False

TEST_RUNNER = 'gpmle.tests.util.TestRunner'

TESTING = False

# Application definition

INSTALLED_APPS = [
    'gpmle.apps.GpMleConfig',
]

DATABASES = {}

USE_TZ = True

TIME_ZONE = 'Etc/UTC'


# Numerical core

# Covariance family used by the bench command
GPMLE_KERNEL = {
    'family': 'matern',
    'nu': 2.5,
}

# Relative jitter levels, in units of sigma2, tried in order whenever
# a Cholesky factorization fails
GPMLE_JITTER_LADDER = [1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1e0, 1e1, 1e2]

# Absolute jitter always present on the first attempt
GPMLE_MINIMAL_JITTER = 1e-8


# Benchmark

BENCH_MASTER_SEED = 0

# Cells fitted concurrently
BENCH_JOBS = 1

# Upper end of the window integrated by the area under the ECDF
BENCH_NLL_MAX = 100.0

# Repetitions of stochastic schemes, unless a matrix says otherwise
BENCH_REPETITIONS = 50

BENCH_REFERENCE = 'reference'

BENCH_PROGRESS = True


# Logging

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'default': {
            'format': '%(asctime)s %(levelname)s %(name)s: %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'default',
        },
    },
    'loggers': {
        'gpmle': {
            'handlers': ['console'],
            'level': os.getenv('GPMLE_LOG_LEVEL', 'WARNING'),
        },
    },
}

if os.path.exists(os.path.join(os.path.dirname(__file__),
                               'local_settings.py')):
    from .local_settings import *  # noqa
