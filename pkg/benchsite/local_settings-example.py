#
# Example settings overrides
#
# Copy this file to local_settings.py; it is not under version control.
#

# Fit this many matrix cells at once
BENCH_JOBS = 4

# The narrower jitter escalation of GPy
# GPMLE_JITTER_LADDER = [1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1]

# A squared exponential kernel instead of Matern 5/2
# GPMLE_KERNEL = {'family': 'squared_exponential'}

# Fewer repetitions for a quick look
# BENCH_REPETITIONS = 5

# Show what the optimizer is doing
# LOGGING = {
#     'version': 1,
#     'handlers': {
#         'console': {'class': 'logging.StreamHandler'},
#     },
#     'loggers': {
#         'gpmle': {'handlers': ['console'], 'level': 'DEBUG'},
#     },
# }
