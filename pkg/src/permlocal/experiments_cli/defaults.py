"""Versioned thresholds shared by ``verify``, ``experiment --assert`` and the acceptance tests."""

DEFAULTS_VERSION = "1"
SCHEMA_VERSION = 1

# samples per batch; batch ``b`` always uses random stream ``b``
BATCH_SIZE = 50

# largest pattern size examined when no explicit pattern list is given
MAX_PATTERN_SIZE = 4

DESK_N = 4096
CONVERGENCE_SAMPLES = 2000
CONVERGENCE_TOL = 0.02
VARIANCE_MAX = 0.002
FORBIDDEN_PATTERN_MAX = 0.02

LIMIT_DRAWS = 100_000
LIMIT_WINDOW_TOL = 0.01

SHIFT_RADIUS = 6
SHIFT_RANGE = 3
SHIFT_SPREAD_MAX = 0.02
SHIFT_EXACT_TOL = 0.01

WINDOW_SET_SAMPLES = 1000
WINDOW_SET_TOL = 0.02

SEPARATING_SAMPLES = 500
SEPARATING_RADIUS = 2
SEPARATING_MIN = 0.95

SAMPLER_N = 4
SAMPLER_DRAWS = 140_000
SAMPLER_TOL = 0.01

TSTAR_DRAWS = 200_000
TSTAR_MAX_VERTICES = 5
TSTAR_TOL = 0.01
