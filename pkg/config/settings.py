"""Defaults shared by the CLI, the steps and the pipelines."""

DEFAULT_TOLERANCE = 1e-9
DEFAULT_SEED = 42
DEFAULT_SAMPLES = 100
DOMAIN_RETRY_CAP = 10

DEFAULT_T_END = 10.0
DEFAULT_DT = 1e-3
DEFAULT_METHOD = "rk4"
DEFAULT_STORE_EVERY = 1
DEFAULT_MAX_DEGREE = 3

SEED_ENV_VAR = "NAMBU_SEED"

EXIT_OK = 0
EXIT_SPEC_ERROR = 1
EXIT_DIVERGENCE = 2
EXIT_VERIFICATION_FAILED = 3
