DEFAULT_CLOSURE_CAP = 200_000
DEFAULT_FREE_ALGEBRA_CAP_3 = 100_000
DEFAULT_FREE_ALGEBRA_CAP_4 = 150_000
DEFAULT_CONGRUENCE_CAP = 20_000
DEFAULT_SQUARE_OBSTRUCTION_LIMIT = 36
DEFAULT_NUM_JOBS = 1
DEFAULT_ZERO_ELEMENT = 0

# Upper bound on the number of table entries materialised by one closure block
CLOSURE_BLOCK_ENTRIES = 1 << 22
# Codes below this bound are deduplicated with a dense bitmap
DENSE_CODE_LIMIT = 1 << 25
# Element tuples whose base-n code would not fit in a signed 64-bit integer are
# keyed by their bytes instead
MAX_INT_CODE_BITS = 62

NUM_JOBS_ENV_VAR = "COMMUTATOR_NUM_JOBS"
BUILTIN_PREFIX = "builtin:"

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT_ERROR = 2
EXIT_UNDECIDED = 3

# Reserved leaf spellings in the prefix term syntax
VARIABLE_PREFIX = "x"
CONSTANT_PREFIX = "@"
FORBIDDEN_SYMBOL_CHARS = "(), \t\n|"
