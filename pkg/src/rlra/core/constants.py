"""
Core Constants for the randomized low-rank toolkit

Central place for numerical thresholds, default sketch parameters and
file-format constants.
"""

# Householder / pivoted QR
HOUSEHOLDER_UNDERFLOW = 1e-300      # column norm treated as exactly zero
NORM_RECOMPUTE_RATIO = 1e-3         # downdated norm / reference norm before recompute
REORTH_KEEP_NORM = 0.5              # unit column norm left after projection against Q

# Interpolation coefficients
DIAGONAL_RATIO_LIMIT = 1e12         # |S11| diagonal spread that triggers clamping
COEFFICIENT_CLAMP = 1e4             # max |T| entry after stabilization
LINKAGE_RANK_TOLERANCE = 1e-14      # relative pivot size for the CUR linkage solve

# Jacobi kernels
SYMMETRY_TOLERANCE = 1e-12
JACOBI_EIG_MAX_SWEEPS = 30
JACOBI_SVD_MAX_SWEEPS = 60
JACOBI_EIG_THRESHOLD = 1e-15        # off(T) <= threshold * ||T||_F
JACOBI_SVD_THRESHOLD = 1e-15        # |u_p . u_q| <= threshold * ||u_p|| ||u_q||

# Dense oracle
DENSE_ORACLE_LIMIT = 2000           # max min(m, n) for svd_truncated

# RSVD version I guard (~ machine epsilon squared)
BBT_EIGENVALUE_FLOOR = 1e-28

# Spectral norm estimate
MIN_SPECTRAL_ITERS = 20
DEFAULT_SPECTRAL_ITERS = 100

# Sketch defaults
DEFAULT_OVERSAMPLING = 5
DEFAULT_POWER_ITERS = 1
DEFAULT_ORTH_PERIOD = 1
DEFAULT_BLOCK_SIZE = 10
DEFAULT_MAX_BLOCKS = 10
DEFAULT_SEED = 0

# Parallel kernels
DEFAULT_THREADS = 1
PARALLEL_MIN_COLUMNS = 64           # matmul stays serial below this output width

# Binary matrix files
HEADER_BYTES = 8                    # two little-endian int32
PAYLOAD_DTYPE = "<f8"
INT32_MAX = 2**31 - 1

# Test matrix spectra: exponent end points of logspace(0, e, r)
SPECTRUM_EXPONENTS = {
    "I": -0.5,
    "II": -2.0,
    "III": -3.5,
}

# Reports
CSV_FLOAT_FORMAT = ".17g"
THREADS_ENV_VAR = "RLRA_THREADS"
LOG_LEVEL_ENV_VAR = "RLRA_LOG_LEVEL"
