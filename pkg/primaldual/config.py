"""
Primal-Dual Toolkit Configuration
"""
import os

from dotenv import load_dotenv

load_dotenv()

# Solver iteration budget
DEFAULT_MAX_ITERS = int(os.getenv('PRIMALDUAL_MAX_ITERS', '20000'))
DEFAULT_KKT_TOL = float(os.getenv('PRIMALDUAL_KKT_TOL', '1e-8'))
DEFAULT_SEED = int(os.getenv('PRIMALDUAL_SEED', '0'))
DEFAULT_TRACE_STRIDE = int(os.getenv('PRIMALDUAL_TRACE_STRIDE', '1'))

# Spectral norm estimation
POWER_ITERATION_TOL = 1e-6
POWER_ITERATION_MAX_ITER = 10000

# Absolute tolerance for certificates and indicator membership
FEASIBILITY_TOL = 1e-9

# Scalar prox (general power p)
NEWTON_TOL = 1e-12
NEWTON_MAX_ITER = 200

# ADMM x-update
ADMM_DENSE_LIMIT = 2048          # exact cached factorization up to this many columns
ADMM_CG_ITERS = 50               # inner conjugate-gradient budget beyond it
ADMM_CG_TOL = 1e-10
ADMM_RANK_CHECK_LIMIT = 512      # rank(L) = N only verified for dense L up to this size

# Separable block prox inside stacked problems
BLOCK_WORKERS = int(os.getenv('PRIMALDUAL_BLOCK_WORKERS', '1'))

# Forward-backward family (Algorithms FB, rescaled, symmetric, FB2)
FB_DEFAULTS = {
    'step_scale': 1.0,           # sigma = step_scale / ||L||
    'tau_safety': 0.99,          # tau = 0.99 / (beta/2 + sigma ||L||^2)
    'relaxation': 1.0,
}

# Forward-backward-forward
FBF_DEFAULTS = {
    'epsilon': 0.01,
    'gamma_fraction': 0.9,       # gamma = 0.9 (1 - eps) / mu
}

# Projection-based method
PROJECTION_DEFAULTS = {
    'gamma': 1.0,
    'mu': 1.0,
    'relaxation': 1.0,
}

# ADMM
ADMM_DEFAULTS = {
    'gamma': 1.0,
}

# Dual decomposition (projected subgradient)
DD_DEFAULTS = {
    'schedule': 'diminishing',   # gamma_n = gamma0 / (1 + n / n0)
    'decay': 100.0,              # n0
    'max_iters': 2000,
    'splitting_tol': 1e-8,
}

# MRF exhaustive search cap (|L|^|V|)
BRUTE_FORCE_LIMIT = 10 ** 6

# Max-flow residual threshold
FLOW_EPS = 1e-12

# Logging configuration
LOG_LEVEL = os.getenv('PRIMALDUAL_LOG_LEVEL', 'INFO')
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
