import os
from dotenv import load_dotenv

load_dotenv()


def _float(key, default):
    return float(os.getenv(f'KVN_{key}', default))


def _int(key, default):
    return int(os.getenv(f'KVN_{key}', default))


# Numerical tolerances
TOLERANCES = {
    'exact': _float('TOL_EXACT', 1e-12),            # algebraic identities
    'hermiticity': _float('TOL_HERMITICITY', 1e-10),
    'signature_zero': _float('TOL_SIGNATURE_ZERO', 1e-10),  # relative to ||g||
    'integration': _float('TOL_INTEGRATION', 1e-6),
    'principal_angle': _float('TOL_PRINCIPAL_ANGLE', 1e-8),
    'kernel': _float('TOL_KERNEL', 1e-10),          # singular values treated as zero
    'hessian_symmetry': _float('TOL_HESSIAN_SYMMETRY', 1e-8),
}

# Flow / Jacobi integration
INTEGRATION_DEFAULTS = {
    'dt': _float('DT', 1e-3),
    'renorm_interval': _float('RENORM_INTERVAL', 1.0),
    'lyapunov_box': _float('LYAPUNOV_BOX', 1.0),   # half-width of the sampling box
}

# Parameter grid of the no-go sweep
SWEEP_GRID = {
    'b': [-2.0, -1.0, -0.5, 0.5, 1.0, 2.0],
    'theta': [0.0, 0.7853981633974483, 1.5707963267948966],
    'gamma_i': [0.0, 1.0],
    'g03': [[0.0, 1.0], [0.0, -1.0], [1.0, 0.0]],   # [re, im]
    'hessian_samples': _int('SWEEP_HESSIANS', 5),
}

# Largest fiber handled by the dense conjugation solver
SOLVER_MAX_PAIRS = _int('SOLVER_MAX_PAIRS', 2)

# Output Paths
OUTPUT_CONFIG = {
    'out_dir': os.getenv('KVN_OUT_DIR', 'output'),
    'log_dir': os.getenv('KVN_LOG_DIR', 'logs'),
    'float_format': '%.12g',
}

LOG_LEVEL = os.getenv('KVN_LOG_LEVEL', 'INFO')
