"""
Validates inputs before they reach the numerical services.

Checks for:
- Hessian shape, finiteness and symmetry
- Metric shape, conjugate symmetry and invertibility
- Run configuration fields and ranges
"""

import logging
from typing import Dict, List, Tuple

import numpy as np

from config.settings import TOLERANCES
from models.metric import Metric

logger = logging.getLogger(__name__)

SUBCOMMANDS = ('identities', 'hermiticity', 'nogo-scan', 'kernel', 'evolve', 'lyapunov',
               'canonical', 'spectrum')
METRIC_NAMES = ('svh', 'gauge', 'symplectic', 'A', 'B', 'C')
FORMATS = ('json', 'csv')


class InputValidator:
    """Validator for Hessians, metrics and run configurations."""

    def __init__(self):
        self.logger = logging.getLogger(__name__)

    # ========================================
    # HESSIAN VALIDATION
    # ========================================

    def validate_hessian(self, hessian, n_pairs: int) -> Tuple[bool, List[str]]:
        """
        Validate a Hessian sample.

        Args:
            hessian: Array-like 2n x 2n matrix
            n_pairs: Degrees of freedom n

        Returns:
            Tuple of (is_valid, list of errors)
        """
        errors = []
        try:
            matrix = np.asarray(hessian, dtype=float)
        except (TypeError, ValueError):
            return (False, ["Hessian is not a real numeric array"])

        size = 2 * n_pairs
        if matrix.shape != (size, size):
            errors.append(f"Hessian must be {size}x{size}, got {matrix.shape}")
            return (False, errors)
        if not np.all(np.isfinite(matrix)):
            errors.append("Hessian has non-finite entries")
            return (False, errors)

        asymmetry = float(np.max(np.abs(matrix - matrix.T), initial=0.0))
        scale = max(1.0, float(np.max(np.abs(matrix), initial=0.0)))
        if asymmetry > TOLERANCES['hessian_symmetry'] * scale:
            errors.append(f"Hessian is not symmetric (max asymmetry {asymmetry:.3g})")

        return (len(errors) == 0, errors)

    # ========================================
    # METRIC VALIDATION
    # ========================================

    def validate_metric(self, metric: Metric) -> Tuple[bool, List[str]]:
        """
        Validate a metric for use as a scalar product.

        Args:
            metric: Metric to check

        Returns:
            Tuple of (is_valid, list of errors)
        """
        errors = []
        if not np.all(np.isfinite(metric.g)):
            errors.append("Metric has non-finite entries")
            return (False, errors)

        scale = max(1.0, float(np.max(np.abs(metric.g))))
        if metric.hermiticity_defect > TOLERANCES['hermiticity'] * scale:
            errors.append(f"Metric {metric.describe()} is not conjugate-symmetric "
                          f"(defect {metric.hermiticity_defect:.3g})")
        if not metric.is_invertible():
            errors.append(f"Metric {metric.describe()} is singular")

        return (len(errors) == 0, errors)

    # ========================================
    # RUN CONFIG VALIDATION
    # ========================================

    def validate_run_config(self, config: Dict) -> Tuple[bool, List[str]]:
        """
        Validate a resolved run configuration.

        Args:
            config: Flat configuration dict (see RunConfig.to_dict)

        Returns:
            Tuple of (is_valid, list of errors)
        """
        errors = []

        # Required fields
        if config.get('subcommand') not in SUBCOMMANDS:
            errors.append(f"Unknown subcommand: {config.get('subcommand')}")
        if config.get('metric') not in METRIC_NAMES:
            errors.append(f"Unknown metric: {config.get('metric')} (choose from {', '.join(METRIC_NAMES)})")
        if config.get('format') not in FORMATS:
            errors.append(f"Unknown output format: {config.get('format')}")

        # Ranges
        n = config.get('n')
        if not isinstance(n, int) or isinstance(n, bool) or not 1 <= n <= 3:
            errors.append(f"n must be an integer in 1..3, got {n}")
        for key in ('t', 'dt'):
            value = config.get(key)
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                errors.append(f"{key} must be a number, got {value}")
        if isinstance(config.get('t'), (int, float)) and config['t'] < 0:
            errors.append(f"t must be >= 0, got {config['t']}")
        if isinstance(config.get('dt'), (int, float)) and config['dt'] <= 0:
            errors.append(f"dt must be > 0, got {config['dt']}")
        samples = config.get('samples')
        if not isinstance(samples, int) or isinstance(samples, bool) or samples < 1:
            errors.append(f"samples must be a positive integer, got {samples}")
        seed = config.get('seed')
        if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
            errors.append(f"seed must be a non-negative integer, got {seed}")
        if not isinstance(config.get('metric_params', {}), dict):
            errors.append("metric_params must be a JSON object")

        # Consistency
        if config.get('metric') in ('A', 'B', 'C') and n != 1:
            errors.append(f"metric family {config['metric']} is defined for n = 1 only")
        if config.get('subcommand') == 'identities' and n not in (1, 2):
            errors.append("identities supports n = 1 or 2")
        if config.get('subcommand') == 'nogo-scan' and n != 1:
            errors.append("nogo-scan runs at n = 1")

        return (len(errors) == 0, errors)
