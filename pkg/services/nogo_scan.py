"""
Sweep of the one-degree-of-freedom metric families.

For every consistent metric the scan records the hermiticity residual of
H̃_ferm over sampled Hessians and the signature of the metric. No row may
be both Hermitian and positive definite.
"""

import logging
from itertools import product
from typing import Dict, List, Optional

import numpy as np

from config.settings import SWEEP_GRID, TOLERANCES
from models.algebra import AlgebraDescriptor
from models.errors import ConjugationError, MetricError
from models.metric import ConjugationRule, Metric
from services.dynamics import builtin_model
from services.lie_derivative import ferm_matrix, random_hessians
from services.scalar_products import (
    gauge_metric,
    general_metric,
    hermiticity_residual,
    metric_eigenvalues,
    metric_from_conjugation,
    signature,
    svh_metric,
    symplectic_metric,
)

logger = logging.getLogger(__name__)


def sample_hessians(seed: int, samples: Optional[int] = None) -> List[np.ndarray]:
    """Random symmetric Hessians plus the quartic Hessian at q = 1."""
    samples = SWEEP_GRID['hessian_samples'] if samples is None else samples
    algebra = AlgebraDescriptor(1)
    quartic = builtin_model('quartic', 1).hessian(np.array([1.0, 0.0]))
    return random_hessians(algebra, samples, seed) + [quartic]


def scan_row(metric: Metric, hessians: List[np.ndarray]) -> Dict:
    residual = max(hermiticity_residual(metric, ferm_matrix(metric.algebra, h)) for h in hessians)
    n_plus, n_minus, n_zero = signature(metric)
    hermitian = residual < TOLERANCES['hermiticity']
    positive = n_minus == 0 and n_zero == 0
    return {
        'family': metric.family,
        'params': {k: ([v.real, v.imag] if isinstance(v, complex) else v)
                   for k, v in sorted(metric.params.items())},
        'residual': residual,
        'signature': [n_plus, n_minus, n_zero],
        'eigenvalues': [[float(x.real), float(x.imag)] for x in metric_eigenvalues(metric)],
        'hermitian': bool(hermitian),
        'positive_definite': bool(positive),
        'dichotomy_ok': not (hermitian and positive),
    }


def solved_family_metric(kind: str, params: Dict) -> Metric:
    """
    Metric of family A, B or C solved from its conjugation rule.

    A is normalized by g[0, 0] = 1, B and C by g[0, 3] = g03.
    """
    algebra = AlgebraDescriptor(1)
    if kind == 'A':
        rule = ConjugationRule.family(algebra, 'A', b=params['b'])
        normalization = {(0, 0): 1.0}
    elif kind == 'B':
        rule = ConjugationRule.family(algebra, 'B', theta=params['theta'], gamma_i=params['gamma_i'])
        normalization = {(0, algebra.volume): params['g03']}
    else:
        rule = ConjugationRule.family(algebra, 'C', theta=params['theta'], b=params['b'])
        normalization = {(0, algebra.volume): params['g03']}
    return metric_from_conjugation(rule, normalization, family=f'general{kind}', params=dict(params))


def family_metrics(grid: Optional[Dict] = None) -> Dict[str, List[Metric]]:
    """
    Consistent metrics of every family on the grid.

    Each family metric is solved from its conjugation rule and compared
    with the closed form. Grid points where the rule admits no
    conjugate-symmetric metric are counted under 'skipped'; 'closed_form_defect'
    is the largest entry difference and 'solver_mismatch' counts points
    accepted by only one of the two routes.
    """
    grid = SWEEP_GRID if grid is None else grid
    algebra = AlgebraDescriptor(1)
    metrics: Dict[str, List[Metric]] = {
        'named': [svh_metric(algebra), gauge_metric(algebra), symplectic_metric(algebra)],
        'A': [], 'B': [], 'C': [],
    }
    g03_values = [complex(re, im) for re, im in grid['g03']]
    c_values = sorted(set([0.0] + list(grid['b'])))
    points = [('A', {'b': float(b)}) for b in grid['b']]
    points += [('B', {'theta': float(theta), 'gamma_i': float(gamma_i), 'g03': g03})
               for theta, gamma_i, g03 in product(grid['theta'], grid['gamma_i'], g03_values)]
    points += [('C', {'theta': float(theta), 'b': float(b), 'g03': g03})
               for theta, b, g03 in product(grid['theta'], c_values, g03_values)]

    skipped, mismatch, defect = 0, 0, 0.0
    for kind, params in points:
        try:
            solved = solved_family_metric(kind, params)
        except (MetricError, ConjugationError):
            solved = None
        try:
            closed = general_metric(kind, params)
        except MetricError:
            closed = None
        if (solved is None) != (closed is None):
            mismatch += 1
            logger.error(f"family {kind} {params}: solver and closed form disagree on consistency")
        if solved is None:
            skipped += 1
            continue
        if closed is not None:
            defect = max(defect, float(np.max(np.abs(solved.g - closed.g))))
        metrics[kind].append(solved)
    metrics['skipped'] = skipped
    metrics['solver_mismatch'] = mismatch
    metrics['closed_form_defect'] = defect
    return metrics


def run_scan(seed: int = 0, samples: Optional[int] = None, grid: Optional[Dict] = None) -> Dict:
    """
    Returns:
        Dict with 'rows' (sorted by family then parameters), 'skipped',
        'violations', the solver cross-check fields and 'passed'
    """
    hessians = sample_hessians(seed, samples)
    metrics = family_metrics(grid)
    rows = []
    for key in ('named', 'A', 'B', 'C'):
        for metric in metrics[key]:
            rows.append(scan_row(metric, hessians))
    rows.sort(key=lambda r: (r['family'], str(r['params'])))
    violations = [r for r in rows if not r['dichotomy_ok']]
    for row in violations:
        logger.error(f"dichotomy violated by {row['family']} {row['params']}")
    logger.info(f"no-go scan: {len(rows)} metrics, {metrics['skipped']} skipped, "
                f"{len(violations)} violations")
    logger.debug(f"solver vs closed form: defect {metrics['closed_form_defect']:.2e}, "
                 f"{metrics['solver_mismatch']} mismatches")
    agrees = metrics['solver_mismatch'] == 0 and metrics['closed_form_defect'] < TOLERANCES['hermiticity']
    return {
        'rows': rows,
        'skipped': metrics['skipped'],
        'hessian_samples': len(hessians),
        'violations': len(violations),
        'closed_form_defect': metrics['closed_form_defect'],
        'solver_mismatch': metrics['solver_mismatch'],
        'passed': not violations and agrees,
    }
