"""
Linear canonical transformations acting on the fiber.

A transform φ' = Sφ lifts to the fiber as F = Λ(S^{-T}) on monomial
coefficients. Metrics push forward as g' = F^{-H} g F^{-1} so that inner
products are preserved, and H̃_ferm in the new frame is built from the
transformed Hessian S^{-T} h S^{-1}.
"""

import logging
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from config.settings import TOLERANCES
from models.canonical import LinearCanonical
from models.dynamics import HamiltonianModel
from models.errors import CanonicalError, MetricError
from models.metric import Metric
from models.operator import GrassmannOperator
from services.dynamics import builtin_model
from services.grassmann import exterior_lift
from services.lie_derivative import ferm_matrix
from services.scalar_products import hermiticity_residual, signature, svh_metric

logger = logging.getLogger(__name__)


# =============================================================================
# CONSTRUCTORS
# =============================================================================

def scaling_transform(alpha: float, n_pairs: int = 1) -> LinearCanonical:
    """q' = αq, p' = p/α on every degree of freedom."""
    alpha = float(alpha)
    if alpha == 0:
        raise CanonicalError("scaling parameter alpha must be non-zero")
    diagonal = np.concatenate([np.full(n_pairs, alpha), np.full(n_pairs, 1.0 / alpha)])
    return LinearCanonical(np.diag(diagonal), 'scaling', {'alpha': alpha})


def matrix_transform(S, tol: Optional[float] = None) -> LinearCanonical:
    """
    User-supplied 2n×2n transform.

    Raises:
        CanonicalError: S is not square, has odd size, or violates S ω Sᵀ = ω
    """
    tol = TOLERANCES['exact'] if tol is None else tol
    transform = LinearCanonical(S, 'matrix')
    defect = transform.symplectic_defect()
    if defect > tol * max(1.0, float(np.max(np.abs(transform.S)))):
        raise CanonicalError(f"transform is not symplectic: max |SωSᵀ - ω| = {defect:.3g}")
    return transform


# =============================================================================
# FIBER ACTION
# =============================================================================

def _check(metric_or_model_pairs: int, transform: LinearCanonical) -> None:
    if metric_or_model_pairs != transform.n_pairs:
        raise CanonicalError(f"transform acts on n = {transform.n_pairs}, target has n = {metric_or_model_pairs}")


def fiber_lift(transform: LinearCanonical) -> np.ndarray:
    """F = Λ(S^{-T}); ψ' = F ψ on monomial coefficients."""
    return exterior_lift(transform.algebra, transform.coefficient_map)


def pushforward_metric(metric: Metric, transform: LinearCanonical) -> Metric:
    """
    g' = F^{-H} g F^{-1}, so ⟨F Φ|F ψ⟩_{g'} = ⟨Φ|ψ⟩_g.

    Raises:
        MetricError: metric is singular
        CanonicalError: dimension mismatch or singular lift
    """
    _check(metric.algebra.n_pairs, transform)
    if metric.algebra.single:
        raise CanonicalError("canonical transforms need (q, p) pairs")
    if not metric.is_invertible():
        raise MetricError(f"metric {metric.describe()} is singular")
    try:
        inverse = np.linalg.inv(fiber_lift(transform))
    except np.linalg.LinAlgError as e:
        raise CanonicalError("fiber lift is singular") from e
    params = dict(metric.params)
    params['transform'] = transform.describe()
    return Metric(metric.algebra, inverse.conj().T @ metric.g @ inverse, 'custom', params)


def transform_hessian(hessian: np.ndarray, transform: LinearCanonical) -> np.ndarray:
    """Hessian of H'(φ') = H(S⁻¹φ'): S^{-T} h S^{-1}."""
    inverse = transform.inverse
    return inverse.T @ np.asarray(hessian, dtype=float) @ inverse


def transform_operator(op: GrassmannOperator, transform: LinearCanonical) -> GrassmannOperator:
    """F A F⁻¹."""
    lift = fiber_lift(transform)
    return GrassmannOperator(op.algebra, lift @ op.matrix @ np.linalg.inv(lift), op.parity,
                             f"{op.label}'" if op.label else '')


def transform_model(model: HamiltonianModel, transform: LinearCanonical) -> HamiltonianModel:
    """The same system written in the primed coordinates."""
    _check(model.n_pairs, transform)
    S, inverse = transform.S, transform.inverse
    return HamiltonianModel(
        n_pairs=model.n_pairs,
        energy=lambda phi: model.evaluate(inverse @ phi),
        gradient_fn=lambda phi: inverse.T @ model.gradient(inverse @ phi),
        hessian_fn=lambda phi: transform_hessian(model.hessian(inverse @ phi), transform),
        provenance=model.provenance,
        params={**model.params, 'transform': transform.describe()},
        constant_hessian=model.constant_hessian,
    )


# =============================================================================
# HERMITICITY
# =============================================================================

def hermiticity_invariance(model: HamiltonianModel, metric: Metric, transform: LinearCanonical,
                           phi=None) -> Dict:
    """
    H̃_ferm residuals before and after the transform.

    Before: residual of H̃_ferm(h(φ)) under g. After: residual of
    H̃_ferm(S^{-T} h S^{-1}) under the pushed-forward metric. The raw
    Frobenius residuals differ by a congruence with F⁻¹, so their ratio lies
    in [1/‖F‖², ‖F⁻¹‖²]; 'pulled_back' undoes the congruence and equals
    'before' up to roundoff.

    Returns:
        Dict with before, after, pulled_back, bounds, condition and
        'consistent' (both zero or both non-zero within bounds)
    """
    _check(model.n_pairs, transform)
    phi = np.zeros(2 * model.n_pairs) if phi is None else np.asarray(phi, dtype=float)
    algebra = metric.algebra
    hessian = model.hessian(phi)
    before = hermiticity_residual(metric, ferm_matrix(algebra, hessian))

    pushed = pushforward_metric(metric, transform)
    transformed = ferm_matrix(algebra, transform_hessian(hessian, transform))
    after = hermiticity_residual(pushed, transformed)

    lift = fiber_lift(transform)
    product_ = pushed.g @ transformed.matrix
    defect = product_ - product_.conj().T
    pulled_back = float(np.linalg.norm(lift.conj().T @ defect @ lift))

    lift_norm = float(np.linalg.norm(lift, 2))
    inverse_norm = float(np.linalg.norm(np.linalg.inv(lift), 2))
    lower, upper = before / lift_norm ** 2, before * inverse_norm ** 2
    tol = TOLERANCES['hermiticity']
    condition = lift_norm * inverse_norm
    if before < tol:
        consistent = after < tol * condition ** 2
    else:
        slack = 1e-8 * condition
        consistent = lower * (1 - slack) <= after <= upper * (1 + slack)
    logger.debug(f"hermiticity under {transform.describe()}: {before:.3g} -> {after:.3g}")
    return {
        'before': before,
        'after': after,
        'pulled_back': pulled_back,
        'bounds': [lower, upper],
        'condition': condition,
        'consistent': bool(consistent),
        'transform': transform.describe(),
        'metric': metric.describe(),
    }


def harmonic_frontier(masses: Iterable[float] = (0.5, 1.0, 2.0),
                      frequencies: Iterable[float] = (0.5, 1.0, 2.0)) -> List[Dict]:
    """
    SvH residual of H̃_ferm for harmonic(m, ω) over a grid; zero exactly
    when m²ω² = 1 (residual = √2 |mω² - 1/m|).
    """
    rows = []
    for m in masses:
        for omega in frequencies:
            model = builtin_model('harmonic', 1, m=m, omega=omega)
            metric = svh_metric(model.algebra)
            residual = hermiticity_residual(metric, ferm_matrix(model.algebra, model.hessian(np.zeros(2))))
            rows.append({
                'm': float(m),
                'omega': float(omega),
                'residual': residual,
                'hermitian': residual < TOLERANCES['hermiticity'],
                'm2_omega2_is_one': abs(m * m * omega * omega - 1.0) < TOLERANCES['exact'],
            })
    return rows


def isotropic_alpha(m: float, omega: float) -> float:
    """α = √(mω) turns harmonic(m, ω) into ω(p'² + q'²)/2."""
    if m <= 0 or omega <= 0:
        raise CanonicalError("isotropic scaling needs m > 0 and omega > 0")
    return float(np.sqrt(m * omega))


def signature_pair(metric: Metric, transform: LinearCanonical) -> Tuple[Tuple[int, int, int], Tuple[int, int, int]]:
    """Signatures of g and of its pushforward (equal by Sylvester's law)."""
    return signature(metric), signature(pushforward_metric(metric, transform))
