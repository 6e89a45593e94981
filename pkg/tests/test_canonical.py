"""
=============================================================================
UNIT TESTS FOR CANONICAL TRANSFORMATIONS
=============================================================================

Tests for linear canonical transforms, their lift to the fiber, metric
pushforward and the invariance of the hermiticity residual.

HOW TO RUN:
    python -m pytest tests/test_canonical.py -v
"""

import pytest
import sys
import os

import numpy as np

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from models.algebra import AlgebraDescriptor
from models.canonical import LinearCanonical
from models.errors import CanonicalError
from services.canonical import (
    fiber_lift,
    harmonic_frontier,
    hermiticity_invariance,
    isotropic_alpha,
    matrix_transform,
    pushforward_metric,
    scaling_transform,
    signature_pair,
    transform_hessian,
    transform_model,
    transform_operator,
)
from services.dynamics import builtin_model
from services.lie_derivative import ferm_matrix, random_hessian
from services.scalar_products import gauge_metric, inner, svh_metric, symplectic_metric


# =============================================================================
# TESTS FOR CONSTRUCTORS
# =============================================================================

class TestConstructors:
    """Tests for scaling_transform and matrix_transform."""

    def test_scaling(self):
        """Scaling is diag(α, 1/α) and symplectic."""
        transform = scaling_transform(2.0)
        np.testing.assert_allclose(transform.S, np.diag([2.0, 0.5]))
        assert transform.symplectic_defect() < 1e-15
        assert transform.describe() == 'scaling(alpha=2.0)'

    def test_scaling_two_pairs(self):
        """With n = 2 every q is scaled by α."""
        transform = scaling_transform(3.0, 2)
        np.testing.assert_allclose(np.diag(transform.S), [3.0, 3.0, 1 / 3, 1 / 3])

    def test_zero_alpha(self):
        """α = 0 is not invertible."""
        with pytest.raises(CanonicalError):
            scaling_transform(0.0)

    def test_shear_accepted(self):
        """A unit-determinant 2x2 matrix is symplectic."""
        transform = matrix_transform([[1.0, 1.0], [0.0, 1.0]])
        assert transform.n_pairs == 1

    def test_non_symplectic_rejected(self):
        """diag(2, 1) does not preserve ω."""
        with pytest.raises(CanonicalError, match="not symplectic"):
            matrix_transform([[2.0, 0.0], [0.0, 1.0]])

    @pytest.mark.parametrize('S', [[[1.0, 0.0, 0.0]], np.eye(3), [1.0, 2.0]])
    def test_bad_shapes(self, S):
        """Only square matrices of even size are transforms."""
        with pytest.raises(CanonicalError):
            LinearCanonical(S)


# =============================================================================
# TESTS FOR THE FIBER ACTION
# =============================================================================

class TestFiberAction:
    """Tests for fiber_lift, pushforward_metric and transform_hessian."""

    def test_isotropic_hessian(self):
        """α = √(mω) turns harmonic(m, ω) into diag(ω, ω)."""
        m, omega = 2.0, 3.0
        model = builtin_model('harmonic', 1, m=m, omega=omega)
        transform = scaling_transform(isotropic_alpha(m, omega))
        transformed = transform_hessian(model.hessian([0.0, 0.0]), transform)
        np.testing.assert_allclose(transformed, np.diag([omega, omega]), atol=1e-12)

    def test_svh_pushforward_under_scaling(self):
        """SvH pushes forward to diag(1, α², 1/α², 1)."""
        algebra = AlgebraDescriptor(1)
        alpha = 2.0
        pushed = pushforward_metric(svh_metric(algebra), scaling_transform(alpha))
        np.testing.assert_allclose(pushed.g, np.diag([1.0, alpha ** 2, 1 / alpha ** 2, 1.0]), atol=1e-12)
        assert pushed.family == 'custom'
        assert pushed.params['transform'] == 'scaling(alpha=2.0)'

    def test_pushforward_preserves_inner_products(self):
        """⟨FΦ|Fψ⟩_{g'} = ⟨Φ|ψ⟩_g."""
        algebra = AlgebraDescriptor(1)
        metric = gauge_metric(algebra)
        transform = matrix_transform([[1.0, 1.0], [0.0, 1.0]])
        lift = fiber_lift(transform)
        pushed = pushforward_metric(metric, transform)
        rng = np.random.default_rng(6)
        phi = rng.normal(size=4) + 1j * rng.normal(size=4)
        psi = rng.normal(size=4) + 1j * rng.normal(size=4)
        assert inner(pushed, lift @ phi, lift @ psi) == pytest.approx(inner(metric, phi, psi), abs=1e-12)

    def test_ferm_matrix_is_covariant(self):
        """F H̃_ferm(h) F⁻¹ = H̃_ferm(S^{-T} h S^{-1})."""
        algebra = AlgebraDescriptor(1)
        transform = matrix_transform([[1.0, 1.0], [0.0, 1.0]])
        hessian = random_hessian(2, np.random.default_rng(12))
        moved = transform_operator(ferm_matrix(algebra, hessian), transform)
        expected = ferm_matrix(algebra, transform_hessian(hessian, transform))
        np.testing.assert_allclose(moved.matrix, expected.matrix, atol=1e-12)

    def test_dimension_mismatch(self):
        """A transform for n = 2 cannot push an n = 1 metric."""
        with pytest.raises(CanonicalError):
            pushforward_metric(svh_metric(AlgebraDescriptor(1)), scaling_transform(2.0, 2))

    def test_transform_model_energy(self):
        """H'(Sφ) = H(φ)."""
        model = builtin_model('quartic')
        transform = scaling_transform(1.5)
        primed = transform_model(model, transform)
        phi = np.array([0.4, -0.9])
        assert primed.evaluate(transform.S @ phi) == pytest.approx(model.evaluate(phi))
        assert primed.params['transform'] == 'scaling(alpha=1.5)'


# =============================================================================
# TESTS FOR HERMITICITY INVARIANCE
# =============================================================================

class TestHermiticityInvariance:
    """Tests for hermiticity_invariance, harmonic_frontier and signature_pair."""

    def test_nonzero_residual_consistent(self):
        """A non-zero SvH residual stays non-zero and pulls back exactly."""
        model = builtin_model('harmonic', 1, m=1.0, omega=2.0)
        metric = svh_metric(model.algebra)
        result = hermiticity_invariance(model, metric, scaling_transform(np.sqrt(2.0)))
        assert result['before'] == pytest.approx(3 * np.sqrt(2.0))
        assert result['consistent'] is True
        assert result['pulled_back'] == pytest.approx(result['before'], rel=1e-9)
        lower, upper = result['bounds']
        assert lower <= result['after'] * (1 + 1e-9)
        assert result['after'] <= upper * (1 + 1e-9)

    def test_zero_residual_stays_zero(self):
        """Under the symplectic product H̃_ferm is self-adjoint in both frames."""
        model = builtin_model('quartic')
        metric = symplectic_metric(model.algebra)
        result = hermiticity_invariance(model, metric, matrix_transform([[1.0, 1.0], [0.0, 1.0]]),
                                        phi=[0.5, 0.2])
        assert result['before'] < 1e-10
        assert result['after'] < 1e-9
        assert result['consistent'] is True

    def test_frontier(self):
        """The SvH residual vanishes exactly on m²ω² = 1."""
        rows = harmonic_frontier()
        assert len(rows) == 9
        hermitian = {(row['m'], row['omega']) for row in rows if row['hermitian']}
        assert hermitian == {(0.5, 2.0), (1.0, 1.0), (2.0, 0.5)}
        for row in rows:
            assert row['hermitian'] == row['m2_omega2_is_one']
            expected = np.sqrt(2) * abs(row['m'] * row['omega'] ** 2 - 1 / row['m'])
            assert row['residual'] == pytest.approx(expected, abs=1e-12)

    def test_signatures_equal(self):
        """Sylvester's law: the pushforward keeps the signature."""
        metric = gauge_metric(AlgebraDescriptor(1))
        before, after = signature_pair(metric, scaling_transform(3.0))
        assert before == after == (2, 2, 0)

    def test_isotropic_alpha(self):
        """α = √(mω); non-positive inputs are rejected."""
        assert isotropic_alpha(2.0, 8.0) == pytest.approx(4.0)
        with pytest.raises(CanonicalError):
            isotropic_alpha(0.0, 1.0)
        with pytest.raises(CanonicalError):
            isotropic_alpha(1.0, -1.0)
