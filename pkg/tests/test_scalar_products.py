"""
=============================================================================
UNIT TESTS FOR SCALAR-PRODUCT METRICS
=============================================================================

Tests for the SvH, gauge and symplectic metrics, the general families,
metric adjoints, hermiticity residuals, signatures and the conjugation
rule classifier and solver.

HOW TO RUN:
    python -m pytest tests/test_scalar_products.py -v
"""

import pytest
import sys
import os

import numpy as np

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from models.algebra import AlgebraDescriptor
from models.errors import ConjugationError, MetricError
from models.metric import ConjugationRule, Metric, PairRule
from models.operator import GrassmannOperator
from services.grassmann import contraction_ops, wedge_ops
from services.lie_derivative import ferm_matrix, random_hessians
from services.scalar_products import (
    adjoint,
    classify_conjugation,
    gauge_metric,
    general_metric,
    hermiticity_residual,
    inner,
    metric_by_name,
    metric_eigenvalues,
    metric_from_conjugation,
    norm,
    signature,
    svh_metric,
    symplectic_metric,
)


def random_state(dim, rng):
    return rng.normal(size=dim) + 1j * rng.normal(size=dim)


# =============================================================================
# TESTS FOR THE NAMED METRICS
# =============================================================================

class TestNamedMetrics:
    """Tests for svh_metric(), gauge_metric() and symplectic_metric()."""

    def test_svh_is_identity(self):
        """‖ψ‖² = Σ|ψ_S|² under SvH."""
        algebra = AlgebraDescriptor(1)
        assert np.array_equal(svh_metric(algebra).g, np.eye(4))
        psi = np.array([1, 2j, -1, 0.5])
        assert norm(svh_metric(algebra), psi) == pytest.approx(1 + 4 + 1 + 0.25)

    def test_svh_signature(self):
        assert signature(svh_metric(AlgebraDescriptor(2))) == (16, 0, 0)

    def test_gauge_matrix_n1(self):
        expected = np.array([[0, 0, 0, -1j], [0, 0, -1j, 0], [0, 1j, 0, 0], [1j, 0, 0, 0]])
        assert np.allclose(gauge_metric(AlgebraDescriptor(1)).g, expected)

    def test_gauge_zero_forms_have_zero_norm(self):
        metric = gauge_metric(AlgebraDescriptor(1))
        assert norm(metric, np.array([3.0, 0, 0, 0])) == 0

    def test_gauge_signature(self):
        assert signature(gauge_metric(AlgebraDescriptor(1))) == (2, 2, 0)

    @pytest.mark.parametrize('n_pairs', [1, 2, 3])
    def test_gauge_is_conjugate_symmetric(self, n_pairs):
        metric = gauge_metric(AlgebraDescriptor(n_pairs))
        assert metric.hermiticity_defect < 1e-12
        assert metric.is_invertible()

    def test_symplectic_matrix_n1(self):
        expected = np.array([[1, 0, 0, 0], [0, 0, 1j, 0], [0, -1j, 0, 0], [0, 0, 0, -1]])
        assert np.allclose(symplectic_metric(AlgebraDescriptor(1)).g, expected)

    def test_symplectic_norms(self):
        """Two-form negative, real one-forms null, zero-form positive."""
        metric = symplectic_metric(AlgebraDescriptor(1))
        assert norm(metric, np.array([0, 0, 0, 1.0])) == pytest.approx(-1)
        assert norm(metric, np.array([0, 0.7, -1.3, 0])) == pytest.approx(0, abs=1e-12)
        assert norm(metric, np.array([2.0, 0, 0, 0])) == pytest.approx(4)

    def test_symplectic_signature(self):
        assert signature(symplectic_metric(AlgebraDescriptor(1))) == (2, 2, 0)

    @pytest.mark.parametrize('builder', [svh_metric, gauge_metric, symplectic_metric])
    def test_norms_are_real(self, builder):
        """A conjugate-symmetric metric gives real ⟨ψ|ψ⟩."""
        metric = builder(AlgebraDescriptor(2))
        rng = np.random.default_rng(11)
        for _ in range(5):
            psi = random_state(16, rng)
            assert abs(inner(metric, psi, psi).imag) < 1e-10


# =============================================================================
# TESTS FOR THE GENERAL FAMILIES
# =============================================================================

class TestGeneralFamilies:
    """Tests for general_metric() and metric_by_name()."""

    def test_family_a_eigenvalues(self):
        """Family A has eigenvalues {1, b, -b, -b²}."""
        values = metric_eigenvalues(general_metric('A', b=2.0))
        assert np.allclose(np.sort(values.real), [-4, -2, 1, 2])
        assert np.allclose(values.imag, 0)

    def test_family_a_signature(self):
        assert signature(general_metric('A', b=2.0)) == (2, 2, 0)

    def test_family_a_at_minus_one_is_symplectic(self):
        assert np.allclose(general_metric('A', b=-1.0).g, symplectic_metric(AlgebraDescriptor(1)).g)

    def test_family_a_rejects_zero(self):
        with pytest.raises(MetricError):
            general_metric('A', b=0.0)

    def test_family_b_reproduces_gauge(self):
        metric = general_metric('B', theta=0.0, gamma_i=0.0, g03=-1j)
        assert np.allclose(metric.g, gauge_metric(AlgebraDescriptor(1)).g)

    def test_family_b_rejects_real_twist(self):
        """g03·exp(iθ) must be imaginary."""
        with pytest.raises(MetricError):
            general_metric('B', theta=0.0, gamma_i=0.0, g03=1.0)

    def test_family_c_is_indefinite(self):
        n_plus, n_minus, _ = signature(general_metric('C', theta=0.0, b=1.0, g03=1j))
        assert n_plus > 0 and n_minus > 0

    def test_unknown_family(self):
        with pytest.raises(MetricError):
            general_metric('D')

    def test_families_only_for_one_pair(self):
        with pytest.raises(MetricError):
            metric_by_name(AlgebraDescriptor(2), 'A', {'b': 1.0})

    def test_metric_json_round_trip(self):
        metric = general_metric('B', theta=0.0, gamma_i=1.0, g03=1j)
        restored = Metric.from_json(metric.to_json())
        assert np.allclose(restored.g, metric.g)
        assert restored.family == 'generalB'
        assert restored.params['g03'] == 1j

    def test_malformed_metric_document(self):
        with pytest.raises(MetricError):
            Metric.from_json({'n_pairs': 1})

    def test_metric_shape_checked(self):
        with pytest.raises(MetricError):
            Metric(AlgebraDescriptor(1), np.eye(3))


# =============================================================================
# TESTS FOR ADJOINTS AND HERMITICITY
# =============================================================================

class TestAdjoint:
    """Tests for adjoint() against the known conjugation tables."""

    def test_svh_table(self):
        algebra = AlgebraDescriptor(2)
        metric = svh_metric(algebra)
        for w, c in zip(wedge_ops(algebra), contraction_ops(algebra)):
            assert adjoint(metric, w).allclose(c)

    @pytest.mark.parametrize('n_pairs', [1, 2])
    def test_gauge_table(self, n_pairs):
        algebra = AlgebraDescriptor(n_pairs)
        metric = gauge_metric(algebra)
        for op in wedge_ops(algebra) + contraction_ops(algebra):
            assert adjoint(metric, op).allclose(op, tol=1e-12)

    def test_gauge_generators_self_adjoint_three_pairs(self):
        """At n = 3 the gauge product keeps ĉ^a‡ = ĉ^a and c̄_a‡ = c̄_a for all six generators."""
        algebra = AlgebraDescriptor(3)
        metric = gauge_metric(algebra)
        for op in wedge_ops(algebra) + contraction_ops(algebra):
            assert np.max(np.abs(adjoint(metric, op).matrix - op.matrix)) < 1e-10

    def test_symplectic_table(self):
        """ĉ^q‡ = i c̄_p and ĉ^p‡ = -i c̄_q."""
        algebra = AlgebraDescriptor(1)
        metric = symplectic_metric(algebra)
        w_q, w_p = wedge_ops(algebra)
        c_q, c_p = contraction_ops(algebra)
        assert adjoint(metric, w_q).allclose(c_p * 1j)
        assert adjoint(metric, w_p).allclose(c_q * -1j)

    def test_adjoint_moves_across_product(self):
        """⟨Φ|Aψ⟩ = ⟨A‡Φ|ψ⟩ for random states and operators."""
        algebra = AlgebraDescriptor(2)
        metric = gauge_metric(algebra)
        rng = np.random.default_rng(5)
        op = GrassmannOperator(algebra, rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16)), None)
        dagger = adjoint(metric, op)
        phi, psi = random_state(16, rng), random_state(16, rng)
        left = inner(metric, phi, op.matrix @ psi)
        right = inner(metric, dagger.matrix @ phi, psi)
        assert abs(left - right) < 1e-9 * max(1.0, abs(left))

    def test_adjoint_is_an_involution(self):
        algebra = AlgebraDescriptor(1)
        metric = general_metric('A', b=2.0)
        op = wedge_ops(algebra)[0] @ contraction_ops(algebra)[1]
        assert adjoint(metric, adjoint(metric, op)).allclose(op, tol=1e-12)

    def test_singular_metric_rejected(self):
        algebra = AlgebraDescriptor(1)
        singular = Metric(algebra, np.diag([1, 1, 1, 0]))
        with pytest.raises(MetricError):
            hermiticity_residual(singular, wedge_ops(algebra)[0])


class TestHermiticity:
    """Tests for hermiticity_residual() on the fiber Hamiltonian."""

    @pytest.mark.parametrize('n_pairs', [1, 2])
    def test_symplectic_always_hermitian(self, n_pairs):
        algebra = AlgebraDescriptor(n_pairs)
        metric = symplectic_metric(algebra)
        for hessian in random_hessians(algebra, 5, seed=2):
            assert hermiticity_residual(metric, ferm_matrix(algebra, hessian)) < 1e-10

    @pytest.mark.parametrize('n_pairs', [1, 2])
    def test_gauge_always_hermitian(self, n_pairs):
        algebra = AlgebraDescriptor(n_pairs)
        metric = gauge_metric(algebra)
        for hessian in random_hessians(algebra, 5, seed=4):
            assert hermiticity_residual(metric, ferm_matrix(algebra, hessian)) < 1e-10

    def test_svh_harmonic_is_hermitian(self):
        algebra = AlgebraDescriptor(1)
        assert hermiticity_residual(svh_metric(algebra), ferm_matrix(algebra, np.eye(2))) < 1e-12

    def test_svh_residual_closed_form(self):
        """V'' = 2 gives √2·|V'' - 1| = √2."""
        algebra = AlgebraDescriptor(1)
        residual = hermiticity_residual(svh_metric(algebra), ferm_matrix(algebra, np.diag([2.0, 1.0])))
        assert residual == pytest.approx(np.sqrt(2), rel=1e-12)


# =============================================================================
# TESTS FOR CONJUGATION RULES
# =============================================================================

class TestConjugationRules:
    """Tests for classify_conjugation() and metric_from_conjugation()."""

    def test_family_tags(self):
        assert classify_conjugation(ConjugationRule.symplectic(AlgebraDescriptor(1))).family == 'family1'
        rule_b = ConjugationRule.family(AlgebraDescriptor(1), 'B', theta=0.3, gamma_i=1.0)
        assert classify_conjugation(rule_b).family == 'family2'
        rule_c = ConjugationRule.family(AlgebraDescriptor(1), 'C', theta=0.3, b=2.0)
        assert classify_conjugation(rule_c).family == 'family3'

    def test_family1_beta_gamma(self):
        report = classify_conjugation(ConjugationRule.family(AlgebraDescriptor(1), 'A', b=2.0))
        assert report.consistent
        assert abs(report.beta_gamma['p'] - 1) < 1e-12

    def test_svh_rule_is_consistent(self):
        report = classify_conjugation(ConjugationRule.svh(AlgebraDescriptor(1)))
        assert report.consistent
        assert report.failures == []

    def test_mixed_pairing_is_inconsistent(self):
        """A family-1 p-rule with a family-2 q-rule breaks {ĉ^q, c̄_q} = 1."""
        rule = ConjugationRule.from_pairs(AlgebraDescriptor(1), PairRule.family1(1.0),
                                          PairRule.family2(0.0, 0.0))
        report = classify_conjugation(rule)
        assert not report.consistent
        assert report.family == 'family1/family2'
        assert report.failures

    def test_constraint_violation_names_relation(self):
        rule = ConjugationRule.from_pairs(AlgebraDescriptor(1), PairRule(2, 0, 0, 2), PairRule(1, 0, 0, 1))
        with pytest.raises(ConjugationError) as excinfo:
            classify_conjugation(rule)
        assert excinfo.value.relation == 'alpha*delta - beta*gamma = 1'

    def test_solver_reproduces_svh(self):
        metric = metric_from_conjugation(ConjugationRule.svh(AlgebraDescriptor(1)), {(0, 0): 1})
        assert np.allclose(metric.g, np.eye(4))

    def test_solver_reproduces_symplectic(self):
        algebra = AlgebraDescriptor(1)
        metric = metric_from_conjugation(ConjugationRule.symplectic(algebra), {(0, 0): 1})
        assert np.allclose(metric.g, symplectic_metric(algebra).g)

    def test_solver_reproduces_family_a(self):
        rule = ConjugationRule.family(AlgebraDescriptor(1), 'A', b=2.0)
        metric = metric_from_conjugation(rule, {(0, 0): 1})
        assert np.allclose(metric.g, general_metric('A', b=2.0).g)

    @pytest.mark.parametrize('n_pairs', [1, 2])
    def test_solver_reproduces_gauge(self, n_pairs):
        algebra = AlgebraDescriptor(n_pairs)
        metric = metric_from_conjugation(ConjugationRule.gauge(algebra), {(algebra.volume, 0): 1j ** n_pairs})
        assert np.allclose(metric.g, gauge_metric(algebra).g)

    @pytest.mark.parametrize('kind, params', [
        ('B', {'theta': 0.0, 'gamma_i': 1.0, 'g03': 1j}),
        ('B', {'theta': 0.0, 'gamma_i': 0.0, 'g03': -1j}),
        ('B', {'theta': np.pi / 2, 'gamma_i': 1.0, 'g03': 1.0 + 0j}),
        ('C', {'theta': 0.0, 'b': 1.0, 'g03': 1j}),
        ('C', {'theta': 0.0, 'b': -2.0, 'g03': -1j}),
    ])
    def test_solver_reproduces_families_b_c(self, kind, params):
        """Pinning g[0, 3] = g03 recovers the closed-form B and C metrics."""
        algebra = AlgebraDescriptor(1)
        keys = ('theta', 'gamma_i') if kind == 'B' else ('theta', 'b')
        rule = ConjugationRule.family(algebra, kind, **{k: params[k] for k in keys})
        metric = metric_from_conjugation(rule, {(0, algebra.volume): params['g03']})
        assert np.allclose(metric.g, general_metric(kind, params).g, atol=1e-10)

    def test_solver_rejects_family_b_with_real_twist(self):
        """g03·e^{iθ} real leaves only a non-conjugate-symmetric solution."""
        algebra = AlgebraDescriptor(1)
        rule = ConjugationRule.family(algebra, 'B', theta=0.0, gamma_i=1.0)
        with pytest.raises(MetricError):
            metric_from_conjugation(rule, {(0, algebra.volume): 1.0})

    def test_solver_needs_normalization(self):
        with pytest.raises(MetricError):
            metric_from_conjugation(ConjugationRule.svh(AlgebraDescriptor(1)), {})

    def test_solver_rejects_inconsistent_rule(self):
        rule = ConjugationRule.from_pairs(AlgebraDescriptor(1), PairRule.family1(1.0),
                                          PairRule.family2(0.0, 0.0))
        with pytest.raises(MetricError):
            metric_from_conjugation(rule, {(0, 0): 1})

    def test_solver_size_limit(self):
        with pytest.raises(MetricError):
            metric_from_conjugation(ConjugationRule.svh(AlgebraDescriptor(3)), {(0, 0): 1})
