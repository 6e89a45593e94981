"""
=============================================================================
UNIT TESTS FOR PHYSICAL SUBSPACES
=============================================================================

Tests for the common kernel of H̃_ferm, the closed-form physical
families, the ξ and ψ̂ variable changes and the closure checks.

HOW TO RUN:
    python -m pytest tests/test_physical.py -v
"""

import pytest
import sys
import os

import numpy as np

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from models.algebra import AlgebraDescriptor
from models.errors import AlgebraError
from services.lie_derivative import ferm_matrix, random_hessians
from services.physical import (
    basis_matrix,
    closure_check,
    ferm_kernel,
    four_form_identity_defect,
    gauge_extension_report,
    generic_kernel,
    psi_basis_change,
    psi_inverse_defect,
    same_span,
    svh_physical_basis,
    symplectic_physical_basis,
    symplectic_physical_check,
    xi_basis_change,
    xi_hamiltonian_terms,
    xi_monomial_norms,
    wedge_power,
    xi_pair_state,
)
from services.scalar_products import hermiticity_residual, svh_metric, symplectic_metric


def coupling_hessian():
    """n = 2 Hessian with only ∂q1∂q2 H = 1."""
    hessian = np.zeros((4, 4))
    hessian[0, 1] = hessian[1, 0] = 1.0
    return hessian


# =============================================================================
# TESTS FOR KERNELS
# =============================================================================

class TestKernels:
    """Tests for ferm_kernel and the SvH family."""

    @pytest.mark.parametrize('n', [1, 2, 3])
    def test_kernel_dimension(self, n):
        """The common kernel over generic Hessians has dimension n + 1."""
        algebra = AlgebraDescriptor(n)
        assert generic_kernel(algebra, seed=1).shape[1] == n + 1

    @pytest.mark.parametrize('n', [1, 2, 3])
    def test_kernel_is_svh_family(self, n):
        """The kernel is spanned by the powers of Σ c^q c^p."""
        algebra = AlgebraDescriptor(n)
        family = basis_matrix(svh_physical_basis(algebra))
        assert same_span(generic_kernel(algebra, seed=7), family)

    def test_svh_family_annihilated(self):
        """Every family member is killed by H̃_ferm."""
        algebra = AlgebraDescriptor(2)
        for hessian in random_hessians(algebra, 4, seed=3):
            op = ferm_matrix(algebra, hessian)
            for state in svh_physical_basis(algebra):
                assert np.max(np.abs(op.matrix @ state.to_vector())) < 1e-12

    def test_svh_family_ends_with_volume(self):
        """The top member is ± the volume form."""
        algebra = AlgebraDescriptor(2)
        top = svh_physical_basis(algebra)[-1].to_vector()
        assert abs(abs(top[algebra.volume]) - 1.0) < 1e-12
        assert np.sum(np.abs(top)) == pytest.approx(1.0)

    def test_needs_a_hessian(self):
        """An empty Hessian list is rejected."""
        with pytest.raises(ValueError):
            ferm_kernel(AlgebraDescriptor(1), [])

    def test_same_span_dimension_mismatch(self):
        """Spans of different dimension are never equal."""
        assert not same_span(np.eye(4)[:, :2], np.eye(4)[:, :3])


# =============================================================================
# TESTS FOR VARIABLE CHANGES
# =============================================================================

class TestXiVariables:
    """Tests for the ξ variables."""

    @pytest.mark.parametrize('n', [1, 2])
    def test_anticommutator_table(self, n):
        """{ξ, ξ̄} = -I, {ξ*, ξ̄*} = +I, mixed pairs vanish."""
        change = xi_basis_change(AlgebraDescriptor(n))
        expected = np.diag([-1.0] * n + [1.0] * n)
        np.testing.assert_allclose(change.anticommutator_table(), expected, atol=1e-12)

    @pytest.mark.parametrize('n', [1, 2])
    def test_terms_sum_to_ferm_matrix(self, n):
        """mixed + bar_bar + zz reproduces H̃_ferm."""
        algebra = AlgebraDescriptor(n)
        for hessian in random_hessians(algebra, 3, seed=21):
            terms = xi_hamiltonian_terms(algebra, hessian)
            total = sum(term.matrix for term in terms.values())
            np.testing.assert_allclose(total, ferm_matrix(algebra, hessian).matrix, atol=1e-12)

    def test_monomial_norms_single_pair(self):
        """ξ monomials have symplectic norm (-1)^{number of unstarred ξ}."""
        norms = xi_monomial_norms(AlgebraDescriptor(1))
        np.testing.assert_allclose(norms, np.diag([1.0, -1.0, 1.0, -1.0]), atol=1e-12)

    def test_four_form_identity(self):
        """ξ_iξ*_iξ_jξ*_j = -c^{p_i}c^{q_i}c^{p_j}c^{q_j}."""
        assert four_form_identity_defect(AlgebraDescriptor(2)) < 1e-12

    def test_lift_round_trip(self):
        """from_c inverts to_c."""
        change = xi_basis_change(AlgebraDescriptor(1))
        coefficients = np.array([1.0, 2.0j, -0.5, 3.0])
        np.testing.assert_allclose(change.from_c(change.to_c(coefficients)), coefficients, atol=1e-12)

    def test_pair_state_length(self):
        """One coefficient per degree of freedom."""
        with pytest.raises(ValueError):
            xi_pair_state(AlgebraDescriptor(2), [1.0])


class TestPsiVariables:
    """Tests for the ψ̂ variables."""

    @pytest.mark.parametrize('n', [1, 2])
    def test_inverse(self, n):
        """ĉ and c̄ are recovered from ψ̂ and ψ̄̂."""
        assert psi_inverse_defect(psi_basis_change(AlgebraDescriptor(n))) < 1e-12

    def test_self_adjoint_under_symplectic(self):
        """Every ψ̂ and ψ̄̂ is self-adjoint under the symplectic product."""
        algebra = AlgebraDescriptor(1)
        change = psi_basis_change(algebra)
        metric = symplectic_metric(algebra)
        for op in change.new_ops + change.bar_ops:
            assert hermiticity_residual(metric, op) < 1e-10

    def test_no_monomial_lift(self):
        """ψ̂ mixes ĉ and c̄, so there is no monomial lift."""
        change = psi_basis_change(AlgebraDescriptor(1))
        with pytest.raises(AlgebraError):
            change.to_c([1.0, 0.0, 0.0, 0.0])


# =============================================================================
# TESTS FOR THE SYMPLECTIC PHYSICAL CHECK
# =============================================================================

class TestSymplecticPhysicalCheck:
    """Tests for symplectic_physical_check with a q1-q2 coupling."""

    def test_equal_coefficients_annihilated(self):
        """Σ ξ_iξ*_i with equal weights is killed by the coupling."""
        algebra = AlgebraDescriptor(2)
        check = symplectic_physical_check(algebra, xi_pair_state(algebra, [1.0, 1.0]), coupling_hessian())
        assert check['full'] < 1e-12

    def test_unequal_coefficients_not_physical(self):
        """A single pair ξ_1ξ*_1 is moved by the coupling."""
        algebra = AlgebraDescriptor(2)
        check = symplectic_physical_check(algebra, xi_pair_state(algebra, [1.0, 0.0]), coupling_hessian())
        assert check['full'] == pytest.approx(1.0)

    def test_four_form_annihilated_by_every_piece(self):
        """(Σ ξ_iξ*_i)² is killed by each ξ-form piece for a random Hessian."""
        algebra = AlgebraDescriptor(2)
        candidate = wedge_power(xi_pair_state(algebra, [1.0, 1.0]), 2)
        for hessian in random_hessians(algebra, 3, seed=9):
            check = symplectic_physical_check(algebra, candidate, hessian)
            assert check['last_two'] < 1e-12
            assert check['mixed'] < 1e-12
            assert check['full'] < 1e-12

    def test_parts_bound_the_whole(self):
        """The full residual never exceeds the sum of its parts."""
        algebra = AlgebraDescriptor(2)
        check = symplectic_physical_check(algebra, xi_pair_state(algebra, [2.0, -1.0]), coupling_hessian())
        assert check['full'] <= check['last_two'] + check['mixed'] + 1e-12

    def test_symplectic_basis_vacuum_first(self):
        """The family starts with the constant form."""
        algebra = AlgebraDescriptor(1)
        basis = symplectic_physical_basis(algebra)
        assert len(basis) == 1
        np.testing.assert_allclose(basis[0].to_vector(), [1.0, 0.0, 0.0, 0.0])


# =============================================================================
# TESTS FOR CLOSURE
# =============================================================================

class TestClosure:
    """Tests for closure_check and gauge_extension_report."""

    @pytest.mark.parametrize('n', [1, 2])
    def test_svh_family_closed_under_svh(self, n):
        """H̃ - H̃‡ and [H̃, H̃‡] vanish on the SvH family."""
        algebra = AlgebraDescriptor(n)
        hessians = random_hessians(algebra, 3, seed=4)
        result = closure_check(algebra, svh_metric(algebra), hessians,
                               basis_matrix(svh_physical_basis(algebra)))
        assert result['self_adjoint'] < 1e-12
        assert result['commutator'] < 1e-12
        assert result['dimension'] == n + 1

    def test_gauge_extension_labelled(self):
        """The gauge report is labelled as an extension and covers both families."""
        algebra = AlgebraDescriptor(1)
        report = gauge_extension_report(algebra, random_hessians(algebra, 2, seed=0))
        assert report['extension'] is True
        assert set(report) == {'extension', 'svh_family', 'symplectic_family'}
        assert 'closure' in report['svh_family']
