"""
Physical subspaces of the fiber.

A physical state is annihilated by H̃_ferm for every potential, has
positive norm, and stays physical under evolution. This module extracts
the common kernel of H̃_ferm over sampled Hessians, builds the closed-form
SvH and symplectic families, and provides the ξ and ψ̂ variable changes
used to analyze the symplectic product.
"""

import logging
from math import factorial
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy import linalg

from config.settings import TOLERANCES
from models.algebra import AlgebraDescriptor
from models.basis_change import BasisChange
from models.metric import Metric
from models.multivector import Multivector
from models.operator import EVEN, GrassmannOperator
from services.grassmann import contraction_ops, exterior_lift, monomial, wedge_ops
from services.lie_derivative import ferm_matrix, random_hessians
from services.scalar_products import adjoint, gauge_metric, symplectic_metric

logger = logging.getLogger(__name__)


# =============================================================================
# KERNELS AND CLOSED-FORM FAMILIES
# =============================================================================

def ferm_kernel(algebra: AlgebraDescriptor, hessians: Sequence[np.ndarray],
                tol: Optional[float] = None) -> np.ndarray:
    """
    Orthonormal basis (columns) of ∩_h ker H̃_ferm(h).

    Singular values below tol count as zero.
    """
    if not hessians:
        raise ValueError("at least one Hessian is required")
    tol = TOLERANCES['kernel'] if tol is None else tol
    stacked = np.vstack([ferm_matrix(algebra, h).matrix for h in hessians])
    _, singular_values, vh = np.linalg.svd(stacked)
    scale = max(1.0, singular_values[0]) if len(singular_values) else 1.0
    rank = int(np.sum(singular_values > tol * scale))
    basis = vh[rank:].conj().T
    logger.debug(f"kernel over {len(hessians)} Hessians at n={algebra.n_pairs}: dimension {basis.shape[1]}")
    return basis


def generic_kernel(algebra: AlgebraDescriptor, seed: int, samples: int = 3) -> np.ndarray:
    """Kernel over `samples` random symmetric Hessians (entries uniform in [-1, 1])."""
    return ferm_kernel(algebra, random_hessians(algebra, max(samples, 3), seed))


def symplectic_two_form(algebra: AlgebraDescriptor) -> Multivector:
    """K = Σ_i c^{q_i} c^{p_i}."""
    total = Multivector.zero(algebra)
    for i in range(algebra.n_pairs):
        total = total + monomial(algebra, [algebra.q(i), algebra.p(i)])
    return total


def wedge_power(form: Multivector, power: int) -> Multivector:
    result = Multivector.basis(form.algebra, 0)
    for _ in range(power):
        result = result.wedge(form)
    return result


def svh_physical_basis(algebra: AlgebraDescriptor) -> List[Multivector]:
    """{K^j / j!} for j = 0..n with K = Σ_i c^{q_i}c^{p_i}; the last is ± the volume form."""
    form = symplectic_two_form(algebra)
    return [wedge_power(form, j) * (1.0 / factorial(j)) for j in range(algebra.n_pairs + 1)]


def basis_matrix(states: Sequence[Multivector]) -> np.ndarray:
    """States as columns."""
    return np.column_stack([s.to_vector() for s in states])


def principal_angles(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Principal angles between the column spans of a and b."""
    return linalg.subspace_angles(a, b)


def same_span(a: np.ndarray, b: np.ndarray, tol: Optional[float] = None) -> bool:
    tol = TOLERANCES['principal_angle'] if tol is None else tol
    if a.shape[1] != b.shape[1]:
        return False
    return bool(np.max(principal_angles(a, b), initial=0.0) < tol)


# =============================================================================
# VARIABLE CHANGES
# =============================================================================

def _basis_change(algebra: AlgebraDescriptor, P, Q, R, T, names: List[str]) -> BasisChange:
    wedges = [w.matrix for w in wedge_ops(algebra)]
    contractions = [c.matrix for c in contraction_ops(algebra)]

    def combine(left, right, label):
        ops = []
        for k in range(left.shape[0]):
            matrix = sum(left[k, a] * wedges[a] + right[k, a] * contractions[a]
                         for a in range(algebra.n_generators))
            ops.append(GrassmannOperator(algebra, matrix, 1, label[k]))
        return ops

    fiber = exterior_lift(algebra, P.T) if not np.any(Q) else None
    return BasisChange(
        algebra=algebra, P=P, Q=Q, R=R, T=T,
        new_ops=combine(P, Q, names),
        bar_ops=combine(R, T, [f"bar_{name}" for name in names]),
        names=names,
        fiber_matrix=fiber,
    )


def xi_basis_change(algebra: AlgebraDescriptor) -> BasisChange:
    """
    ξ_i = (c^{q_i} + i c^{p_i})/√2, ξ*_i = (c^{q_i} - i c^{p_i})/√2 with
    ξ̄_i = (-c̄_{q_i} + i c̄_{p_i})/√2 and ξ̄*_i = (c̄_{q_i} + i c̄_{p_i})/√2.

    New variables are ordered [ξ_1..ξ_n, ξ*_1..ξ*_n];
    {ξ_i, ξ̄_j} = -δ_ij, {ξ*_i, ξ̄*_j} = δ_ij and mixed pairs vanish.
    """
    n = algebra.n_pairs
    size = algebra.n_generators
    s = 1 / np.sqrt(2)
    X = np.zeros((size, size), dtype=complex)
    Y = np.zeros((size, size), dtype=complex)
    for i in range(n):
        q, p = algebra.q(i), algebra.p(i)
        X[i, q], X[i, p] = s, 1j * s
        X[n + i, q], X[n + i, p] = s, -1j * s
        Y[i, q], Y[i, p] = -s, 1j * s
        Y[n + i, q], Y[n + i, p] = s, 1j * s
    suffix = (lambda i: '') if n == 1 else (lambda i: str(i + 1))
    names = [f"xi{suffix(i)}" for i in range(n)] + [f"xi{suffix(i)}*" for i in range(n)]
    zeros = np.zeros((size, size))
    return _basis_change(algebra, X, zeros, zeros, Y, names)


def psi_basis_change(algebra: AlgebraDescriptor) -> BasisChange:
    """
    ψ̂^a = (ĉ^a + iω^{ab} c̄_b)/√2 and ψ̄̂_a = (c̄_a + iω_{ab} ĉ^b)/√2,
    with ω_{ab} = -ω^{ab} the inverse form. Both are self-adjoint under
    the symplectic product.
    """
    size = algebra.n_generators
    omega = algebra.omega.astype(complex)
    s = 1 / np.sqrt(2)
    eye = np.eye(size)
    names = [f"psi_{x}" for x in algebra.labels()]
    return _basis_change(algebra, s * eye, 1j * s * omega, -1j * s * omega, s * eye, names)


def psi_inverse_defect(change: BasisChange) -> float:
    """Max deviation of ĉ = (ψ̂ - iωψ̄̂)/√2 and c̄ = (ψ̄̂ - iω_low ψ̂)/√2 from the generators."""
    algebra = change.algebra
    omega = algebra.omega.astype(complex)
    s = 1 / np.sqrt(2)
    worst = 0.0
    wedges = wedge_ops(algebra)
    contractions = contraction_ops(algebra)
    for a in range(algebra.n_generators):
        c = s * change.new_ops[a].matrix - 1j * s * sum(
            omega[a, b] * change.bar_ops[b].matrix for b in range(algebra.n_generators))
        cbar = s * change.bar_ops[a].matrix + 1j * s * sum(
            omega[a, b] * change.new_ops[b].matrix for b in range(algebra.n_generators))
        worst = max(worst, float(np.max(np.abs(c - wedges[a].matrix))),
                    float(np.max(np.abs(cbar - contractions[a].matrix))))
    return worst


# =============================================================================
# ξ-FORM OF THE FIBER HAMILTONIAN
# =============================================================================

def z_hessian_blocks(hessian: np.ndarray, n_pairs: int) -> Dict[str, np.ndarray]:
    """
    Hessian in the complex coordinates, with V = [I, -iI]/√2 and V̄ = [I, iI]/√2:
    'mixed' = V h V̄ᵀ, 'zz' = V h Vᵀ, 'bar_bar' = V̄ h V̄ᵀ.
    """
    eye = np.eye(n_pairs)
    v = np.hstack([eye, -1j * eye]) / np.sqrt(2)
    v_bar = np.hstack([eye, 1j * eye]) / np.sqrt(2)
    hessian = np.asarray(hessian, dtype=float)
    return {
        'mixed': v @ hessian @ v_bar.T,
        'zz': v @ hessian @ v.T,
        'bar_bar': v_bar @ hessian @ v_bar.T,
    }


def xi_hamiltonian_terms(algebra: AlgebraDescriptor, hessian: np.ndarray) -> Dict[str, GrassmannOperator]:
    """
    H̃_ferm split in ξ variables:

        mixed   = Σ D[k, a] (ξ_k ξ̄_a + ξ*_a ξ̄*_k)
        bar_bar = Σ D̄[a, k] ξ*_a ξ̄_k
        zz      = Σ Z[a, k] ξ_a ξ̄*_k

    The three operators sum to ferm_matrix(algebra, hessian).
    """
    n = algebra.n_pairs
    change = xi_basis_change(algebra)
    xi, xi_star = change.new_ops[:n], change.new_ops[n:]
    bar, bar_star = change.bar_ops[:n], change.bar_ops[n:]
    blocks = z_hessian_blocks(hessian, n)
    dim = algebra.dim
    mixed = np.zeros((dim, dim), dtype=complex)
    bar_bar = np.zeros((dim, dim), dtype=complex)
    zz = np.zeros((dim, dim), dtype=complex)
    for k in range(n):
        for a in range(n):
            mixed += blocks['mixed'][k, a] * (xi[k].matrix @ bar[a].matrix
                                              + xi_star[a].matrix @ bar_star[k].matrix)
            bar_bar += blocks['bar_bar'][a, k] * (xi_star[a].matrix @ bar[k].matrix)
            zz += blocks['zz'][a, k] * (xi[a].matrix @ bar_star[k].matrix)
    return {
        'mixed': GrassmannOperator(algebra, mixed, EVEN, 'mixed'),
        'bar_bar': GrassmannOperator(algebra, bar_bar, EVEN, 'bar_bar'),
        'zz': GrassmannOperator(algebra, zz, EVEN, 'zz'),
    }


def xi_pair_state(algebra: AlgebraDescriptor, coefficients: Sequence[complex]) -> Multivector:
    """Σ_i a_i ξ_i ξ*_i in the c basis (ξ_i ξ*_i = -i c^{q_i} c^{p_i})."""
    if len(coefficients) != algebra.n_pairs:
        raise ValueError(f"need {algebra.n_pairs} coefficients")
    total = Multivector.zero(algebra)
    for i, a in enumerate(coefficients):
        total = total + monomial(algebra, [algebra.q(i), algebra.p(i)], -1j * a)
    return total


def symplectic_physical_check(algebra: AlgebraDescriptor, candidate: Multivector,
                              hessian: np.ndarray) -> Dict[str, float]:
    """
    Norms of the ξ-form pieces of H̃_ferm applied to a candidate.

    'last_two' is the bar_bar + zz part, 'mixed' the ξξ̄ part and 'full'
    the whole operator.
    """
    terms = xi_hamiltonian_terms(algebra, hessian)
    vector = candidate.to_vector()
    last_two = (terms['bar_bar'].matrix + terms['zz'].matrix) @ vector
    mixed = terms['mixed'].matrix @ vector
    full = ferm_matrix(algebra, hessian).matrix @ vector
    return {
        'last_two': float(np.linalg.norm(last_two)),
        'mixed': float(np.linalg.norm(mixed)),
        'full': float(np.linalg.norm(full)),
    }


def symplectic_physical_basis(algebra: AlgebraDescriptor) -> List[Multivector]:
    """
    Even powers K_ξ^{2j}/(2j)! of K_ξ = Σ_i ξ_i ξ*_i (= -i Σ_i c^{q_i}c^{p_i}).

    These have positive symplectic norm; odd powers come with negative norm.
    """
    form = xi_pair_state(algebra, [1.0] * algebra.n_pairs)
    return [wedge_power(form, 2 * j) * (1.0 / factorial(2 * j)) for j in range(algebra.n_pairs // 2 + 1)]


def gram_matrix(metric: Metric, states: Sequence[Multivector]) -> np.ndarray:
    columns = basis_matrix(states)
    return columns.conj().T @ metric.g @ columns


def xi_monomial_norms(algebra: AlgebraDescriptor) -> np.ndarray:
    """
    Gram matrix of all ξ-monomials under the symplectic product;
    diagonal with entries (-1)^{number of unstarred ξ}.
    """
    fiber = xi_basis_change(algebra).fiber_matrix
    return fiber.conj().T @ symplectic_metric(algebra).g @ fiber


def four_form_identity_defect(algebra: AlgebraDescriptor) -> float:
    """max over i≠j of |ξ_iξ*_iξ_jξ*_j + c^{p_i}c^{q_i}c^{p_j}c^{q_j}|."""
    change = xi_basis_change(algebra)
    n = algebra.n_pairs
    worst = 0.0
    vacuum = Multivector.basis(algebra, 0).to_vector()
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            ops = [change.new_ops[i], change.new_ops[n + i], change.new_ops[j], change.new_ops[n + j]]
            vector = vacuum
            for op in reversed(ops):
                vector = op.matrix @ vector
            target = monomial(algebra, [algebra.p(i), algebra.q(i), algebra.p(j), algebra.q(j)], -1)
            worst = max(worst, float(np.max(np.abs(vector - target.to_vector()))))
    return worst


# =============================================================================
# CLOSURE
# =============================================================================

def closure_check(algebra: AlgebraDescriptor, metric: Metric, hessians: Sequence[np.ndarray],
                  subspace: np.ndarray) -> Dict:
    """
    Check (H̃ - H̃‡)ψ = 0 and [H̃, H̃‡]ψ = 0 on every basis vector ψ of
    the subspace (columns) for every sampled Hessian.

    Returns:
        Dict with 'self_adjoint' and 'commutator' maximum residuals
    """
    subspace = np.asarray(subspace, dtype=complex)
    worst_adjoint = 0.0
    worst_commutator = 0.0
    if subspace.size:
        for hessian in hessians:
            op = ferm_matrix(algebra, hessian)
            dagger = adjoint(metric, op)
            difference = (op.matrix - dagger.matrix) @ subspace
            commutator = (op.matrix @ dagger.matrix - dagger.matrix @ op.matrix) @ subspace
            worst_adjoint = max(worst_adjoint, float(np.max(np.abs(difference))))
            worst_commutator = max(worst_commutator, float(np.max(np.abs(commutator))))
    return {'self_adjoint': worst_adjoint, 'commutator': worst_commutator,
            'metric': metric.describe(), 'dimension': int(subspace.shape[1]) if subspace.ndim == 2 else 0}


def gauge_extension_report(algebra: AlgebraDescriptor, hessians: Sequence[np.ndarray]) -> Dict:
    """
    The SvH and symplectic physical families examined under the gauge
    product: Gram matrices and closure residuals. This goes beyond the
    sketch available for the gauge case and is labelled as an extension.
    """
    metric = gauge_metric(algebra)
    report = {'extension': True}
    for name, states in (('svh_family', svh_physical_basis(algebra)),
                         ('symplectic_family', symplectic_physical_basis(algebra))):
        gram = gram_matrix(metric, states)
        report[name] = {
            'gram': [[[float(x.real), float(x.imag)] for x in row] for row in gram],
            'closure': closure_check(algebra, metric, hessians, basis_matrix(states)),
        }
    return report
