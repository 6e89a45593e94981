"""
The Lie-derivative Hamiltonian on forms.

H̃ = H̃_bos + H̃_ferm. H̃_ferm = i c̄_a ω^{ab} ∂_b∂_d H c^d acts on the fiber
at a frozen phase point; H̃_bos is transport along the classical flow and
is handled by the method of characteristics: the fiber state rides the
trajectory and obeys ψ̇ = -i H̃_ferm(φ(t)) ψ.
"""

import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import fft, linalg

from config.settings import INTEGRATION_DEFAULTS, TOLERANCES
from models.algebra import AlgebraDescriptor
from models.dynamics import HamiltonianModel, JacobiState
from models.errors import AlgebraError, MetricError
from models.fiber import FiberTrajectory, RingLiouvillian, real_spectrum
from models.metric import Metric
from models.multivector import Multivector
from models.operator import EVEN, GrassmannOperator
from services.dynamics import flow
from services.grassmann import contraction_ops, wedge_ops
from services.scalar_products import hermiticity_residual
from utils.bitmask import bits_of, popcount, sort_sign
from utils.integrators import integrate

logger = logging.getLogger(__name__)


# =============================================================================
# FIBER OPERATOR
# =============================================================================

def ferm_matrix(algebra: AlgebraDescriptor, hessian) -> GrassmannOperator:
    """
    H̃_ferm = i Σ_{a,d} c̄_a M^a_d c^d with M = ω·hessian.

    On one-forms it acts as -iMᵀ on the coefficient vector; it annihilates
    the zero-form and the volume form.

    Raises:
        AlgebraError: Hessian shape does not match the algebra
    """
    hessian = np.asarray(hessian, dtype=float)
    size = algebra.n_generators
    if hessian.shape != (size, size):
        raise AlgebraError(f"Hessian must be {size}x{size} for n = {algebra.n_pairs}, got {hessian.shape}")
    generator = algebra.omega @ ((hessian + hessian.T) / 2)
    wedges = wedge_ops(algebra)
    contractions = contraction_ops(algebra)
    matrix = np.zeros((algebra.dim, algebra.dim), dtype=complex)
    for a in range(size):
        for d in range(size):
            if generator[a, d]:
                matrix += generator[a, d] * (contractions[a].matrix @ wedges[d].matrix)
    return GrassmannOperator(algebra, 1j * matrix, EVEN, 'H_ferm')


def random_hessian(size: int, rng: np.random.Generator) -> np.ndarray:
    """Symmetric matrix with entries uniform in [-1, 1]."""
    raw = rng.uniform(-1.0, 1.0, size=(size, size))
    return np.triu(raw) + np.triu(raw, 1).T


def random_hessians(algebra: AlgebraDescriptor, count: int, seed: int) -> List[np.ndarray]:
    rng = np.random.default_rng(seed)
    return [random_hessian(algebra.n_generators, rng) for _ in range(count)]


# =============================================================================
# CHARACTERISTICS
# =============================================================================

def _metric_norms(metric: Metric, fibers: np.ndarray) -> np.ndarray:
    return np.real(np.einsum('ki,ij,kj->k', fibers.conj(), metric.g, fibers))


def evolve_fiber(model: HamiltonianModel, metric: Metric, phi0, fiber0: Multivector, t: float,
                 dt: Optional[float] = None, sample_every: Optional[int] = 1) -> FiberTrajectory:
    """
    Carry a fiber state along the classical orbit from φ0.

    Integrates φ̇ = ω∂H, J̇ = M(φ)J and ψ̇ = -iH̃_ferm(φ)ψ as one RK4 system.

    Args:
        model: Hamiltonian
        metric: Scalar product used for the norm series
        phi0: Initial phase point
        fiber0: Initial (parameter-free) fiber state
        t: Duration
        dt: Largest step
        sample_every: Sampling stride in steps

    Returns:
        FiberTrajectory
    """
    dt = INTEGRATION_DEFAULTS['dt'] if dt is None else dt
    algebra = fiber0.algebra
    if algebra.n_pairs != model.n_pairs or algebra.single:
        raise AlgebraError("fiber and model have different numbers of degrees of freedom")
    if not metric.algebra.same_fiber(algebra):
        raise MetricError("metric and fiber live on different algebras")
    size = algebra.n_generators
    dim = algebra.dim
    wedges = [w.matrix for w in wedge_ops(algebra)]
    contractions = [c.matrix for c in contraction_ops(algebra)]
    # H̃_ferm is linear in M, so precompute the basis operators c̄_a c^d
    basis = np.array([[1j * contractions[a] @ wedges[d] for d in range(size)] for a in range(size)])

    def field(_, y):
        phi = y[:size].real
        jacobi = y[size:size + size * size].reshape(size, size)
        psi = y[size + size * size:]
        generator = model.jacobi_matrix(phi)
        h_ferm = np.einsum('ad,adij->ij', generator, basis)
        return np.concatenate([model.vector_field(phi).astype(complex),
                               (generator @ jacobi).ravel(),
                               -1j * (h_ferm @ psi)])

    y0 = np.concatenate([np.asarray(phi0, dtype=complex), np.eye(size, dtype=complex).ravel(),
                         fiber0.to_vector()])
    times, states = integrate(field, y0, t, dt, sample_every)
    phis = states[:, :size].real
    fibers = states[:, size + size * size:]
    final_jacobi = states[-1, size:size + size * size].reshape(size, size).real
    trajectory = FiberTrajectory(
        algebra=algebra,
        times=times,
        phis=phis,
        fibers=fibers,
        norms=_metric_norms(metric, fibers),
        monodromy=JacobiState(phis[-1], final_jacobi, t),
        metric=metric,
    )
    logger.debug(f"evolved fiber under {model.describe()} to t={t}: norm drift {trajectory.norm_drift:.3g}")
    return trajectory


def norm_functional(metric: Metric, ensemble: Sequence[Tuple[float, Multivector]]) -> float:
    """Σ_k w_k ⟨ψ_k|ψ_k⟩_g over quadrature weights w_k ≥ 0."""
    total = 0.0
    for weight, psi in ensemble:
        if weight < 0:
            raise ValueError(f"quadrature weights must be non-negative, got {weight}")
        if not metric.algebra.same_fiber(psi.algebra):
            raise MetricError("ensemble state and metric live on different algebras")
        vector = psi.to_vector()
        total += weight * float(np.real(vector.conj() @ metric.g @ vector))
    return total


def fiber_frame(trajectory: FiberTrajectory) -> pd.DataFrame:
    """Columns t, norm and |ψ_S| for every monomial S."""
    frame = pd.DataFrame({'t': trajectory.times, 'norm': trajectory.norms})
    for mask in range(trajectory.algebra.dim):
        label = trajectory.algebra.monomial_label(mask).replace(' ', '')
        frame[f"|{label}|"] = np.abs(trajectory.fibers[:, mask])
    return frame


def propagator_equivalence_check(model: HamiltonianModel, phi0, fiber0: Multivector, t: float,
                                 dt: Optional[float] = None) -> float:
    """
    Max coefficient deviation between evolve_fiber and the time-ordered
    product of exp(-i h H̃_ferm(φ̄_k)) with φ̄_k the step midpoints.
    """
    dt = INTEGRATION_DEFAULTS['dt'] if dt is None else dt
    algebra = fiber0.algebra
    characteristics = evolve_fiber(model, _identity_metric(algebra), phi0, fiber0, t, dt,
                                   sample_every=None)
    if t == 0:
        return float(np.max(np.abs(characteristics.fibers[-1] - fiber0.to_vector())))
    orbit = flow(model, phi0, t, dt)
    psi = fiber0.to_vector()
    for k in range(len(orbit.times) - 1):
        h = orbit.times[k + 1] - orbit.times[k]
        midpoint = (orbit.states[k] + orbit.states[k + 1]) / 2
        psi = linalg.expm(-1j * h * ferm_matrix(algebra, model.hessian(midpoint)).matrix) @ psi
    return float(np.max(np.abs(characteristics.fibers[-1] - psi)))


def _identity_metric(algebra: AlgebraDescriptor) -> Metric:
    return Metric(algebra, np.eye(algebra.dim), 'svh')


# =============================================================================
# SPECTRA
# =============================================================================

def spectral_norm_check(metric: Metric, hessian, tol: Optional[float] = None) -> Dict:
    """
    Eigen-decompose H̃_ferm and measure the metric norm of each eigenvector.

    A g-self-adjoint operator can only have complex eigenvalues on
    zero-norm eigenvectors: λ⟨ψ|ψ⟩ = λ*⟨ψ|ψ⟩. The check binds only when
    H̃_ferm is self-adjoint under the metric; otherwise the rows are
    reported with 'applies' False.
    """
    tol = 1e-8 if tol is None else tol
    op = ferm_matrix(metric.algebra, hessian)
    applies = hermiticity_residual(metric, op) < TOLERANCES['hermiticity']
    eigenvalues, vectors = np.linalg.eig(op.matrix)
    rows = []
    passed = True
    for k, value in enumerate(eigenvalues):
        v = vectors[:, k] / np.linalg.norm(vectors[:, k])
        metric_norm = complex(v.conj() @ metric.g @ v)
        complex_value = abs(value.imag) > TOLERANCES['hermiticity']
        ok = not (applies and complex_value) or abs(metric_norm) < tol
        passed = passed and ok
        rows.append({'eigenvalue': [float(value.real), float(value.imag)],
                     'metric_norm': [metric_norm.real, metric_norm.imag],
                     'complex': bool(complex_value), 'ok': bool(ok)})
    rows.sort(key=lambda r: (r['eigenvalue'][0], r['eigenvalue'][1]))
    return {'eigenvectors': rows, 'applies': bool(applies), 'passed': passed}


def spectral_derivative(n_theta: int) -> np.ndarray:
    """Fourier differentiation matrix on n_theta equispaced angles (Nyquist mode dropped)."""
    if n_theta < 4:
        raise ValueError(f"n_theta must be >= 4, got {n_theta}")
    wavenumbers = fft.fftfreq(n_theta, d=1.0 / n_theta)
    if n_theta % 2 == 0:
        wavenumbers[n_theta // 2] = 0.0
    identity = np.eye(n_theta)
    return fft.ifft(1j * wavenumbers[:, None] * fft.fft(identity, axis=0), axis=0)


def ring_frequency(model: HamiltonianModel, action: float) -> float:
    """
    Angular frequency on the ring of action J.

    The ring's turning point (q, p) = (sqrt(2J/mω), 0) is placed from the
    model parameters, and ω is read back as sqrt(det ∂²H) there.
    """
    if action <= 0:
        raise ValueError(f"ring action must be positive, got {action}")
    m = float(model.params.get('m', 1.0))
    omega = float(model.params.get('omega', 1.0))
    turning_point = np.array([np.sqrt(2.0 * action / (m * omega)), 0.0])
    determinant = float(np.linalg.det(model.hessian(turning_point)))
    if determinant <= 0:
        raise ValueError(f"ring at J = {action} is not a closed orbit")
    return float(np.sqrt(determinant))


def ring_liouvillian(model: HamiltonianModel, rings: Sequence[float], n_theta: int) -> RingLiouvillian:
    """
    Block-diagonal L̂ = -iω(J)∂_θ over rings of constant action.

    Only harmonic-type models with one degree of freedom are supported;
    each ring gets its own block at the frequency measured on that ring.
    """
    if model.provenance != 'harmonic' or model.n_pairs != 1:
        raise ValueError("ring Liouvillian needs a one-degree-of-freedom harmonic model")
    if not rings:
        raise ValueError("at least one ring is required")
    frequencies = [ring_frequency(model, action) for action in rings]
    block = spectral_derivative(n_theta)
    blocks = [-1j * frequency * block for frequency in frequencies]
    return RingLiouvillian(list(rings), frequencies, n_theta, linalg.block_diag(*blocks))


def ring_liouvillian_spectrum(omega_freq: float, n_theta: int) -> np.ndarray:
    """Sorted eigenvalues of -iω D on one ring; ωk for |k| < n_theta/2."""
    operator = -1j * omega_freq * spectral_derivative(n_theta)
    return real_spectrum(operator, TOLERANCES['hermiticity'])


# =============================================================================
# c̄ REPRESENTATION
# =============================================================================

def cbar_sign(algebra: AlgebraDescriptor, mask: int) -> int:
    """ε(S) = (-1)^{k(k-1)/2} sgn(S^c, S) with k = |S^c|."""
    complement = algebra.volume ^ mask
    k = popcount(complement)
    sign = -1 if (k * (k - 1) // 2) % 2 else 1
    return sign * sort_sign(bits_of(complement) + bits_of(mask))


def to_cbar_representation(mv: Multivector) -> Multivector:
    """
    c-components to c̄-components: ψ^{S^c} = ε(S) ψ_S.

    The result stores ψ^T at bitmask T. For n = 1:
    ψ^0 = ψ_2, ψ^q = ψ_p, ψ^p = -ψ_q, ψ^2 = -ψ_0. Applying the map twice
    gives (-1)^n times the input.
    """
    algebra = mv.algebra
    if algebra.single:
        raise AlgebraError("the c̄ representation needs (q, p) pairs")
    if algebra.n_pairs > 3:
        raise AlgebraError("c̄ representation supported for n <= 3")
    return Multivector(algebra, {algebra.volume ^ mask: value * cbar_sign(algebra, mask)
                                 for mask, value in mv.coeffs.items()})


def from_cbar_representation(mv: Multivector) -> Multivector:
    """Inverse of to_cbar_representation."""
    sign = -1 if mv.algebra.n_pairs % 2 else 1
    return to_cbar_representation(mv) * sign
