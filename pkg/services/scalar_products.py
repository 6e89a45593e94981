"""
Scalar-product metrics on the fiber.

Builds the SvH, gauge and symplectic metrics and the three general
families, computes metric adjoints A‡ = g⁻¹Aᴴg, hermiticity residuals and
signatures, classifies conjugation rules and solves for the metric a rule
implies. Parameter-valued states are paired with the superalgebra rule

    ⟨Φ|ψ⟩ = Σ_ij g_ij π^{|e_j|}(Φ_i* ψ_j)

where π is the grade automorphism and |e_j| the parity of ket monomial j.
"""

import cmath
import logging
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg

from config.settings import SOLVER_MAX_PAIRS, TOLERANCES
from models.algebra import AlgebraDescriptor
from models.errors import ConjugationError, MetricError
from models.metric import ConjugationRule, Metric, PairRule
from models.multivector import Multivector
from models.operator import GrassmannOperator
from models.param_element import ParamElement
from services.grassmann import contraction_ops, wedge_ops
from utils.bitmask import bits_of, popcount

logger = logging.getLogger(__name__)

State = Union[Multivector, np.ndarray]


# =============================================================================
# NAMED METRICS
# =============================================================================

def svh_metric(algebra: AlgebraDescriptor) -> Metric:
    """Identity on the monomial basis: ‖ψ‖² = Σ|ψ_S|²."""
    return Metric(algebra, np.eye(algebra.dim), 'svh')


def gauge_metric(algebra: AlgebraDescriptor) -> Metric:
    """
    Metric with ĉ^a‡ = ĉ^a and c̄_a‡ = c̄_a.

    Only complementary monomials pair: g[A, A^c] = (-i)^n (-1)^{Σ_{a∈A} a},
    normalized so that g[volume, 1] = i^n. For n = 1 this is
        [[0, 0, 0, -i], [0, 0, -i, 0], [0, i, 0, 0], [i, 0, 0, 0]].
    The single-variable fiber gets [[0, 1], [1, 0]].
    """
    if algebra.single:
        return Metric(algebra, np.array([[0, 1], [1, 0]]), 'gauge')
    g = np.zeros((algebra.dim, algebra.dim), dtype=complex)
    anchor = (-1j) ** algebra.n_pairs
    for mask in range(algebra.dim):
        g[mask, algebra.volume ^ mask] = anchor * (-1) ** sum(bits_of(mask))
    return Metric(algebra, g, 'gauge')


def symplectic_metric(algebra: AlgebraDescriptor) -> Metric:
    """
    g[A, B] = i^{|A|} det ω[A, B] between monomials of equal rank.

    For n = 1: [[1, 0, 0, 0], [0, 0, i, 0], [0, -i, 0, 0], [0, 0, 0, -1]].
    """
    omega = algebra.omega
    g = np.zeros((algebra.dim, algebra.dim), dtype=complex)
    g[0, 0] = 1.0
    for rank in range(1, algebra.n_generators + 1):
        masks = algebra.rank_masks(rank)
        for row in masks:
            rows = bits_of(row)
            for col in masks:
                minor = np.linalg.det(omega[np.ix_(rows, bits_of(col))].astype(float))
                if abs(minor) > 0.5:
                    g[row, col] = (1j ** rank) * round(minor)
    return Metric(algebra, g, 'symplectic')


def general_metric(family: str, params: Optional[Mapping] = None, **kwargs) -> Metric:
    """
    One-degree-of-freedom metric families.

    Args:
        family: 'A' (b), 'B' (theta, gamma_i, g03) or 'C' (theta, b, g03)
        params: Family parameters; keyword arguments are merged in

    Returns:
        Metric on the n = 1 fiber

    Raises:
        MetricError: singular or non-conjugate-symmetric choice
    """
    values = dict(params or {})
    values.update(kwargs)
    kind = family.upper().replace('GENERAL', '')
    algebra = AlgebraDescriptor(1)
    g = np.zeros((4, 4), dtype=complex)

    if kind == 'A':
        b = float(values.get('b', 1.0))
        if b == 0:
            raise MetricError("family A needs b != 0 (the metric is singular at b = 0)")
        g[0, 0] = 1.0
        g[1, 2] = -1j * b
        g[2, 1] = 1j * b
        g[3, 3] = -b * b
        return Metric(algebra, g, 'generalA', {'b': b})

    if kind not in ('B', 'C'):
        raise MetricError(f"unknown metric family '{family}'")

    theta = float(values.get('theta', 0.0))
    g03 = complex(values.get('g03', -1j))
    if g03 == 0:
        raise MetricError(f"family {kind} needs g03 != 0")
    phase = cmath.exp(1j * theta)
    twisted = g03 * phase
    if abs(twisted.real) > TOLERANCES['exact'] * max(1.0, abs(twisted)):
        raise MetricError(
            f"family {kind} is conjugate-symmetric only when g03*exp(i*theta) is imaginary, got {twisted}")
    twisted = 1j * twisted.imag
    g[0, 3] = g03
    g[1, 2] = twisted
    g[2, 1] = -twisted
    g[3, 0] = -twisted * phase

    if kind == 'B':
        gamma_i = float(values.get('gamma_i', 0.0))
        g[0, 0] = 1j * twisted * gamma_i
        return Metric(algebra, g, 'generalB', {'theta': theta, 'gamma_i': gamma_i, 'g03': g03})

    b = float(values.get('b', 0.0))
    g[3, 3] = -1j * twisted * b
    return Metric(algebra, g, 'generalC', {'theta': theta, 'b': b, 'g03': g03})


def metric_by_name(algebra: AlgebraDescriptor, name: str, params: Optional[Mapping] = None) -> Metric:
    """Resolve a CLI metric name ('svh', 'gauge', 'symplectic', 'A', 'B', 'C')."""
    builders = {'svh': svh_metric, 'gauge': gauge_metric, 'symplectic': symplectic_metric}
    key = name.lower()
    if key in builders:
        return builders[key](algebra)
    if algebra.n_pairs != 1 or algebra.single:
        raise MetricError(f"metric family '{name}' is defined for n = 1 only")
    return general_metric(name, params)


# =============================================================================
# ADJOINTS AND DIAGNOSTICS
# =============================================================================

def _check_algebra(metric: Metric, op: GrassmannOperator) -> None:
    if not metric.algebra.same_fiber(op.algebra):
        raise MetricError("metric and operator act on different fibers")


def adjoint(metric: Metric, op: GrassmannOperator) -> GrassmannOperator:
    """A‡ = g⁻¹Aᴴg, so that ⟨Φ|Aψ⟩ = ⟨A‡Φ|ψ⟩."""
    _check_algebra(metric, op)
    try:
        matrix = np.linalg.solve(metric.g, op.matrix.conj().T @ metric.g)
    except np.linalg.LinAlgError as e:
        raise MetricError(f"metric {metric.describe()} is singular") from e
    return GrassmannOperator(op.algebra, matrix, op.parity, f"({op.label})‡" if op.label else '')


def hermiticity_residual(metric: Metric, op: GrassmannOperator) -> float:
    """Frobenius norm of gA - (gA)ᴴ; zero iff A is self-adjoint under g."""
    _check_algebra(metric, op)
    if not metric.is_invertible():
        raise MetricError(f"metric {metric.describe()} is singular")
    product_ = metric.g @ op.matrix
    return float(np.linalg.norm(product_ - product_.conj().T))


def signature(metric: Metric, tol: Optional[float] = None) -> Tuple[int, int, int]:
    """
    (n_plus, n_minus, n_zero) eigenvalue counts of g.

    Eigenvalues with |λ| < tol·‖g‖ count as zero.
    """
    tol = TOLERANCES['signature_zero'] if tol is None else tol
    hermitian = (metric.g + metric.g.conj().T) / 2
    eigenvalues = np.linalg.eigvalsh(hermitian)
    scale = max(np.linalg.norm(metric.g, 2), 1e-300)
    zero = np.abs(eigenvalues) < tol * scale
    return (int(np.sum((eigenvalues > 0) & ~zero)),
            int(np.sum((eigenvalues < 0) & ~zero)),
            int(np.sum(zero)))


def metric_eigenvalues(metric: Metric) -> np.ndarray:
    """Eigenvalues of g (complex in general, sorted by real then imaginary part)."""
    values = np.linalg.eigvals(metric.g)
    return values[np.lexsort((values.imag, values.real))]


# =============================================================================
# PRODUCTS OF STATES
# =============================================================================

def _vector(state: State) -> np.ndarray:
    return state.to_vector() if isinstance(state, Multivector) else np.asarray(state, dtype=complex)


def inner(metric: Metric, phi: State, psi: State) -> complex:
    """⟨Φ|ψ⟩ = Φᴴ g ψ for parameter-free states."""
    return complex(_vector(phi).conj() @ metric.g @ _vector(psi))


def norm(metric: Metric, psi: State) -> float:
    """⟨ψ|ψ⟩ (real for a conjugate-symmetric metric, possibly negative)."""
    return inner(metric, psi, psi).real


def bra_row(metric: Metric, bra: Multivector) -> List[ParamElement]:
    """Row r'_j = Σ_i conj(B_i) g_ij of the bra built from the ket B."""
    k = bra.algebra.n_param_generators
    row = [ParamElement.scalar(0, k) for _ in range(metric.algebra.dim)]
    for i, value in bra.coeffs.items():
        conjugated = value.conjugate()
        for j in np.flatnonzero(metric.g[i]):
            row[j] = row[j] + conjugated * complex(metric.g[i, j])
    return row


def param_inner(metric: Metric, phi: Multivector, psi: Multivector) -> ParamElement:
    """⟨Φ|ψ⟩ = Σ_ij g_ij π^{|e_j|}(Φ_i* ψ_j) for parameter-valued states."""
    k = phi.algebra.n_param_generators
    total = ParamElement.scalar(0, k)
    row = bra_row(metric, phi)
    for j, value in psi.coeffs.items():
        total = total + (row[j] * value).graded(popcount(j))
    return total


def resolution_of_identity(metric: Metric, ket: Multivector, bra_source: Multivector,
                           measure: Sequence[int], prefactor: complex = 1.0) -> np.ndarray:
    """
    Matrix of prefactor · ∫dθ_{measure} |K⟩⟨B| on the monomial basis.

    Column j is the image of e_j: Σ_k e_k K_k ⟨B|e_j⟩, with the parameter
    factor moved left through e_k. Every integrated entry must come out as a
    plain number.

    Args:
        metric: Scalar product defining the bra
        ket: Parameter-valued ket |K⟩
        bra_source: Ket whose bra ⟨B| closes the outer product
        measure: Parameter indices of ∫dθ_{i1} dθ_{i2}..., rightmost first
        prefactor: Overall constant

    Returns:
        (dim, dim) complex matrix, ideally the identity
    """
    dim = metric.algebra.dim
    row = bra_row(metric, bra_source)
    result = np.zeros((dim, dim), dtype=complex)
    for j in range(dim):
        bra_on_basis = row[j].graded(popcount(j))
        for k_mask, coefficient in ket.coeffs.items():
            integrand = coefficient * bra_on_basis.graded(popcount(k_mask))
            integral = integrand.berezin(*measure)
            if not integral.is_scalar():
                raise MetricError("resolution integrand left parameter dependence after integration")
            result[k_mask, j] = prefactor * integral.scalar_part()
    return result


# =============================================================================
# CONJUGATION RULES
# =============================================================================

@dataclass
class ConjugationReport:
    """Outcome of classify_conjugation."""

    family: str
    consistent: bool
    beta_gamma: Dict[str, complex] = field(default_factory=dict)
    failures: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict:
        return {
            'family': self.family,
            'consistent': self.consistent,
            'beta_gamma': {k: [v.real, v.imag] for k, v in sorted(self.beta_gamma.items())},
            'failures': list(self.failures),
        }


def _classify_pair(pair: PairRule, tol: float) -> Tuple[str, complex]:
    for relation, lhs, required in pair.relations():
        if abs(lhs - required) > tol:
            raise ConjugationError(
                f"conjugation rule violates {relation} (got {lhs:.6g})", relation=relation)
    alpha, beta, gamma, delta = pair.as_tuple()
    beta_gamma = beta.conjugate() * gamma
    if abs(beta_gamma - 1) <= tol:
        return 'family1', beta_gamma
    if abs(beta) <= tol:
        return 'family2', beta_gamma
    if abs(gamma) <= tol:
        return 'family3', beta_gamma
    return 'other', beta_gamma


def _generator_operators(algebra: AlgebraDescriptor) -> Tuple[List[GrassmannOperator], List[str]]:
    ops = wedge_ops(algebra) + contraction_ops(algebra)
    names = algebra.labels()
    labels = [f"c^{x}" for x in names] + [f"cbar_{x}" for x in names]
    return ops, labels


def rule_images(rule: ConjugationRule) -> List[Tuple[GrassmannOperator, GrassmannOperator]]:
    """(X_k, X_k†) pairs as fiber matrices."""
    ops, _ = _generator_operators(rule.algebra)
    pairs = []
    for k, op in enumerate(ops):
        image = sum((rule.images[k, l] * ops[l].matrix for l in range(len(ops))),
                    np.zeros_like(op.matrix))
        pairs.append((op, GrassmannOperator(rule.algebra, image, op.parity)))
    return pairs


def classify_conjugation(rule: ConjugationRule, tol: Optional[float] = None) -> ConjugationReport:
    """
    Check a conjugation rule and name its family.

    Each pair must satisfy the defining constraints (a violation raises
    ConjugationError naming the relation). The rule as a whole must be an
    involution and must preserve the anticommutators of the generators;
    failures of these (for example pairing a family-1 p-rule with a
    family-2 q-rule) are reported, not raised.
    """
    tol = TOLERANCES['exact'] if tol is None else tol
    beta_gamma: Dict[str, complex] = {}
    family = rule.name
    if rule.p_pair is not None and rule.q_pair is not None:
        p_family, beta_gamma['p'] = _classify_pair(rule.p_pair, tol)
        q_family, beta_gamma['q'] = _classify_pair(rule.q_pair, tol)
        family = p_family if p_family == q_family else f"{p_family}/{q_family}"

    failures = []
    images = rule.images
    if np.max(np.abs(images.conj() @ images - np.eye(len(images)))) > tol:
        failures.append("conjugation applied twice is not the identity")

    pairs = rule_images(rule)
    _, labels = _generator_operators(rule.algebra)
    for (k, (op_k, dag_k)), (l, (op_l, dag_l)) in product(enumerate(pairs), repeat=2):
        if l < k:
            continue
        expected = op_k.anticommutator(op_l).matrix
        got = dag_k.anticommutator(dag_l).matrix
        if np.max(np.abs(got - expected.conj())) > tol:
            scalar = got[0, 0] if rule.algebra.dim else 0
            failures.append(
                f"{{{labels[k]}†, {labels[l]}†}} = {complex(scalar):.6g}, "
                f"expected {complex(expected.conj()[0, 0]):.6g}")

    report = ConjugationReport(family, not failures, beta_gamma, failures)
    logger.debug(f"classified rule {rule.name}: {report.family}, consistent={report.consistent}")
    return report


def metric_from_conjugation(rule: ConjugationRule,
                            normalization: Mapping[Tuple[int, int], complex],
                            family: Optional[str] = None,
                            params: Optional[Dict] = None,
                            tol: Optional[float] = None) -> Metric:
    """
    Solve for the metric under which X_k‡ equals the rule's image of X_k.

    Unknown vec(g) (row-major) satisfies, for every generator operator A
    with image R,
        Aᴴ g - g R = 0   and   g A - Rᴴ g = 0,
    plus the normalization entries g[i, j] = value.

    Raises:
        MetricError: no solution, solution not pinned by the normalization,
                     non-conjugate-symmetric or singular result
    """
    tol = TOLERANCES['hermiticity'] if tol is None else tol
    algebra = rule.algebra
    if not algebra.single and algebra.n_pairs > SOLVER_MAX_PAIRS:
        raise MetricError(
            f"dense conjugation solver handles n <= {SOLVER_MAX_PAIRS}, got n = {algebra.n_pairs}")
    report = classify_conjugation(rule)
    if not report.consistent:
        raise MetricError(f"inconsistent conjugation rule: {'; '.join(report.failures)}")

    dim = algebra.dim
    eye = np.eye(dim)
    blocks = []
    for op, image in rule_images(rule):
        a, r = op.matrix, image.matrix
        blocks.append(np.kron(a.conj().T, eye) - np.kron(eye, r.T))
        blocks.append(np.kron(eye, a.T) - np.kron(r.conj().T, eye))
    homogeneous = np.vstack(blocks)

    norm_rows = np.zeros((len(normalization), dim * dim), dtype=complex)
    norm_values = np.zeros(len(normalization), dtype=complex)
    for row, ((i, j), value) in enumerate(sorted(normalization.items())):
        norm_rows[row, i * dim + j] = 1.0
        norm_values[row] = value

    system = np.vstack([homogeneous, norm_rows])
    rhs = np.concatenate([np.zeros(len(homogeneous), dtype=complex), norm_values])
    solution, *_ = np.linalg.lstsq(system, rhs, rcond=None)
    residual = np.linalg.norm(system @ solution - rhs)
    if residual > tol * max(1.0, np.linalg.norm(norm_values)):
        raise MetricError(f"no metric satisfies rule '{rule.name}' with this normalization "
                          f"(residual {residual:.3g})")
    free = linalg.null_space(system, rcond=tol)
    if free.shape[1]:
        raise MetricError(f"rule '{rule.name}' leaves {free.shape[1]} free metric directions; "
                          f"add normalization entries")

    g = solution.reshape(dim, dim)
    g[np.abs(g) < tol] = 0
    metric = Metric(algebra, g, family or _family_tag(rule.name), params or {})
    if metric.hermiticity_defect > tol:
        raise MetricError(f"solved metric is not conjugate-symmetric "
                          f"(defect {metric.hermiticity_defect:.3g})")
    if not metric.is_invertible():
        raise MetricError("solved metric is singular")
    logger.debug(f"solved metric for rule {rule.name}")
    return metric


def _family_tag(name: str) -> str:
    return name if name in ('svh', 'gauge', 'symplectic', 'generalA', 'generalB', 'generalC') else 'custom'
