"""
Exact Grassmann (exterior) algebra on the fiber.

Builds the matrices of ĉ^a (left wedge) and c̄̂_a (left derivative),
the number operators, Berezin integration over state generators or odd
parameters, nilpotent exponentials and the parametric eigenstates |α±⟩.

Sign conventions:
- generators are ordered q_1..q_n, p_1..p_n and monomials are bitmasks
- ĉ^a and c̄̂_a both pick up (-1)^{#bits below a}
- parameters stand to the left of the state monomial; odd operators act
  on parameter-valued coefficients through the grade automorphism
"""

import logging
from typing import Iterable, List, Sequence, Union

import numpy as np

from models.algebra import AlgebraDescriptor
from models.errors import AlgebraError, NilpotencyError
from models.multivector import Multivector
from models.operator import EVEN, ODD, GrassmannOperator, ParamOperator
from models.param_element import ParamElement
from utils.bitmask import below, bits_of, mask_of, sort_sign

logger = logging.getLogger(__name__)


# =============================================================================
# GENERATOR OPERATORS
# =============================================================================

def wedge_op(algebra: AlgebraDescriptor, a: int) -> GrassmannOperator:
    """
    Matrix of left multiplication by c^a.

    Args:
        algebra: Fiber descriptor
        a: Generator index (q_i = i, p_i = n + i)

    Returns:
        Odd GrassmannOperator
    """
    algebra.check_generator(a)
    bit = 1 << a
    matrix = np.zeros((algebra.dim, algebra.dim))
    for mask in range(algebra.dim):
        if not mask & bit:
            matrix[mask | bit, mask] = -1.0 if below(mask, a) % 2 else 1.0
    return GrassmannOperator(algebra, matrix, ODD, f"c^{algebra.labels()[a]}")


def contraction_op(algebra: AlgebraDescriptor, a: int) -> GrassmannOperator:
    """
    Matrix of the left derivative ∂/∂c^a.

    Args:
        algebra: Fiber descriptor
        a: Generator index

    Returns:
        Odd GrassmannOperator
    """
    algebra.check_generator(a)
    bit = 1 << a
    matrix = np.zeros((algebra.dim, algebra.dim))
    for mask in range(algebra.dim):
        if mask & bit:
            matrix[mask ^ bit, mask] = -1.0 if below(mask, a) % 2 else 1.0
    return GrassmannOperator(algebra, matrix, ODD, f"cbar_{algebra.labels()[a]}")


def wedge_ops(algebra: AlgebraDescriptor) -> List[GrassmannOperator]:
    return [wedge_op(algebra, a) for a in range(algebra.n_generators)]


def contraction_ops(algebra: AlgebraDescriptor) -> List[GrassmannOperator]:
    return [contraction_op(algebra, a) for a in range(algebra.n_generators)]


def number_ops(algebra: AlgebraDescriptor) -> List[GrassmannOperator]:
    """
    N̂_a = ĉ^a c̄̂_a for every generator, in generator order.

    N̂_a is diagonal on monomials with eigenvalue 1 when c^a is present.
    """
    ops = []
    for a in range(algebra.n_generators):
        op = wedge_op(algebra, a) @ contraction_op(algebra, a)
        ops.append(GrassmannOperator(algebra, op.matrix, EVEN, f"N_{algebra.labels()[a]}"))
    return ops


def anticommutator_defect(algebra: AlgebraDescriptor) -> float:
    """
    Largest entry deviation of {ĉ^a, c̄̂_b} = δ, {ĉ^a, ĉ^b} = 0 and
    {c̄̂_a, c̄̂_b} = 0 over all generator pairs.
    """
    wedges = wedge_ops(algebra)
    contractions = contraction_ops(algebra)
    identity = np.eye(algebra.dim)
    worst = 0.0
    for a in range(algebra.n_generators):
        for b in range(algebra.n_generators):
            mixed = wedges[a].anticommutator(contractions[b]).matrix
            target = identity if a == b else 0.0
            worst = max(worst,
                        float(np.max(np.abs(mixed - target))),
                        float(np.max(np.abs(wedges[a].anticommutator(wedges[b]).matrix))),
                        float(np.max(np.abs(contractions[a].anticommutator(contractions[b]).matrix))))
    return worst


def exterior_lift(algebra: AlgebraDescriptor, generator_matrix: np.ndarray) -> np.ndarray:
    """
    Compound-matrix lift of a linear map on generators to the whole fiber.

    With c^a ↦ Σ_b A[b, a] c^b, a monomial c^S maps to Σ_T det A[T, S] c^T,
    so the lift is multiplicative on wedge products.

    Args:
        algebra: Fiber descriptor
        generator_matrix: (2n, 2n) matrix A

    Returns:
        (dim, dim) complex matrix
    """
    generator_matrix = np.asarray(generator_matrix, dtype=complex)
    size = algebra.n_generators
    if generator_matrix.shape != (size, size):
        raise AlgebraError(f"generator matrix must be {size}x{size}, got {generator_matrix.shape}")
    lifted = np.zeros((algebra.dim, algebra.dim), dtype=complex)
    lifted[0, 0] = 1.0
    for rank in range(1, size + 1):
        masks = algebra.rank_masks(rank)
        for source in masks:
            columns = bits_of(source)
            for target in masks:
                lifted[target, source] = np.linalg.det(generator_matrix[np.ix_(bits_of(target), columns)])
    return lifted


# =============================================================================
# BEREZIN INTEGRATION
# =============================================================================

def berezin_integrate(x: Union[Multivector, ParamElement], over: Union[int, Sequence[int]],
                      space: str = 'param') -> Union[Multivector, ParamElement]:
    """
    Berezin integral ∫dθ_{i1} dθ_{i2} ... x, rightmost measure first.

    Args:
        x: A state or a parameter-algebra element
        over: One index or a sequence of indices in measure order
        space: 'param' to integrate odd parameters, 'state' for the
               generators c^a (state integration needs a Multivector)

    Returns:
        Same kind as x
    """
    indices = [over] if isinstance(over, int) else list(over)
    if isinstance(x, ParamElement):
        if space != 'param':
            raise AlgebraError("a parameter element has no state generators")
        for index in indices:
            if not 0 <= index < x.n_generators:
                raise AlgebraError(f"parameter index {index} out of range")
        return x.berezin(*indices)

    if space == 'param':
        for index in indices:
            x.algebra.check_param(index)
        return Multivector(x.algebra, {m: v.berezin(*indices) for m, v in x.coeffs.items()})
    if space == 'state':
        result = x
        for index in reversed(indices):
            result = contraction_op(x.algebra, index).apply(result)
        return result
    raise ValueError(f"unknown integration space '{space}'")


# =============================================================================
# EXPONENTIALS AND CONJUGATION
# =============================================================================

def exp_nilpotent(x):
    """
    Exact exponential of a nilpotent object.

    Accepts ParamElement, ParamOperator, GrassmannOperator (numeric matrix)
    or Multivector (wedge powers). The series is cut as soon as a power
    vanishes; an argument that never does raises NilpotencyError.
    """
    if isinstance(x, (ParamElement, ParamOperator)):
        return x.exp()

    if isinstance(x, GrassmannOperator):
        total = np.eye(x.algebra.dim, dtype=complex)
        power = np.eye(x.algebra.dim, dtype=complex)
        for k in range(1, x.algebra.dim + 2):
            power = power @ x.matrix / k
            if not np.any(power):
                parity = EVEN if x.parity == EVEN else None
                return GrassmannOperator(x.algebra, total, parity, f"exp({x.label})")
            total = total + power
        raise NilpotencyError("operator is not nilpotent")

    if isinstance(x, Multivector):
        if not x.coeff(0).is_zero():
            raise NilpotencyError("a multivector with a zero-form part is not nilpotent")
        total = Multivector.basis(x.algebra, 0)
        power = Multivector.basis(x.algebra, 0)
        for k in range(1, x.algebra.n_generators + 2):
            power = x.wedge(power) * (1.0 / k)
            if power.max_abs() == 0:
                return total
            total = total + power
        raise NilpotencyError("multivector series did not terminate")

    raise TypeError(f"cannot exponentiate {type(x).__name__}")


def conjugate(x: ParamElement) -> ParamElement:
    """Order-reversing conjugation θ_i ↔ θ*_i of a parameter element."""
    return x.conjugate()


def apply_operator(op: Union[GrassmannOperator, ParamOperator], ket: Multivector) -> Multivector:
    return op.apply(ket)


# =============================================================================
# EIGENSTATES
# =============================================================================

def vacuum_ket(algebra: AlgebraDescriptor, signs: Iterable[str]) -> Multivector:
    """
    Basis ket |0s_1, 0s_2, ...⟩: c^a is present exactly when s_a is '-'.

    ĉ^a annihilates the '-' slots and c̄̂_a the '+' slots.
    """
    signs = list(signs)
    if len(signs) != algebra.n_generators or any(s not in '+-' for s in signs):
        raise AlgebraError(f"need {algebra.n_generators} signs from '+-', got {signs}")
    mask = sum(1 << a for a, s in enumerate(signs) if s == '-')
    return Multivector.basis(algebra, mask)


def eigen_ket(algebra: AlgebraDescriptor, signs: Iterable[str],
              params: Sequence[ParamElement]) -> Multivector:
    """
    |β_1 s_1, β_2 s_2, ...⟩ = exp(-Σ_a β_a op_a)|0s_1, 0s_2, ...⟩.

    op_a is ĉ^a for a '+' slot and c̄̂_a for a '-' slot, so the state is an
    eigenstate of the annihilator of that slot with eigenvalue β_a.

    Args:
        algebra: Fiber with enough odd parameters
        signs: '+'/'-' per generator, e.g. '--' or ['+', '-']
        params: One odd parameter element per generator

    Returns:
        Parameter-valued Multivector
    """
    signs = list(signs)
    vacuum = vacuum_ket(algebra, signs)
    if len(params) != algebra.n_generators:
        raise AlgebraError(f"need {algebra.n_generators} parameters, got {len(params)}")
    terms = []
    for a, (sign, beta) in enumerate(zip(signs, params)):
        if not beta.is_odd():
            raise AlgebraError(f"eigenvalue for slot {a} must be Grassmann-odd")
        op = wedge_op(algebra, a) if sign == '+' else contraction_op(algebra, a)
        terms.append((-beta, op))
    generator = ParamOperator.from_terms(algebra, terms)
    ket = generator.exp().apply(vacuum)
    logger.debug(f"eigen_ket {''.join(signs)} -> {ket!r}")
    return ket


def param(algebra: AlgebraDescriptor, index: int, starred: bool = False, coeff: complex = 1) -> ParamElement:
    """θ_{index} (or θ*_{index}) as an element of the algebra's parameter ring."""
    if not 0 <= index < algebra.n_params:
        raise AlgebraError(f"parameter index {index} out of range for {algebra.n_params} parameters")
    k = index + (algebra.n_params if starred else 0)
    return ParamElement.generator(k, algebra.n_param_generators, coeff)


def monomial(algebra: AlgebraDescriptor, generators: Sequence[int], coeff: complex = 1) -> Multivector:
    """c^{g1} c^{g2} ... in the order given (zero if a generator repeats)."""
    generators = list(generators)
    for a in generators:
        algebra.check_generator(a)
    if len(set(generators)) != len(generators):
        return Multivector.zero(algebra)
    return Multivector.basis(algebra, mask_of(generators), coeff * sort_sign(generators))


def monomial_from_label(algebra: AlgebraDescriptor, text: str) -> Multivector:
    """
    Parse a monomial label such as '1', 'c^q', 'c^q c^p' or 'c^q1 c^p2'.

    Raises:
        AlgebraError: unknown generator name
    """
    text = text.strip()
    if text in ('', '1'):
        return Multivector.basis(algebra, 0)
    names = algebra.labels()
    generators = []
    for token in text.split():
        name = token[2:] if token.startswith('c^') else token
        if algebra.single and token == 'c':
            name = 'c'
        if name not in names:
            raise AlgebraError(f"unknown generator '{token}' (expected c^ followed by one of {', '.join(names)})")
        generators.append(names.index(name))
    return monomial(algebra, generators)
