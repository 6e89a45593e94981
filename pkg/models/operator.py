"""
Linear operators on the fiber.

GrassmannOperator is a dense complex matrix on the monomial basis with a
parity tag. ParamOperator carries parameter-valued weights, Σ_m θ^m ⊗ M_m,
which is what the exponentials defining the eigenstates |α±⟩ need.
"""

from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional, Tuple, Union

import numpy as np

from models.algebra import AlgebraDescriptor
from models.errors import AlgebraError, NilpotencyError
from models.multivector import Multivector
from models.param_element import ParamElement
from utils.bitmask import popcount, reorder_sign

EVEN = 0
ODD = 1


def _apply_matrix(matrix: np.ndarray, parity: Optional[int], ket: Multivector) -> Multivector:
    """(Oψ)_k = Σ_j O_kj π^{|O|}(ψ_j)."""
    if ket.is_numeric():
        return Multivector.from_vector(ket.algebra, matrix @ ket.to_vector())
    if parity is None:
        raise AlgebraError("mixed-parity operator cannot act on parameter-valued states")
    out: Dict[int, ParamElement] = {}
    for j, value in ket.coeffs.items():
        shifted = value.graded(parity)
        for k in np.flatnonzero(matrix[:, j]):
            term = shifted * complex(matrix[k, j])
            out[int(k)] = out[int(k)] + term if int(k) in out else term
    return Multivector(ket.algebra, out)


@dataclass(frozen=True, eq=False)
class GrassmannOperator:
    """
    Fiber operator.

    parity is EVEN, ODD or None for a sum of mixed parity.
    """

    algebra: AlgebraDescriptor
    matrix: np.ndarray
    parity: Optional[int] = EVEN
    label: str = ''

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=complex)
        if matrix.shape != (self.algebra.dim, self.algebra.dim):
            raise AlgebraError(
                f"operator shape {matrix.shape} does not match fiber dimension {self.algebra.dim}")
        object.__setattr__(self, 'matrix', matrix)

    @classmethod
    def identity(cls, algebra: AlgebraDescriptor) -> 'GrassmannOperator':
        return cls(algebra, np.eye(algebra.dim), EVEN, '1')

    @classmethod
    def zero(cls, algebra: AlgebraDescriptor, parity: Optional[int] = EVEN) -> 'GrassmannOperator':
        return cls(algebra, np.zeros((algebra.dim, algebra.dim)), parity, '0')

    def _check(self, other: 'GrassmannOperator') -> None:
        if not other.algebra.same_fiber(self.algebra):
            raise AlgebraError("operators act on different fibers")

    def __matmul__(self, other: 'GrassmannOperator') -> 'GrassmannOperator':
        self._check(other)
        parity = None if self.parity is None or other.parity is None else (self.parity + other.parity) % 2
        return GrassmannOperator(self.algebra, self.matrix @ other.matrix, parity,
                                 f"{self.label}{other.label}")

    def __add__(self, other: 'GrassmannOperator') -> 'GrassmannOperator':
        self._check(other)
        parity = self.parity if self.parity == other.parity else None
        return GrassmannOperator(self.algebra, self.matrix + other.matrix, parity)

    def __neg__(self) -> 'GrassmannOperator':
        return GrassmannOperator(self.algebra, -self.matrix, self.parity, self.label)

    def __sub__(self, other: 'GrassmannOperator') -> 'GrassmannOperator':
        return self + (-other)

    def __mul__(self, scalar: complex) -> 'GrassmannOperator':
        return GrassmannOperator(self.algebra, self.matrix * scalar, self.parity, self.label)

    __rmul__ = __mul__

    def anticommutator(self, other: 'GrassmannOperator') -> 'GrassmannOperator':
        return self @ other + other @ self

    def commutator(self, other: 'GrassmannOperator') -> 'GrassmannOperator':
        return self @ other - other @ self

    def conjugate_transpose(self) -> 'GrassmannOperator':
        return GrassmannOperator(self.algebra, self.matrix.conj().T, self.parity)

    def apply(self, ket: Multivector) -> Multivector:
        return _apply_matrix(self.matrix, self.parity, ket)

    def allclose(self, other: 'GrassmannOperator', tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.matrix - other.matrix), initial=0.0) <= tol)

    def is_zero(self, tol: float = 0.0) -> bool:
        return bool(np.max(np.abs(self.matrix), initial=0.0) <= tol)


@dataclass(frozen=True, eq=False)
class ParamOperator:
    """
    Σ_m θ^m ⊗ M_m with a definite total parity.

    The operator part of block m has parity |m| + total_parity, so an even
    ParamOperator pairs odd parameter monomials with odd fiber operators.
    """

    algebra: AlgebraDescriptor
    blocks: Dict[int, np.ndarray] = field(default_factory=dict)
    total_parity: int = EVEN

    @classmethod
    def from_terms(cls, algebra: AlgebraDescriptor,
                   terms: Iterable[Tuple[ParamElement, GrassmannOperator]]) -> 'ParamOperator':
        blocks: Dict[int, np.ndarray] = {}
        total = None
        for weight, op in terms:
            if op.parity is None:
                raise AlgebraError("ParamOperator terms need fiber operators of definite parity")
            for mask, value in weight.terms.items():
                parity = (popcount(mask) + op.parity) % 2
                if total is None:
                    total = parity
                elif parity != total:
                    raise AlgebraError("ParamOperator terms have mixed total parity")
                blocks[mask] = blocks.get(mask, 0) + value * op.matrix
        return cls(algebra, blocks, EVEN if total is None else total)

    @classmethod
    def identity(cls, algebra: AlgebraDescriptor) -> 'ParamOperator':
        return cls(algebra, {0: np.eye(algebra.dim, dtype=complex)}, EVEN)

    def _op_parity(self, mask: int) -> int:
        return (popcount(mask) + self.total_parity) % 2

    def is_zero(self) -> bool:
        return all(not np.any(block) for block in self.blocks.values())

    def __add__(self, other: 'ParamOperator') -> 'ParamOperator':
        if other.total_parity != self.total_parity and not (self.is_zero() or other.is_zero()):
            raise AlgebraError("cannot add ParamOperators of different parity")
        blocks = {m: b.copy() for m, b in self.blocks.items()}
        for mask, block in other.blocks.items():
            blocks[mask] = blocks[mask] + block if mask in blocks else block.copy()
        parity = other.total_parity if self.is_zero() else self.total_parity
        return ParamOperator(self.algebra, blocks, parity)

    def __mul__(self, scalar: complex) -> 'ParamOperator':
        return ParamOperator(self.algebra, {m: b * scalar for m, b in self.blocks.items()},
                             self.total_parity)

    __rmul__ = __mul__

    def __matmul__(self, other: 'ParamOperator') -> 'ParamOperator':
        # (θ^a A)(θ^b B) = θ^a π^{|A|}(θ^b) AB
        blocks: Dict[int, np.ndarray] = {}
        for ma, block_a in self.blocks.items():
            parity_a = self._op_parity(ma)
            for mb, block_b in other.blocks.items():
                sign = reorder_sign(ma, mb)
                if not sign:
                    continue
                if parity_a and popcount(mb) % 2:
                    sign = -sign
                product = sign * (block_a @ block_b)
                key = ma | mb
                blocks[key] = blocks[key] + product if key in blocks else product
        blocks = {m: b for m, b in blocks.items() if np.any(b)}
        return ParamOperator(self.algebra, blocks, (self.total_parity + other.total_parity) % 2)

    def exp(self) -> 'ParamOperator':
        """Exact exponential; the series must terminate."""
        if self.total_parity != EVEN:
            raise NilpotencyError("only even ParamOperators can be exponentiated")
        limit = self.algebra.dim * self.algebra.param_dim + 1
        total = ParamOperator.identity(self.algebra)
        power = ParamOperator.identity(self.algebra)
        for k in range(1, limit + 1):
            power = (power @ self) * (1.0 / k)
            if power.is_zero():
                return total
            total = total + power
        raise NilpotencyError(f"exponential series did not terminate within {limit} terms")

    def apply(self, ket: Multivector) -> Multivector:
        k = self.algebra.n_param_generators
        result = Multivector.zero(ket.algebra)
        for mask, block in self.blocks.items():
            image = _apply_matrix(block, self._op_parity(mask), ket)
            result = result + ParamElement({mask: 1}, k) * image
        return result


OperatorLike = Union[GrassmannOperator, ParamOperator]
