"""
Inhomogeneous forms on the Grassmann fiber.

A Multivector stores one parameter-algebra coefficient per state monomial.
Monomials are bitmasks read in increasing generator order, and the stored
coefficient is the value on the strictly increasing index tuple.
"""

from typing import Dict, Iterable, Mapping, Optional, Union

import numpy as np

from models.algebra import AlgebraDescriptor
from models.errors import AlgebraError
from models.param_element import ParamElement
from utils.bitmask import popcount, reorder_sign

Coefficient = Union[ParamElement, int, float, complex]


class Multivector:
    """ψ = Σ_S ψ_S c^S with ψ_S in the parameter algebra."""

    __slots__ = ('algebra', '_coeffs')

    def __init__(self, algebra: AlgebraDescriptor, coeffs: Optional[Mapping[int, Coefficient]] = None):
        self.algebra = algebra
        k = algebra.n_param_generators
        cleaned: Dict[int, ParamElement] = {}
        for mask, value in (coeffs or {}).items():
            if not 0 <= mask < algebra.dim:
                raise AlgebraError(f"monomial {mask} outside a fiber of dimension {algebra.dim}")
            if not isinstance(value, ParamElement):
                value = ParamElement.scalar(value, k)
            elif value.n_generators != k:
                raise AlgebraError("coefficient belongs to a different parameter algebra")
            if not value.is_zero():
                cleaned[mask] = value
        self._coeffs = cleaned

    @classmethod
    def zero(cls, algebra: AlgebraDescriptor) -> 'Multivector':
        return cls(algebra)

    @classmethod
    def basis(cls, algebra: AlgebraDescriptor, mask: int, coeff: Coefficient = 1) -> 'Multivector':
        return cls(algebra, {mask: coeff})

    @classmethod
    def from_vector(cls, algebra: AlgebraDescriptor, vector: Iterable[complex]) -> 'Multivector':
        vector = np.asarray(vector, dtype=complex)
        if vector.shape != (algebra.dim,):
            raise AlgebraError(f"expected a vector of length {algebra.dim}, got {vector.shape}")
        return cls(algebra, {mask: value for mask, value in enumerate(vector) if value != 0})

    # ------------------------------------------------------------------

    @property
    def coeffs(self) -> Dict[int, ParamElement]:
        return dict(self._coeffs)

    def coeff(self, mask: int) -> ParamElement:
        return self._coeffs.get(mask, ParamElement.scalar(0, self.algebra.n_param_generators))

    def is_numeric(self) -> bool:
        return all(value.is_scalar() for value in self._coeffs.values())

    def to_vector(self) -> np.ndarray:
        """Dense coefficient vector; only for parameter-free states."""
        if not self.is_numeric():
            raise AlgebraError("state has parameter-valued coefficients")
        vector = np.zeros(self.algebra.dim, dtype=complex)
        for mask, value in self._coeffs.items():
            vector[mask] = value.scalar_part()
        return vector

    def rank_part(self, rank: int) -> 'Multivector':
        return Multivector(self.algebra, {m: v for m, v in self._coeffs.items() if popcount(m) == rank})

    def max_abs(self) -> float:
        return max((v.max_abs() for v in self._coeffs.values()), default=0.0)

    def allclose(self, other: 'Multivector', tol: float = 1e-12) -> bool:
        return (self - other).max_abs() <= tol

    # ------------------------------------------------------------------

    def _check(self, other: 'Multivector') -> None:
        if other.algebra != self.algebra:
            raise AlgebraError("multivectors live on different algebras")

    def __add__(self, other: 'Multivector') -> 'Multivector':
        self._check(other)
        out = dict(self._coeffs)
        for mask, value in other._coeffs.items():
            out[mask] = out[mask] + value if mask in out else value
        return Multivector(self.algebra, out)

    def __neg__(self) -> 'Multivector':
        return Multivector(self.algebra, {m: -v for m, v in self._coeffs.items()})

    def __sub__(self, other: 'Multivector') -> 'Multivector':
        return self + (-other)

    def __rmul__(self, factor: Coefficient) -> 'Multivector':
        # factor sits to the left of every coefficient
        if isinstance(factor, ParamElement):
            return Multivector(self.algebra, {m: factor * v for m, v in self._coeffs.items()})
        return Multivector(self.algebra, {m: v * factor for m, v in self._coeffs.items()})

    def __mul__(self, factor: Union[int, float, complex]) -> 'Multivector':
        if isinstance(factor, ParamElement):
            raise TypeError("multiply by parameter elements from the left")
        return factor * self

    def wedge(self, other: 'Multivector') -> 'Multivector':
        """Exterior product; parameters are moved left through c^A by the grade automorphism."""
        self._check(other)
        out: Dict[int, ParamElement] = {}
        for ma, va in self._coeffs.items():
            for mb, vb in other._coeffs.items():
                sign = reorder_sign(ma, mb)
                if not sign:
                    continue
                term = va * vb.graded(popcount(ma)) * sign
                out[ma | mb] = out[ma | mb] + term if (ma | mb) in out else term
        return Multivector(self.algebra, out)

    def to_json(self) -> Dict[str, list]:
        """{monomial bitmask: [re, im]} for parameter-free states."""
        return {str(mask): [float(value.real), float(value.imag)]
                for mask, value in enumerate(self.to_vector()) if value != 0}

    def __repr__(self) -> str:
        if not self._coeffs:
            return 'Multivector(0)'
        parts = [f"[{self._coeffs[m]!r}]{self.algebra.monomial_label(m)}" for m in sorted(self._coeffs)]
        return 'Multivector(' + ' + '.join(parts) + ')'
