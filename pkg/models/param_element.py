"""
Elements of the odd-parameter algebra.

The parameters θ_1..θ_P and their starred partners θ*_1..θ*_P are the
generators 0..2P-1 of an exterior algebra; an element is a sparse map from
parameter bitmask to complex coefficient. Starred partner of generator i
is generator i + P.
"""

import cmath
import numbers
from typing import Dict, Iterable, Mapping, Optional, Union

from models.errors import NilpotencyError
from utils.bitmask import below, bits_of, mask_of, popcount, reorder_sign, sort_sign

Scalar = Union[int, float, complex]


class ParamElement:
    """Immutable element Σ_m x_m θ^m of the parameter algebra."""

    __slots__ = ('n_generators', '_terms')

    def __init__(self, terms: Optional[Mapping[int, Scalar]] = None, n_generators: int = 0):
        self.n_generators = n_generators
        cleaned: Dict[int, complex] = {}
        for mask, value in (terms or {}).items():
            if mask >> n_generators:
                raise ValueError(f"monomial {mask:b} uses more than {n_generators} generators")
            value = complex(value)
            if value != 0:
                cleaned[mask] = value
        self._terms = cleaned

    # ------------------------------------------------------------------
    # construction
    # ------------------------------------------------------------------

    @classmethod
    def scalar(cls, value: Scalar, n_generators: int = 0) -> 'ParamElement':
        return cls({0: value}, n_generators)

    @classmethod
    def generator(cls, index: int, n_generators: int, coeff: Scalar = 1) -> 'ParamElement':
        if not 0 <= index < n_generators:
            raise ValueError(f"parameter index {index} out of range")
        return cls({1 << index: coeff}, n_generators)

    @classmethod
    def monomial(cls, indices: Iterable[int], n_generators: int, coeff: Scalar = 1) -> 'ParamElement':
        """Product θ_{i1}θ_{i2}... in the order given."""
        indices = list(indices)
        if len(set(indices)) != len(indices):
            return cls({}, n_generators)
        return cls({mask_of(indices): coeff * sort_sign(indices)}, n_generators)

    def _coerce(self, other) -> 'ParamElement':
        if isinstance(other, ParamElement):
            if other.n_generators != self.n_generators:
                raise ValueError("parameter algebras differ")
            return other
        return ParamElement.scalar(other, self.n_generators)

    # ------------------------------------------------------------------
    # inspection
    # ------------------------------------------------------------------

    @property
    def terms(self) -> Dict[int, complex]:
        return dict(self._terms)

    @property
    def n_params(self) -> int:
        return self.n_generators // 2

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(abs(v) <= tol for v in self._terms.values())

    def scalar_part(self) -> complex:
        return self._terms.get(0, 0j)

    def is_scalar(self) -> bool:
        return all(mask == 0 for mask in self._terms)

    def is_even(self) -> bool:
        return all(popcount(mask) % 2 == 0 for mask in self._terms)

    def is_odd(self) -> bool:
        return all(popcount(mask) % 2 == 1 for mask in self._terms)

    def even_part(self) -> 'ParamElement':
        return ParamElement({m: v for m, v in self._terms.items() if popcount(m) % 2 == 0},
                            self.n_generators)

    def odd_part(self) -> 'ParamElement':
        return ParamElement({m: v for m, v in self._terms.items() if popcount(m) % 2},
                            self.n_generators)

    def max_abs(self) -> float:
        return max((abs(v) for v in self._terms.values()), default=0.0)

    def allclose(self, other, tol: float = 1e-12) -> bool:
        return (self - other).max_abs() <= tol

    # ------------------------------------------------------------------
    # arithmetic
    # ------------------------------------------------------------------

    def __add__(self, other) -> 'ParamElement':
        other = self._coerce(other)
        out = dict(self._terms)
        for mask, value in other._terms.items():
            out[mask] = out.get(mask, 0) + value
        return ParamElement(out, self.n_generators)

    __radd__ = __add__

    def __neg__(self) -> 'ParamElement':
        return ParamElement({m: -v for m, v in self._terms.items()}, self.n_generators)

    def __sub__(self, other) -> 'ParamElement':
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> 'ParamElement':
        return self._coerce(other) - self

    def __mul__(self, other) -> 'ParamElement':
        if isinstance(other, numbers.Number):
            return ParamElement({m: v * other for m, v in self._terms.items()}, self.n_generators)
        if not isinstance(other, ParamElement):
            return NotImplemented
        other = self._coerce(other)
        out: Dict[int, complex] = {}
        for ma, va in self._terms.items():
            for mb, vb in other._terms.items():
                sign = reorder_sign(ma, mb)
                if sign:
                    out[ma | mb] = out.get(ma | mb, 0) + sign * va * vb
        return ParamElement(out, self.n_generators)

    def __rmul__(self, other) -> 'ParamElement':
        # scalars commute with everything
        return self * other

    def __truediv__(self, value: Scalar) -> 'ParamElement':
        return self * (1 / value)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, float, complex)):
            other = ParamElement.scalar(other, self.n_generators)
        if not isinstance(other, ParamElement):
            return NotImplemented
        return self.n_generators == other.n_generators and self._terms == other._terms

    __hash__ = None

    # ------------------------------------------------------------------
    # superalgebra structure
    # ------------------------------------------------------------------

    def parity_flip(self) -> 'ParamElement':
        """Grade automorphism: negates the odd part."""
        return ParamElement(
            {m: (-v if popcount(m) % 2 else v) for m, v in self._terms.items()},
            self.n_generators)

    def graded(self, parity: int) -> 'ParamElement':
        """Apply the grade automorphism `parity` times."""
        return self.parity_flip() if parity % 2 else self

    def derivative(self, index: int) -> 'ParamElement':
        """Left derivative ∂/∂θ_index."""
        out = {}
        bit = 1 << index
        for mask, value in self._terms.items():
            if mask & bit:
                sign = -1 if below(mask, index) % 2 else 1
                out[mask ^ bit] = sign * value
        return ParamElement(out, self.n_generators)

    def berezin(self, *indices: int) -> 'ParamElement':
        """
        ∫dθ_{i1} dθ_{i2} ... x: the rightmost measure acts first.
        """
        result = self
        for index in reversed(indices):
            result = result.derivative(index)
        return result

    def conjugate(self) -> 'ParamElement':
        """
        Antilinear, order-reversing involution swapping θ_i and θ*_i.
        """
        half = self.n_params
        out: Dict[int, complex] = {}
        for mask, value in self._terms.items():
            mapped = [(i + half) if i < half else (i - half) for i in reversed(bits_of(mask))]
            new_mask = mask_of(mapped)
            out[new_mask] = out.get(new_mask, 0) + sort_sign(mapped) * value.conjugate()
        return ParamElement(out, self.n_generators)

    def exp(self) -> 'ParamElement':
        """Exponential of an element whose non-scalar part is nilpotent."""
        scalar = self.scalar_part()
        nilpotent = self - scalar
        total = ParamElement.scalar(1, self.n_generators)
        power = ParamElement.scalar(1, self.n_generators)
        for k in range(1, self.n_generators + 2):
            power = power * nilpotent / k
            if power.is_zero():
                break
            total = total + power
        else:
            raise NilpotencyError("parameter series did not terminate")
        return total * cmath.exp(scalar)

    # ------------------------------------------------------------------
    # display
    # ------------------------------------------------------------------

    def _name(self, index: int) -> str:
        half = self.n_params
        if half and index >= half:
            return f"θ{index - half + 1}*"
        return f"θ{index + 1}"

    def __repr__(self) -> str:
        if not self._terms:
            return '0'
        parts = []
        for mask in sorted(self._terms, key=lambda m: (popcount(m), m)):
            value = self._terms[mask]
            word = ''.join(self._name(i) for i in bits_of(mask))
            parts.append(f"({value:.6g}){word}")
        return ' + '.join(parts)
