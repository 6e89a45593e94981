"""
Scalar-product metrics and the conjugation rules that generate them.
"""

import cmath
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from models.algebra import AlgebraDescriptor
from models.errors import ConjugationError, MetricError

FAMILIES = ('svh', 'gauge', 'symplectic', 'generalA', 'generalB', 'generalC', 'custom')


def _encode(value: Any) -> Any:
    if isinstance(value, complex):
        return [value.real, value.imag]
    return value


@dataclass(frozen=True, eq=False)
class Metric:
    """
    Matrix g of ⟨Φ|ψ⟩ = Σ Φ*_i g_ij ψ_j on the monomial basis, plus provenance.
    """

    algebra: AlgebraDescriptor
    g: np.ndarray
    family: str = 'custom'
    params: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        g = np.asarray(self.g, dtype=complex)
        if g.shape != (self.algebra.dim, self.algebra.dim):
            raise MetricError(f"metric shape {g.shape} does not match fiber dimension {self.algebra.dim}")
        if self.family not in FAMILIES:
            raise MetricError(f"unknown metric family '{self.family}'")
        object.__setattr__(self, 'g', g)

    @property
    def hermiticity_defect(self) -> float:
        """max |g - gᴴ|; zero for a conjugate-symmetric metric."""
        return float(np.max(np.abs(self.g - self.g.conj().T), initial=0.0))

    @property
    def condition_number(self) -> float:
        return float(np.linalg.cond(self.g))

    def is_invertible(self, tol: float = 1e-12) -> bool:
        singular_values = np.linalg.svd(self.g, compute_uv=False)
        return bool(singular_values.min() > tol * max(1.0, singular_values.max()))

    def describe(self) -> str:
        if not self.params:
            return self.family
        inner = ', '.join(f"{k}={v}" for k, v in sorted(self.params.items()))
        return f"{self.family}({inner})"

    def to_json(self) -> Dict[str, Any]:
        return {
            'family': self.family,
            'params': {k: _encode(v) for k, v in sorted(self.params.items())},
            'n_pairs': self.algebra.n_pairs,
            'single_variable': self.algebra.single,
            'g': [[[float(x.real), float(x.imag)] for x in row] for row in self.g],
        }

    @classmethod
    def from_json(cls, document: Dict[str, Any]) -> 'Metric':
        try:
            single = bool(document.get('single_variable', False))
            algebra = (AlgebraDescriptor.single_variable() if single
                       else AlgebraDescriptor(int(document['n_pairs'])))
            g = np.array([[complex(re, im) for re, im in row] for row in document['g']], dtype=complex)
        except (KeyError, TypeError, ValueError) as e:
            raise MetricError(f"malformed metric document: {e}") from e
        params = {}
        for key, value in document.get('params', {}).items():
            params[key] = complex(*value) if isinstance(value, list) else value
        return cls(algebra, g, document.get('family', 'custom'), params)


# =============================================================================
# CONJUGATION RULES
# =============================================================================

@dataclass(frozen=True)
class PairRule:
    """
    Hermiticity condition for one generator pair.

    For the p-pair: ĉ^p† = α ĉ^p + β c̄_q and c̄_q† = γ ĉ^p + δ c̄_q.
    For the q-pair the same with q and p exchanged.
    """

    alpha: complex
    beta: complex
    gamma: complex
    delta: complex

    @classmethod
    def family1(cls, b: float) -> 'PairRule':
        if b == 0:
            raise ConjugationError("family 1 needs b != 0", relation='b != 0')
        return cls(0j, 1j * b, 1j / b, 0j)

    @classmethod
    def family2(cls, theta: float, gamma_i: float) -> 'PairRule':
        phase = cmath.exp(1j * theta)
        return cls(phase, 0j, 1j * gamma_i, phase.conjugate())

    @classmethod
    def family3(cls, theta: float, b: float) -> 'PairRule':
        phase = cmath.exp(1j * theta)
        return cls(phase, 1j * b, 0j, phase.conjugate())

    def relations(self) -> List[Tuple[str, complex, complex]]:
        """(relation, lhs, required value) for every defining constraint."""
        a, b, c, d = (complex(x) for x in (self.alpha, self.beta, self.gamma, self.delta))
        return [
            ('alpha*delta - beta*gamma = 1', a * d - b * c, 1),
            ('conj(alpha)*alpha + conj(beta)*gamma = 1', a.conjugate() * a + b.conjugate() * c, 1),
            ('conj(alpha)*beta + conj(beta)*delta = 0', a.conjugate() * b + b.conjugate() * d, 0),
            ('alpha*conj(gamma) + conj(delta)*gamma = 0', a * c.conjugate() + d.conjugate() * c, 0),
            ('conj(gamma)*beta + conj(delta)*delta = 1', c.conjugate() * b + d.conjugate() * d, 1),
            ('|alpha| = |delta|', abs(a), abs(d)),
            ('Im(conj(beta)*gamma) = 0', (b.conjugate() * c).imag, 0),
        ]

    def as_tuple(self) -> Tuple[complex, complex, complex, complex]:
        return tuple(complex(x) for x in (self.alpha, self.beta, self.gamma, self.delta))


@dataclass(frozen=True, eq=False)
class ConjugationRule:
    """
    Images of every generator operator under the conjugation.

    The generator operators are X = [ĉ^0..ĉ^{2n-1}, c̄_0..c̄_{2n-1}] and
    X_k† = Σ_l images[k, l] X_l. Rules built from pairs keep the pairs for
    classification.
    """

    algebra: AlgebraDescriptor
    images: np.ndarray
    name: str = 'custom'
    p_pair: Optional[PairRule] = None
    q_pair: Optional[PairRule] = None

    def __post_init__(self):
        images = np.asarray(self.images, dtype=complex)
        size = 2 * self.algebra.n_generators
        if images.shape != (size, size):
            raise ConjugationError(f"rule matrix must be {size}x{size}, got {images.shape}")
        object.__setattr__(self, 'images', images)

    @classmethod
    def svh(cls, algebra: AlgebraDescriptor) -> 'ConjugationRule':
        """ĉ^a† = c̄_a."""
        size = algebra.n_generators
        images = np.zeros((2 * size, 2 * size), dtype=complex)
        images[:size, size:] = np.eye(size)
        images[size:, :size] = np.eye(size)
        return cls(algebra, images, 'svh')

    @classmethod
    def gauge(cls, algebra: AlgebraDescriptor) -> 'ConjugationRule':
        """ĉ^a† = ĉ^a and c̄_a† = c̄_a."""
        rule = PairRule(1, 0, 0, 1)
        if algebra.single:
            return cls(algebra, np.eye(2), 'gauge')
        return cls.from_pairs(algebra, rule, rule, 'gauge')

    @classmethod
    def symplectic(cls, algebra: AlgebraDescriptor) -> 'ConjugationRule':
        """ĉ^a† = iω^{ab} c̄_b; the pair form of family 1 with b = -1."""
        return cls.from_pairs(algebra, PairRule.family1(-1.0), PairRule.family1(1.0), 'symplectic')

    @classmethod
    def from_pairs(cls, algebra: AlgebraDescriptor, p_pair: PairRule, q_pair: PairRule,
                   name: str = 'custom') -> 'ConjugationRule':
        if algebra.single:
            raise ConjugationError("pair rules need (q, p) pairs")
        size = algebra.n_generators
        images = np.zeros((2 * size, 2 * size), dtype=complex)
        for i in range(algebra.n_pairs):
            q, p = algebra.q(i), algebra.p(i)
            a, b, c, d = p_pair.as_tuple()
            images[p, p] = a
            images[p, size + q] = b
            images[size + q, p] = c
            images[size + q, size + q] = d
            a, b, c, d = q_pair.as_tuple()
            images[q, q] = a
            images[q, size + p] = b
            images[size + p, q] = c
            images[size + p, size + p] = d
        return cls(algebra, images, name, p_pair, q_pair)

    @classmethod
    def family(cls, algebra: AlgebraDescriptor, kind: str, theta: float = 0.0, b: float = 1.0,
               gamma_i: float = 0.0) -> 'ConjugationRule':
        """
        Consistent pairings of the three families: A(b), B(θ, γ_I), C(θ, b).

        The q-pair uses a = -b (A, C) or γ'_I = -γ_I (B) with the same θ.
        """
        kind = kind.upper()
        if kind == 'A':
            return cls.from_pairs(algebra, PairRule.family1(b), PairRule.family1(-b), 'generalA')
        if kind == 'B':
            return cls.from_pairs(algebra, PairRule.family2(theta, gamma_i),
                                  PairRule.family2(theta, -gamma_i), 'generalB')
        if kind == 'C':
            return cls.from_pairs(algebra, PairRule.family3(theta, b),
                                  PairRule.family3(theta, -b), 'generalC')
        raise ConjugationError(f"unknown family '{kind}'")
