"""
Descriptor of the Grassmann fiber algebra.
"""

from dataclasses import dataclass
from typing import List

import numpy as np

from models.errors import AlgebraError
from utils.bitmask import bits_of


@dataclass(frozen=True)
class AlgebraDescriptor:
    """
    Shape of the fiber: 2n state generators c^{q_1}..c^{q_n}, c^{p_1}..c^{p_n}
    plus P odd parameters θ_1..θ_P with starred partners θ*_1..θ*_P.

    A single-variable algebra has one generator c and no symplectic form;
    it carries the one-variable constructions of the scalar products.
    """

    n_pairs: int
    n_params: int = 0
    single: bool = False

    def __post_init__(self):
        if self.n_pairs < 0 or self.n_params < 0:
            raise AlgebraError("n_pairs and n_params must be >= 0")
        if self.single and self.n_pairs != 0:
            raise AlgebraError("single-variable algebra has no (q, p) pairs")

    @classmethod
    def single_variable(cls, n_params: int = 0) -> 'AlgebraDescriptor':
        return cls(n_pairs=0, n_params=n_params, single=True)

    @property
    def n_generators(self) -> int:
        return 1 if self.single else 2 * self.n_pairs

    @property
    def dim(self) -> int:
        """Fiber dimension 2^{2n}."""
        return 1 << self.n_generators

    @property
    def n_param_generators(self) -> int:
        return 2 * self.n_params

    @property
    def param_dim(self) -> int:
        return 1 << self.n_param_generators

    @property
    def volume(self) -> int:
        """Bitmask of the top monomial."""
        return self.dim - 1

    @property
    def omega(self) -> np.ndarray:
        """Symplectic form with ω^{q_i p_i} = +1."""
        if self.single:
            raise AlgebraError("single-variable algebra has no symplectic form")
        n = self.n_pairs
        omega = np.zeros((2 * n, 2 * n), dtype=int)
        omega[:n, n:] = np.eye(n, dtype=int)
        omega[n:, :n] = -np.eye(n, dtype=int)
        return omega

    def q(self, i: int) -> int:
        """Generator index of c^{q_{i+1}} (zero-based i)."""
        return i

    def p(self, i: int) -> int:
        return self.n_pairs + i

    def check_generator(self, a: int) -> int:
        if not 0 <= a < self.n_generators:
            raise AlgebraError(
                f"generator index {a} out of range for {self.n_generators} generators")
        return a

    def check_param(self, k: int) -> int:
        if not 0 <= k < self.n_param_generators:
            raise AlgebraError(
                f"parameter index {k} out of range for {self.n_param_generators} parameters")
        return k

    def labels(self) -> List[str]:
        if self.single:
            return ['c']
        n = self.n_pairs
        if n == 1:
            return ['q', 'p']
        return [f'q{i + 1}' for i in range(n)] + [f'p{i + 1}' for i in range(n)]

    def monomial_label(self, mask: int) -> str:
        if mask == 0:
            return '1'
        names = self.labels()
        return ' '.join(f'c^{names[a]}' if not self.single else 'c' for a in bits_of(mask))

    def parities(self) -> np.ndarray:
        """Parity (0 even, 1 odd) of every basis monomial."""
        return np.array([bin(mask).count('1') & 1 for mask in range(self.dim)], dtype=int)

    def rank_masks(self, rank: int) -> List[int]:
        return [mask for mask in range(self.dim) if bin(mask).count('1') == rank]

    def with_params(self, n_params: int) -> 'AlgebraDescriptor':
        return AlgebraDescriptor(self.n_pairs, n_params, self.single)

    def same_fiber(self, other: 'AlgebraDescriptor') -> bool:
        return self.n_pairs == other.n_pairs and self.single == other.single
