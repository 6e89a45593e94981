"""
Linear changes of the odd variables.
"""

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from models.algebra import AlgebraDescriptor
from models.errors import AlgebraError
from models.multivector import Multivector
from models.operator import GrassmannOperator


@dataclass(frozen=True, eq=False)
class BasisChange:
    """
    New odd variables as combinations of ĉ^a and c̄_a:

        new_k = Σ_a P[k, a] ĉ^a + Q[k, a] c̄_a
        bar_k = Σ_a R[k, a] ĉ^a + T[k, a] c̄_a

    fiber_matrix is set when Q = 0: column S holds the c-coefficients of
    the new monomial new^S, so ψ_c = fiber_matrix · ψ_new.
    """

    algebra: AlgebraDescriptor
    P: np.ndarray
    Q: np.ndarray
    R: np.ndarray
    T: np.ndarray
    new_ops: List[GrassmannOperator]
    bar_ops: List[GrassmannOperator]
    names: List[str]
    fiber_matrix: Optional[np.ndarray] = None

    def anticommutator_table(self) -> np.ndarray:
        """[k, l] = {new_k, bar_l} (a multiple of the identity)."""
        size = len(self.new_ops)
        table = np.zeros((size, size), dtype=complex)
        for k, new in enumerate(self.new_ops):
            for l, bar in enumerate(self.bar_ops):
                table[k, l] = np.trace(new.anticommutator(bar).matrix) / self.algebra.dim
        return table

    def _require_fiber(self) -> np.ndarray:
        if self.fiber_matrix is None:
            raise AlgebraError("this change mixes ĉ and c̄, so it has no monomial lift")
        return self.fiber_matrix

    def to_c(self, coefficients) -> Multivector:
        """State with the given new-monomial coefficients, in the c basis."""
        return Multivector.from_vector(self.algebra, self._require_fiber() @ np.asarray(coefficients))

    def from_c(self, mv: Multivector) -> np.ndarray:
        """New-monomial coefficients of a c-basis state."""
        return np.linalg.solve(self._require_fiber(), mv.to_vector())
