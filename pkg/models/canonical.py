"""
Linear canonical transformations φ' = Sφ.
"""

from dataclasses import dataclass, field
from typing import Any, Dict

import numpy as np

from models.algebra import AlgebraDescriptor
from models.errors import CanonicalError


@dataclass(frozen=True, eq=False)
class LinearCanonical:
    """
    A symplectic matrix S with its induced maps on the odd variables.

    One-form generators transform as c' = S c, so the coefficients of a
    form transform with S^{-T}; contractions transform with S^{-T} too.
    """

    S: np.ndarray
    label: str = 'custom'
    params: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        S = np.asarray(self.S, dtype=float)
        if S.ndim != 2 or S.shape[0] != S.shape[1] or S.shape[0] % 2:
            raise CanonicalError(f"transform must be a square 2n x 2n matrix, got shape {S.shape}")
        object.__setattr__(self, 'S', S)

    @property
    def n_pairs(self) -> int:
        return self.S.shape[0] // 2

    @property
    def algebra(self) -> AlgebraDescriptor:
        return AlgebraDescriptor(self.n_pairs)

    @property
    def inverse(self) -> np.ndarray:
        return np.linalg.inv(self.S)

    @property
    def coefficient_map(self) -> np.ndarray:
        """S^{-T}: maps one-form coefficients ψ_a to ψ'_a."""
        return self.inverse.T

    def symplectic_defect(self) -> float:
        """max |S ω Sᵀ - ω|."""
        omega = self.algebra.omega.astype(float)
        return float(np.max(np.abs(self.S @ omega @ self.S.T - omega)))

    def describe(self) -> str:
        if not self.params:
            return self.label
        inner = ', '.join(f"{k}={v}" for k, v in sorted(self.params.items()))
        return f"{self.label}({inner})"
