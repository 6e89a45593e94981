"""
Hamiltonian models and classical trajectory records.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional

import numpy as np

from config.settings import TOLERANCES
from models.algebra import AlgebraDescriptor

logger = logging.getLogger(__name__)

PhasePoint = np.ndarray


@dataclass(frozen=True, eq=False)
class HamiltonianModel:
    """
    H(φ) with gradient and Hessian, φ = (q1..qn, p1..pn).

    provenance is 'harmonic', 'inverted', 'free', 'quartic' or 'parsed';
    params holds the builtin parameters or the expression text.
    """

    n_pairs: int
    energy: Callable[[PhasePoint], float]
    gradient_fn: Callable[[PhasePoint], np.ndarray]
    hessian_fn: Callable[[PhasePoint], np.ndarray]
    provenance: str
    params: Dict[str, Any] = field(default_factory=dict)
    constant_hessian: bool = False

    @property
    def algebra(self) -> AlgebraDescriptor:
        return AlgebraDescriptor(self.n_pairs)

    @property
    def omega(self) -> np.ndarray:
        return self.algebra.omega.astype(float)

    def _point(self, phi) -> np.ndarray:
        phi = np.asarray(phi, dtype=float)
        if phi.shape != (2 * self.n_pairs,):
            raise ValueError(f"phase point must have {2 * self.n_pairs} entries, got {phi.shape}")
        return phi

    def evaluate(self, phi) -> float:
        return float(self.energy(self._point(phi)))

    def gradient(self, phi) -> np.ndarray:
        return np.asarray(self.gradient_fn(self._point(phi)), dtype=float)

    def hessian(self, phi) -> np.ndarray:
        """Symmetrized Hessian; an asymmetric raw Hessian is logged."""
        raw = np.asarray(self.hessian_fn(self._point(phi)), dtype=float)
        asymmetry = np.max(np.abs(raw - raw.T), initial=0.0)
        if asymmetry > TOLERANCES['hessian_symmetry'] * max(1.0, np.max(np.abs(raw), initial=0.0)):
            logger.warning(f"Hessian of {self.describe()} asymmetric by {asymmetry:.3g}; symmetrizing")
        return (raw + raw.T) / 2

    def vector_field(self, phi) -> np.ndarray:
        """φ̇^a = ω^{ab} ∂_b H."""
        return self.omega @ self.gradient(phi)

    def jacobi_matrix(self, phi) -> np.ndarray:
        """M^a_d = ω^{ab} ∂_b∂_d H."""
        return self.omega @ self.hessian(phi)

    def describe(self) -> str:
        if self.provenance == 'parsed':
            return f"parsed({self.params.get('expression', '')})"
        inner = ', '.join(f"{k}={v}" for k, v in sorted(self.params.items()))
        return f"{self.provenance}({inner})" if inner else self.provenance


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled flow φ(t_k) with energies."""

    times: np.ndarray
    states: np.ndarray
    energies: np.ndarray

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    @property
    def energy_drift(self) -> float:
        """max_k |H(t_k) - H(0)| / |H(0)| (absolute when H(0) = 0)."""
        reference = abs(self.energies[0])
        drift = float(np.max(np.abs(self.energies - self.energies[0]), initial=0.0))
        return drift / reference if reference > 0 else drift


@dataclass(frozen=True, eq=False)
class JacobiState:
    """Phase point and monodromy (fundamental Jacobi solution) at time t."""

    phi: np.ndarray
    monodromy: np.ndarray
    t: float

    @property
    def determinant(self) -> float:
        return float(np.linalg.det(self.monodromy))

    def symplectic_defect(self, omega: np.ndarray) -> float:
        """max |Mᵀ ω M - ω|."""
        m = self.monodromy
        return float(np.max(np.abs(m.T @ omega @ m - omega)))
