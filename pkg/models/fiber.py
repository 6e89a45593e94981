"""
Records for form-valued evolution and ring-discretized Liouvillians.
"""

from dataclasses import dataclass
from typing import List

import numpy as np

from models.algebra import AlgebraDescriptor
from models.dynamics import JacobiState
from models.errors import SpectrumError
from models.metric import Metric
from models.multivector import Multivector


@dataclass(frozen=True, eq=False)
class FiberTrajectory:
    """
    Classical orbit carrying a fiber state.

    fibers[k] is the coefficient vector of ψ at times[k]; norms[k] its
    metric norm ⟨ψ|ψ⟩_g.
    """

    algebra: AlgebraDescriptor
    times: np.ndarray
    phis: np.ndarray
    fibers: np.ndarray
    norms: np.ndarray
    monodromy: JacobiState
    metric: Metric

    @property
    def final_fiber(self) -> Multivector:
        return Multivector.from_vector(self.algebra, self.fibers[-1])

    @property
    def zero_form_drift(self) -> float:
        """max |ψ_∅(t) - ψ_∅(0)|; zero under the Lie-derivative flow."""
        return float(np.max(np.abs(self.fibers[:, 0] - self.fibers[0, 0])))

    @property
    def norm_drift(self) -> float:
        return float(np.max(np.abs(self.norms - self.norms[0])))


@dataclass(frozen=True, eq=False)
class RingLiouvillian:
    """
    L̂ = -iω(J)∂_θ discretized on rings of constant action J.

    One spectral-differentiation block per ring; the operator is their
    block-diagonal sum.
    """

    rings: List[float]
    frequencies: List[float]
    n_theta: int
    operator: np.ndarray

    @property
    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.operator - self.operator.conj().T), initial=0.0))

    def spectrum(self, tol: float = 1e-10) -> np.ndarray:
        return real_spectrum(self.operator, tol)


def real_spectrum(operator: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """
    Sorted real parts of the eigenvalues of a self-adjoint operator.

    The eigenvalues come from the raw matrix; SpectrumError is raised when
    the operator is not Hermitian or any eigenvalue has |Im| > tol.
    """
    defect = float(np.max(np.abs(operator - operator.conj().T), initial=0.0))
    if defect > tol:
        raise SpectrumError(f"operator is not Hermitian (defect {defect:.2e})")
    values = np.linalg.eigvals(operator)
    imag = float(np.max(np.abs(values.imag), initial=0.0))
    if imag > tol:
        raise SpectrumError(f"complex eigenvalue with |Im| = {imag:.2e}")
    return np.sort(values.real)
