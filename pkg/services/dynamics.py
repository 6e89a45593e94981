"""
Classical dynamics: Hamiltonian models, flow, Jacobi fields, Lyapunov exponents.

Builtin models are closed-form numpy functions; parsed models get their
gradient and Hessian from second-order forward-mode AD over the parsed
expression.
"""

import logging
from typing import Dict, Optional

import numpy as np
import pandas as pd

from config.settings import INTEGRATION_DEFAULTS
from models.dynamics import HamiltonianModel, JacobiState, Trajectory
from models.errors import IntegrationError
from utils.expression_parser import compile_expression, parse_expression
from utils.hyperdual import HyperDual
from utils.integrators import integrate

logger = logging.getLogger(__name__)

BUILTINS = ('harmonic', 'inverted', 'free', 'quartic')


# =============================================================================
# MODELS
# =============================================================================

def builtin_model(name: str, n_pairs: int = 1, **params) -> HamiltonianModel:
    """
    Closed-form builtin Hamiltonians, summed over degrees of freedom.

    - harmonic(m, omega): p²/2m + mω²q²/2
    - inverted: p²/2 - q²/2
    - free: p²/2
    - quartic(lambda4): p²/2 + λ4 q⁴/4
    """
    n = n_pairs
    if name == 'harmonic':
        m = float(params.get('m', 1.0))
        omega = float(params.get('omega', 1.0))
        if m <= 0:
            raise ValueError("harmonic model needs m > 0")
        kq, kp = m * omega ** 2, 1.0 / m
        diagonal = np.concatenate([np.full(n, kq), np.full(n, kp)])
        return _quadratic(n, diagonal, 'harmonic', {'m': m, 'omega': omega})
    if name == 'inverted':
        diagonal = np.concatenate([np.full(n, -1.0), np.full(n, 1.0)])
        return _quadratic(n, diagonal, 'inverted', {})
    if name == 'free':
        diagonal = np.concatenate([np.zeros(n), np.ones(n)])
        return _quadratic(n, diagonal, 'free', {})
    if name == 'quartic':
        lam = float(params.get('lambda4', 1.0))

        def energy(phi):
            q, p = phi[:n], phi[n:]
            return 0.5 * np.sum(p ** 2) + lam * np.sum(q ** 4) / 4

        def gradient(phi):
            q, p = phi[:n], phi[n:]
            return np.concatenate([lam * q ** 3, p])

        def hessian(phi):
            q = phi[:n]
            return np.diag(np.concatenate([3 * lam * q ** 2, np.ones(n)]))

        return HamiltonianModel(n, energy, gradient, hessian, 'quartic', {'lambda4': lam})
    raise ValueError(f"unknown builtin model '{name}' (choose from {', '.join(BUILTINS)})")


def _quadratic(n: int, diagonal: np.ndarray, name: str, params: Dict) -> HamiltonianModel:
    hess = np.diag(diagonal)
    return HamiltonianModel(
        n_pairs=n,
        energy=lambda phi: 0.5 * float(phi @ hess @ phi),
        gradient_fn=lambda phi: hess @ phi,
        hessian_fn=lambda phi: hess,
        provenance=name,
        params=params,
        constant_hessian=True,
    )


def parse_hamiltonian(text: str, n_pairs: Optional[int] = None) -> HamiltonianModel:
    """
    Build a model from an expression such as "p^2/2 + q^4/4".

    Raises:
        ExpressionError: syntax error (with position), unknown identifier,
                         non-integer exponent
    """
    tree, n = parse_expression(text, n_pairs)
    evaluate = compile_expression(tree, n)
    size = 2 * n

    def seeded(phi):
        duals = [HyperDual.variable(value, index, size) for index, value in enumerate(phi)]
        result = evaluate(duals)
        if not isinstance(result, HyperDual):
            result = HyperDual.constant(result, size)
        return result

    logger.debug(f"parsed Hamiltonian '{text}' with n = {n}")
    return HamiltonianModel(
        n_pairs=n,
        energy=lambda phi: float(evaluate(list(phi))),
        gradient_fn=lambda phi: seeded(phi).grad,
        hessian_fn=lambda phi: seeded(phi).hess,
        provenance='parsed',
        params={'expression': text},
    )


def model_from_potential(potential: str, n_pairs: int = 1, **params) -> HamiltonianModel:
    """A builtin name (with params) or an expression text."""
    if potential in BUILTINS:
        return builtin_model(potential, n_pairs, **params)
    return parse_hamiltonian(potential, n_pairs)


def derivative_check(model: HamiltonianModel, phi, h: float = 1e-5) -> Dict[str, float]:
    """
    Relative deviation of the model's gradient and Hessian from central
    finite differences at φ.
    """
    phi = np.asarray(phi, dtype=float)
    size = len(phi)
    eye = np.eye(size)
    grad_fd = np.array([(model.evaluate(phi + h * eye[a]) - model.evaluate(phi - h * eye[a])) / (2 * h)
                        for a in range(size)])
    hess_fd = np.array([(model.gradient(phi + h * eye[a]) - model.gradient(phi - h * eye[a])) / (2 * h)
                        for a in range(size)])
    grad = model.gradient(phi)
    hess = model.hessian(phi)
    return {
        'gradient': float(np.max(np.abs(grad - grad_fd)) / max(1.0, np.max(np.abs(grad)))),
        'hessian': float(np.max(np.abs(hess - hess_fd)) / max(1.0, np.max(np.abs(hess)))),
    }


# =============================================================================
# FLOW AND JACOBI FIELDS
# =============================================================================

def flow(model: HamiltonianModel, phi0, t: float, dt: Optional[float] = None,
         sample_every: Optional[int] = 1) -> Trajectory:
    """
    RK4 integration of φ̇ = ω ∂H.

    Raises:
        IntegrationError: non-finite state
    """
    dt = INTEGRATION_DEFAULTS['dt'] if dt is None else dt
    phi0 = np.asarray(phi0, dtype=float)
    times, states = integrate(lambda _, y: model.vector_field(y), phi0, t, dt, sample_every)
    energies = np.array([model.evaluate(state) for state in states])
    trajectory = Trajectory(times, states, energies)
    logger.debug(f"flow {model.describe()} t={t} dt={dt}: drift {trajectory.energy_drift:.3g}")
    return trajectory


def _jacobi_field(model: HamiltonianModel):
    size = 2 * model.n_pairs

    def field(_, y):
        phi = y[:size]
        tangent = y[size:].reshape(size, -1)
        return np.concatenate([model.vector_field(phi), (model.jacobi_matrix(phi) @ tangent).ravel()])
    return field


def monodromy(model: HamiltonianModel, phi0, t: float, dt: Optional[float] = None) -> JacobiState:
    """
    Co-integrate the flow and δφ̇ = M(φ(t)) δφ for the identity basis.

    Returns:
        JacobiState at time t
    """
    dt = INTEGRATION_DEFAULTS['dt'] if dt is None else dt
    size = 2 * model.n_pairs
    y0 = np.concatenate([np.asarray(phi0, dtype=float), np.eye(size).ravel()])
    _, states = integrate(_jacobi_field(model), y0, t, dt, sample_every=None)
    final = states[-1]
    return JacobiState(final[:size], final[size:].reshape(size, size), t)


def jacobi_growth(model: HamiltonianModel, phi0, t: float, dt: Optional[float] = None,
                  delta0=None, sample_every: int = 100) -> pd.DataFrame:
    """
    D(φ0, t) = ‖δφ(t)‖² along the orbit; δφ(0) defaults to e_{q1}.

    Returns:
        DataFrame with columns t and D
    """
    dt = INTEGRATION_DEFAULTS['dt'] if dt is None else dt
    size = 2 * model.n_pairs
    delta0 = np.eye(size)[0] if delta0 is None else np.asarray(delta0, dtype=float)
    y0 = np.concatenate([np.asarray(phi0, dtype=float), delta0])
    times, states = integrate(_jacobi_field(model), y0, t, dt, sample_every)
    growth = np.sum(states[:, size:] ** 2, axis=1)
    return pd.DataFrame({'t': times, 'D': growth})


# =============================================================================
# LYAPUNOV EXPONENTS
# =============================================================================

def lyapunov(model: HamiltonianModel, phi0, T: float, dt: Optional[float] = None,
             renorm_interval: Optional[float] = None, delta0=None) -> float:
    """
    Largest Lyapunov exponent by Jacobi-vector renormalization.

    The tangent vector starts along (1, ..., 1)/√(2n) unless delta0 is
    given, is renormalized every renorm_interval, and the exponent is the
    accumulated log growth divided by T.

    Raises:
        IntegrationError: non-finite growth
    """
    dt = INTEGRATION_DEFAULTS['dt'] if dt is None else dt
    renorm_interval = INTEGRATION_DEFAULTS['renorm_interval'] if renorm_interval is None else renorm_interval
    if not T > 0 or not renorm_interval > dt:
        raise ValueError("lyapunov needs T > 0 and renorm_interval > dt")
    size = 2 * model.n_pairs
    delta = np.ones(size) if delta0 is None else np.asarray(delta0, dtype=float)
    delta = delta / np.linalg.norm(delta)
    phi = np.asarray(phi0, dtype=float)
    field = _jacobi_field(model)

    chunks = max(1, round(T / renorm_interval))
    chunk = T / chunks
    log_growth = 0.0
    for k in range(chunks):
        _, states = integrate(field, np.concatenate([phi, delta]), chunk, dt, sample_every=None,
                              t0=k * chunk)
        phi, delta = states[-1][:size], states[-1][size:]
        length = np.linalg.norm(delta)
        if not np.isfinite(length) or length == 0:
            raise IntegrationError(f"degenerate tangent growth at t = {(k + 1) * chunk:.6g}")
        log_growth += np.log(length)
        delta = delta / length
    return float(log_growth / T)


def lyapunov_ensemble(model: HamiltonianModel, samples: int, seed: int, T: float,
                      dt: Optional[float] = None, renorm_interval: Optional[float] = None,
                      box: Optional[float] = None) -> Dict:
    """
    Monte-Carlo mean of per-orbit estimates over φ0 uniform in [-box, box]^{2n}.

    Returns:
        Dict with 'estimates', 'mean', 'std' and the initial 'points'
    """
    box = INTEGRATION_DEFAULTS['lyapunov_box'] if box is None else box
    rng = np.random.default_rng(seed)
    points = rng.uniform(-box, box, size=(samples, 2 * model.n_pairs))
    estimates = [lyapunov(model, point, T, dt, renorm_interval) for point in points]
    logger.info(f"lyapunov ensemble of {samples} orbits: mean {np.mean(estimates):.4f}")
    return {
        'estimates': estimates,
        'mean': float(np.mean(estimates)),
        'std': float(np.std(estimates)),
        'points': points.tolist(),
    }


def trajectory_frame(model: HamiltonianModel, trajectory: Trajectory) -> pd.DataFrame:
    """Columns t, q1..qn, p1..pn, energy."""
    names = model.algebra.labels()
    frame = pd.DataFrame(trajectory.states, columns=names)
    frame.insert(0, 't', trajectory.times)
    frame['energy'] = trajectory.energies
    return frame
