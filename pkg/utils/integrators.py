"""
Fixed-step Runge-Kutta integration.
"""

import math
from typing import Callable, Optional, Tuple

import numpy as np

from models.errors import IntegrationError

VectorField = Callable[[float, np.ndarray], np.ndarray]


def rk4_step(f: VectorField, t: float, y: np.ndarray, h: float) -> np.ndarray:
    k1 = f(t, y)
    k2 = f(t + h / 2, y + h / 2 * k1)
    k3 = f(t + h / 2, y + h / 2 * k2)
    k4 = f(t + h, y + h * k3)
    return y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def step_count(t: float, dt: float) -> int:
    """Number of equal steps of size <= dt covering [0, t]."""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t}")
    return max(0, math.ceil(t / dt - 1e-9))


def integrate(f: VectorField, y0: np.ndarray, t: float, dt: float,
              sample_every: Optional[int] = 1, t0: float = 0.0) -> Tuple[np.ndarray, np.ndarray]:
    """
    Integrate y' = f(t, y) from t0 to t0 + t with RK4.

    The step is t / ceil(t / dt), so the last sample lands exactly on t0 + t.

    Args:
        f: Vector field
        y0: Initial state (any shape, real or complex)
        t: Duration
        dt: Largest step
        sample_every: Keep every k-th step (the final state is always kept);
                      None keeps only the endpoints
        t0: Start time

    Returns:
        (times, states) with states stacked along axis 0

    Raises:
        IntegrationError: non-finite state
    """
    steps = step_count(t, dt)
    y = np.asarray(y0)
    y = y.astype(np.result_type(y.dtype, float))
    times = [t0]
    states = [y.copy()]
    if steps == 0:
        return np.array(times), np.array(states)
    h = t / steps
    for k in range(1, steps + 1):
        y = rk4_step(f, t0 + (k - 1) * h, y, h)
        if not np.all(np.isfinite(y)):
            raise IntegrationError(f"non-finite state at t = {t0 + k * h:.6g}")
        if k == steps or (sample_every and k % sample_every == 0):
            times.append(t0 + k * h)
            states.append(y.copy())
    return np.array(times), np.array(states)
