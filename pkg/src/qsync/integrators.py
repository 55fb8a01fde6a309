"""Fixed-step propagators for linear (affine) ODE systems.

The moment equations integrated here are linear and autonomous, so a classical
RK4 step reduces exactly to the degree-4 Taylor polynomial of the matrix
exponential.  ``rk4_step_matrix`` builds that one-step propagator once; the
matching exact propagator from :func:`scipy.linalg.expm` serves as the test
oracle.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import expm

from .errors import DimensionMismatch


def rk4_step(f, t: float, y: np.ndarray, h: float) -> np.ndarray:
    """One classical 4th-order Runge-Kutta step for ``dy/dt = f(t, y)``."""
    k1 = f(t, y)
    k2 = f(t + h / 2, y + h / 2 * k1)
    k3 = f(t + h / 2, y + h / 2 * k2)
    k4 = f(t + h, y + h * k3)
    return y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def rk4_step_matrix(G: np.ndarray, h: float) -> np.ndarray:
    """One-step RK4 propagator ``I + hG + (hG)^2/2 + (hG)^3/6 + (hG)^4/24``.

    For the autonomous linear system ``dy/dt = G y`` this equals the classical
    RK4 update applied to the state, to the last bit of arithmetic ordering.
    """
    X = h * G
    X2 = X @ X
    P = np.eye(G.shape[0], dtype=G.dtype) + X + X2 / 2 + X2 @ X / 6 + X2 @ X2 / 24
    return P


def expm_step_matrix(G: np.ndarray, h: float) -> np.ndarray:
    """Exact one-step propagator ``exp(hG)``; oracle for :func:`rk4_step_matrix`."""
    return expm(h * G)


def validate_uniform_grid(times: np.ndarray, tol: float = 1e-9) -> float:
    """Return the step of a uniform, strictly increasing time grid.

    ``tol`` is relative to the grid span.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size < 2:
        raise DimensionMismatch("time grid must be 1-D with at least two samples")
    steps = np.diff(times)
    h = float(steps[0])
    if h <= 0:
        raise DimensionMismatch("time grid must be strictly increasing")
    span = max(1.0, abs(float(times[-1] - times[0])))
    if np.max(np.abs(steps - h)) > tol * span:
        raise DimensionMismatch("time grid must be uniform")
    return h


def propagate_affine(
    G: np.ndarray,
    y0: np.ndarray,
    times: np.ndarray,
    max_step: float,
    stepper=rk4_step_matrix,
) -> np.ndarray:
    """Propagate ``dy/dt = G y`` over a uniform output grid.

    The output interval is split into the smallest number of equal substeps
    not exceeding ``max_step``; the per-substep propagator is composed once
    and reapplied, so the cost per output sample is a single matrix-vector
    product.

    Parameters
    ----------
    G:
        Generator, shape (m, m).  Affine systems are handled by augmenting
        the state with a constant component beforehand.
    y0:
        Initial state, shape (m,).
    times:
        Uniform output grid; ``y0`` corresponds to ``times[0]``.
    max_step:
        Upper bound on the internal substep.
    stepper:
        One-step propagator factory (RK4 by default, ``expm_step_matrix``
        for the exact oracle).
    """
    times = np.asarray(times, dtype=float)
    dt = validate_uniform_grid(times)
    if y0.shape != (G.shape[0],):
        raise DimensionMismatch("initial state does not match generator size")
    nsub = max(1, int(np.ceil(dt / max_step - 1e-12)))
    P = stepper(G, dt / nsub)
    P = np.linalg.matrix_power(P, nsub)
    out = np.empty((times.size, y0.size), dtype=np.result_type(G.dtype, y0.dtype))
    y = y0.astype(out.dtype, copy=True)
    for k in range(times.size):
        out[k] = y
        if k + 1 < times.size:
            y = P @ y
    return out
