"""Small dense linear algebra and fixed-step ODE integrators.

Vectors and matrices are plain float64 numpy arrays; everything here is a
pure function, safe to call from any thread. Matrix inverses are realized
as linear solves, never formed explicitly.
"""
from __future__ import annotations

import numpy as np

from .errors import NumericalBlowup, SingularHessian

# Condition-number cap above which a solve is treated as singular.
DEFAULT_COND_CAP = 1e12


def mat_vec(M: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Matrix-vector product with an explicit dimension check."""
    M = np.asarray(M, dtype=float)
    v = np.asarray(v, dtype=float)
    if M.ndim != 2 or v.ndim != 1 or M.shape[1] != v.shape[0]:
        raise ValueError(
            f"dimension mismatch in mat_vec: M is {M.shape}, v is {v.shape}"
        )
    return M @ v


def solve_small(M: np.ndarray, b: np.ndarray, cond_cap: float = DEFAULT_COND_CAP) -> np.ndarray:
    """Solve M x = b for a small square well-conditioned M.

    Raises SingularHessian when M is singular or its condition estimate
    exceeds ``cond_cap`` (the executability guard for the Hessian solves).
    """
    M = np.asarray(M, dtype=float)
    b = np.asarray(b, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] != b.shape[0]:
        raise ValueError(
            f"dimension mismatch in solve_small: M is {M.shape}, b is {b.shape}"
        )
    cond = np.linalg.cond(M)
    if not np.isfinite(cond) or cond > cond_cap:
        raise SingularHessian(
            f"matrix is singular or near-singular (cond estimate {cond:.3e})"
        )
    try:
        return np.linalg.solve(M, b)
    except np.linalg.LinAlgError as exc:  # exactly singular
        raise SingularHessian(str(exc)) from exc


def euler_step(f, state: np.ndarray, t: float, h: float) -> np.ndarray:
    """One explicit Euler step of ds/dt = f(s, t)."""
    if h <= 0:
        raise ValueError(f"step size must be positive, got {h}")
    out = state + h * np.asarray(f(state, t), dtype=float)
    if not np.all(np.isfinite(out)):
        raise NumericalBlowup(f"non-finite derivative in euler_step at t={t}")
    return out


def rk4_step(f, state: np.ndarray, t: float, h: float) -> np.ndarray:
    """One classical fourth-order Runge-Kutta step of ds/dt = f(s, t)."""
    if h <= 0:
        raise ValueError(f"step size must be positive, got {h}")
    k1 = np.asarray(f(state, t), dtype=float)
    k2 = np.asarray(f(state + 0.5 * h * k1, t + 0.5 * h), dtype=float)
    k3 = np.asarray(f(state + 0.5 * h * k2, t + 0.5 * h), dtype=float)
    k4 = np.asarray(f(state + h * k3, t + h), dtype=float)
    out = state + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(out)):
        raise NumericalBlowup(f"non-finite derivative in rk4_step at t={t}")
    return out
