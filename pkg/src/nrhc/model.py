"""Drive/response system models.

A SystemModel decomposes the dynamics as

    rhs(y, theta) = A y + f(y) + D(y) theta

where D(y) isolates exactly the terms multiplied by the (estimated)
parameters. The drive system evaluates the same structure at the true
parameter trajectory theta_true(t); the response system at the current
estimate. Both benchmark systems share this structure for drive and
response (the response linear part equals A).

theta_true is attached for simulation and evaluation only: the sweep and
Hamiltonian layers never receive it, only drive-state samples.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import NumericalBlowup


@dataclass(frozen=True)
class ParameterTrajectory:
    """A time-to-parameter-vector map with a human-readable description."""
    evaluator: Callable[[float], np.ndarray]
    description: str = ""

    def __call__(self, t: float) -> np.ndarray:
        return self.evaluator(t)


@dataclass(frozen=True)
class SystemModel:
    """Immutable system description; shareable across threads.

    D_jac(y) returns one n-by-n Jacobian per parameter column of D.
    lambda_hess, when given, returns the costate-weighted second-derivative
    contraction sum_k lam_k * d^2[f(y) + D(y)theta]_k / dy dy analytically;
    models without it fall back to finite differences in the Hamiltonian
    layer (step 1e-5, with the documented accuracy loss).
    """
    name: str
    n: int
    p: int
    A: np.ndarray
    f: Callable[[np.ndarray], np.ndarray]
    f_jac: Callable[[np.ndarray], np.ndarray]
    D: Callable[[np.ndarray], np.ndarray]
    D_jac: Callable[[np.ndarray], Sequence[np.ndarray]]
    theta_true: ParameterTrajectory
    lambda_hess: Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray] | None = None


def response_jacobian(model: SystemModel, y: np.ndarray, theta_hat: np.ndarray) -> np.ndarray:
    """State Jacobian of the response RHS: A + f_jac(y) + sum_j theta_j dD.j/dy."""
    J = model.A + model.f_jac(y)
    cols = model.D_jac(y)
    for j in range(model.p):
        J = J + theta_hat[j] * cols[j]
    return J


def drive_rhs(model: SystemModel, x: np.ndarray, t: float) -> np.ndarray:
    """RHS of the drive system at the true parameters."""
    out = model.A @ x + model.f(x) + model.D(x) @ model.theta_true(t)
    if not math.isfinite(float(out.sum())):
        raise NumericalBlowup(f"non-finite drive RHS at t={t}")
    return out


def response_rhs(model: SystemModel, y: np.ndarray, theta_hat: np.ndarray) -> np.ndarray:
    """RHS of the response system at the estimated parameters."""
    out = model.A @ y + model.f(y) + model.D(y) @ theta_hat
    if not math.isfinite(float(out.sum())):
        raise NumericalBlowup("non-finite response RHS")
    return out


def lorenz_model() -> SystemModel:
    """Modified Lorenz benchmark: 3 states, 2 time-varying parameters."""
    A = np.zeros((3, 3))
    DJ1 = np.array([[-1.0, 1.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
    DJ2 = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, -1.0]])

    def f(y):
        return np.array([0.0, 28.0 * y[0] - y[0] * y[2] - y[1], y[0] * y[1]])

    def f_jac(y):
        return np.array([
            [0.0, 0.0, 0.0],
            [28.0 - y[2], -1.0, -y[0]],
            [y[1], y[0], 0.0],
        ])

    def D(y):
        return np.array([[y[1] - y[0], 0.0], [0.0, 0.0], [0.0, -y[2]]])

    def D_jac(y):
        return (DJ1, DJ2)

    def lambda_hess(y, lam, theta_hat):
        # second derivatives of (f + D theta) are constant: only the
        # bilinear terms y1*y3 and y1*y2 contribute
        return np.array([
            [0.0, lam[2], -lam[1]],
            [lam[2], 0.0, 0.0],
            [-lam[1], 0.0, 0.0],
        ])

    theta = ParameterTrajectory(
        lambda t: np.array([10.0 * np.sin(t) / (t + 1.0), 8.0 / 3.0]),
        "theta1 = 10 sin(t)/(t+1), theta2 = 8/3",
    )
    return SystemModel("lorenz", 3, 2, A, f, f_jac, D, D_jac, theta, lambda_hess)


def _guay_theta1(t: float) -> float:
    if t <= 6.0 * np.pi:
        return 2.0 + np.sin(t)
    if t <= 14.0 * np.pi + np.pi / 12.0:
        return 2.0 - np.sin(np.pi / 3.0) + np.sin(2.0 * t + np.pi / 3.0)
    return 2.0 - np.sin(np.pi / 3.0) + np.sin(np.pi / 2.0)


def guay_model() -> SystemModel:
    """Two-state benchmark with piecewise-sinusoidal parameters."""
    A = np.diag([-2.0, -2.0])
    DJ1 = np.zeros((2, 2))
    DJ2 = np.array([[0.0, 0.0], [1.0, 0.0]])

    def f(y):
        return np.array([-y[1] ** 2, 0.0])

    def f_jac(y):
        return np.array([[0.0, -2.0 * y[1]], [0.0, 0.0]])

    def D(y):
        return np.array([[1.0, 0.0], [0.0, y[0]]])

    def D_jac(y):
        return (DJ1, DJ2)

    def lambda_hess(y, lam, theta_hat):
        # only -y2^2 in the first component is nonlinear
        return np.array([[0.0, 0.0], [0.0, -2.0 * lam[0]]])

    theta = ParameterTrajectory(
        lambda t: np.array([_guay_theta1(t), 3.0 * np.cos(0.1 * np.pi * t)]),
        "piecewise theta1; theta2 = 3 cos(0.1 pi t)",
    )
    return SystemModel("guay", 2, 2, A, f, f_jac, D, D_jac, theta, lambda_hess)


_REGISTRY: dict[str, Callable[[], SystemModel]] = {
    "lorenz": lorenz_model,
    "guay": guay_model,
}


def register_model(name: str, factory: Callable[[], SystemModel]) -> None:
    """Register a custom model factory under a CLI-selectable name."""
    _REGISTRY[name] = factory


def get_model(name: str) -> SystemModel:
    try:
        return _REGISTRY[name]()
    except KeyError:
        raise KeyError(
            f"unknown model {name!r}; registered: {sorted(_REGISTRY)}"
        ) from None


def model_names() -> list[str]:
    return sorted(_REGISTRY)
