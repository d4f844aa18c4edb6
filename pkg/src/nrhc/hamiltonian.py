"""Hamiltonian of the horizon problem and its derivatives.

H(y, lam, theta, x_ref) = 0.5 (e'Qe + theta'R theta) + lam' [A y + f(y) + D(y) theta]

with e = y - x_ref, x_ref the frozen drive sample supplied by the sweep.
All functions are stateless.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalBlowup, SingularHessian
from .model import SystemModel, response_jacobian, response_rhs

# Central-difference step for the H_yy fallback when no analytic
# second-order contraction is attached to the model.
_FD_HESS_STEP = 1e-5


@dataclass(frozen=True)
class CostWeights:
    """Positive-definite weights on sync error (Q) and estimate magnitude (R)."""
    Q: np.ndarray
    R: np.ndarray

    def __post_init__(self):
        for name, M in (("Q", self.Q), ("R", self.R)):
            M = np.asarray(M, dtype=float)
            if M.ndim != 2 or M.shape[0] != M.shape[1]:
                raise ValueError(f"{name} must be square, got shape {M.shape}")
            if not np.allclose(M, M.T, rtol=0.0, atol=1e-12):
                raise ValueError(f"{name} must be symmetric")
            try:
                np.linalg.cholesky(M)  # positive definiteness gate
            except np.linalg.LinAlgError:
                raise ValueError(f"{name} must be positive definite") from None
            object.__setattr__(self, name, M)


@dataclass(frozen=True)
class HamiltonianPartials:
    H_y: np.ndarray
    H_lambda: np.ndarray
    H_theta: np.ndarray
    H_yy: np.ndarray
    H_ytheta: np.ndarray
    H_thetatheta: np.ndarray


def running_cost(e: np.ndarray, theta_hat: np.ndarray, w: CostWeights) -> float:
    """0.5 (e'Qe + theta'R theta); the integrand of the horizon cost."""
    return 0.5 * (e @ w.Q @ e + theta_hat @ w.R @ theta_hat)


def optimal_parameter(model: SystemModel, y: np.ndarray, lam: np.ndarray,
                      w: CostWeights) -> np.ndarray:
    """Closed-form stationary point of H in theta: theta = -R^{-1} D(y)' lam."""
    rhs = model.D(y).T @ lam
    try:
        theta = -np.linalg.solve(w.R, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularHessian(f"R solve failed: {exc}") from exc
    res = w.R @ theta + rhs
    if res @ res > 1e-20 * max(1.0, rhs @ rhs):
        raise SingularHessian(
            f"stationarity residual {np.sqrt(res @ res):.3e} exceeds solver tolerance"
        )
    return theta


def _hess_contraction(model: SystemModel, y: np.ndarray, lam: np.ndarray,
                      theta_hat: np.ndarray) -> np.ndarray:
    """d/dy of (response-Jacobian)' lam, analytic when the model provides it."""
    if model.lambda_hess is not None:
        return model.lambda_hess(y, lam, theta_hat)
    n = model.n
    out = np.empty((n, n))
    h = _FD_HESS_STEP
    for k in range(n):
        dy = np.zeros(n)
        dy[k] = h
        gp = response_jacobian(model, y + dy, theta_hat).T @ lam
        gm = response_jacobian(model, y - dy, theta_hat).T @ lam
        out[:, k] = (gp - gm) / (2.0 * h)
    return 0.5 * (out + out.T)


def partials(model: SystemModel, y: np.ndarray, lam: np.ndarray,
             theta_hat: np.ndarray, x_ref: np.ndarray, w: CostWeights) -> HamiltonianPartials:
    """First and second partials of H at (y, lam, theta_hat, x_ref)."""
    J = response_jacobian(model, y, theta_hat)
    Dy = model.D(y)
    H_lambda = response_rhs(model, y, theta_hat)
    H_y = w.Q @ (y - x_ref) + J.T @ lam
    H_theta = w.R @ theta_hat + Dy.T @ lam
    H_yy = w.Q + _hess_contraction(model, y, lam, theta_hat)
    cols = model.D_jac(y)
    H_ytheta = np.empty((model.n, model.p))
    for j in range(model.p):
        H_ytheta[:, j] = cols[j].T @ lam
    if not (math.isfinite(float(H_y.sum())) and math.isfinite(float(H_yy.sum()))):
        raise NumericalBlowup("non-finite Hamiltonian partials")
    return HamiltonianPartials(H_y, H_lambda, H_theta, H_yy, H_ytheta, w.R)


def glk_matrices(p: HamiltonianPartials, model: SystemModel, y: np.ndarray,
                 theta_hat: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """G, L, K of the linearized horizon dynamics.

    G = f_y - f_theta Hqq^{-1} H_qy,  L = f_theta Hqq^{-1} f_theta',
    K = H_yy - H_yq Hqq^{-1} H_qy, with f the full response RHS
    (f_y its state Jacobian, f_theta = D(y)) and q shorthand for theta.
    """
    f_y = response_jacobian(model, y, theta_hat)
    f_theta = model.D(y)
    H_qy = p.H_ytheta.T
    # one multi-RHS solve covers both Hqq^{-1} H_qy and Hqq^{-1} f_theta'
    try:
        sol = np.linalg.solve(p.H_thetatheta, np.hstack([H_qy, f_theta.T]))
    except np.linalg.LinAlgError as exc:
        raise SingularHessian(f"H_thetatheta is singular: {exc}") from exc
    if not math.isfinite(float(sol.sum())):
        raise SingularHessian("H_thetatheta is near-singular (non-finite solve)")
    Hqq_inv_Hqy = sol[:, : model.n]
    Hqq_inv_ft = sol[:, model.n:]
    G = f_y - f_theta @ Hqq_inv_Hqy
    L = f_theta @ Hqq_inv_ft
    K = p.H_yy - p.H_ytheta @ Hqq_inv_Hqy
    L = 0.5 * (L + L.T)
    K = 0.5 * (K + K.T)
    return G, L, K
