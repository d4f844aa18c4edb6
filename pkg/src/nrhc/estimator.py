"""Real-time continuation estimator.

Each step runs one forward/backward sweep pair, advances the continuation
costate by dlambda/dt = -H_y' + c(0, t), recomputes the estimate from the
updated costate, and steps the drive and response systems. One estimator
instance is strictly sequential; independent instances share nothing.

The drive system is integrated internally from its known dynamics as a
simulation stand-in for measurement; the estimation path consumes only its
state samples (the true parameter trajectory is sampled for logging only).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, EmptyWindow, NumericalBlowup, SingularHessian
from .hamiltonian import CostWeights, optimal_parameter, running_cost
from .model import SystemModel, drive_rhs, get_model, model_names, response_rhs
from .numerics import rk4_step
from .sweep import DRIVE_MODES, backward_sweep, forward_sweep

DEFAULT_T_END = {"lorenz": 20.0, "guay": 60.0}


@dataclass
class EstimatorConfig:
    model_name: str
    w: CostWeights
    T_f: float
    alpha: float
    A_s: np.ndarray
    dt: float
    N: int
    t_end: float
    x0: np.ndarray
    y0: np.ndarray
    lambda0: np.ndarray
    drive_mode: str = "hold"

    def validate(self, model: SystemModel | None = None) -> None:
        """Raise ConfigError naming the offending key."""
        if model is None:
            try:
                model = get_model(self.model_name)
            except KeyError:
                raise ConfigError(
                    f"model_name: unknown model {self.model_name!r} "
                    f"(known: {model_names()})"
                ) from None
        if not self.T_f > 0:
            raise ConfigError(f"T_f: must be positive, got {self.T_f}")
        if not self.alpha > 0:
            raise ConfigError(f"alpha: must be positive, got {self.alpha}")
        if not self.dt > 0:
            raise ConfigError(f"dt: must be positive, got {self.dt}")
        if self.N < 1:
            raise ConfigError(f"N: must be >= 1, got {self.N}")
        if self.t_end < 0:
            raise ConfigError(f"t_end: must be nonnegative, got {self.t_end}")
        if self.drive_mode not in DRIVE_MODES:
            raise ConfigError(
                f"drive_mode: must be one of {DRIVE_MODES}, got {self.drive_mode!r}"
            )
        n, p = model.n, model.p
        for key, arr, length in (("x0", self.x0, n), ("y0", self.y0, n),
                                 ("lambda0", self.lambda0, n)):
            if np.asarray(arr).shape != (length,):
                raise ConfigError(
                    f"{key}: expected length {length}, got shape {np.asarray(arr).shape}"
                )
        if self.A_s.shape != (n, n):
            raise ConfigError(f"A_s: expected shape {(n, n)}, got {self.A_s.shape}")
        if np.linalg.eigvals(self.A_s).real.min() <= 0:
            raise ConfigError("A_s: all eigenvalues must have positive real part")
        if self.w.Q.shape != (n, n):
            raise ConfigError(f"Q: expected shape {(n, n)}, got {self.w.Q.shape}")
        if self.w.R.shape != (p, p):
            raise ConfigError(f"R: expected shape {(p, p)}, got {self.w.R.shape}")


@dataclass
class EstimatorState:
    t: float
    x: np.ndarray
    y: np.ndarray
    lam: np.ndarray
    F_norm: float = 0.0
    theta_hat: np.ndarray = field(default_factory=lambda: np.zeros(0))


@dataclass(frozen=True)
class TraceRecord:
    t: float
    x: np.ndarray
    y: np.ndarray
    e: np.ndarray
    theta_hat: np.ndarray
    theta_true: np.ndarray
    theta_err: np.ndarray
    F_norm: float
    cost: float


@dataclass(frozen=True)
class TailMetrics:
    t_from: float
    t_end: float
    e_rms: float
    e_max: float
    theta_err_rms: np.ndarray   # per component
    theta_err_max: np.ndarray   # per component
    F_norm_max: float


def horizon_length(t: float, T_f: float, alpha: float) -> tuple[float, float]:
    """Smooth horizon schedule T(t) = T_f (1 - exp(-alpha t)) and dT/dt."""
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    decay = math.exp(-alpha * t)
    return T_f * (1.0 - decay), T_f * alpha * decay


def initial_state(cfg: EstimatorConfig, model: SystemModel | None = None) -> EstimatorState:
    if model is None:
        model = get_model(cfg.model_name)
    y0 = np.asarray(cfg.y0, dtype=float).copy()
    lam0 = np.asarray(cfg.lambda0, dtype=float).copy()
    return EstimatorState(
        t=0.0,
        x=np.asarray(cfg.x0, dtype=float).copy(),
        y=y0,
        lam=lam0,
        F_norm=0.0,
        theta_hat=optimal_parameter(model, y0, lam0, cfg.w),
    )


def step(state: EstimatorState, cfg: EstimatorConfig,
         model: SystemModel) -> tuple[EstimatorState, TraceRecord]:
    """Advance the continuation by one dt step and emit a trace record.

    Sequence: sweep forward, sweep backward, Euler-update lambda, recompute
    theta_hat from the new costate, then advance drive and response by RK4
    with theta_hat held constant over the step. The record reflects the
    post-step time.
    """
    t, x, y, lam = state.t, state.x, state.y, state.lam
    T, dT_dt = horizon_length(t, cfg.T_f, cfg.alpha)
    grid = forward_sweep(model, cfg.w, y, lam, x, T, cfg.N,
                         drive_mode=cfg.drive_mode, t0=t)
    F = grid.lambda_nodes[grid.n_intervals].copy()
    res = backward_sweep(grid, model, cfg.w, F, cfg.A_s, dT_dt, keep_grid=False)
    lam_new = lam + cfg.dt * (-res.H_y0 + res.c0)
    theta_hat = optimal_parameter(model, y, lam_new, cfg.w)
    x_new = rk4_step(lambda s, tau: drive_rhs(model, s, tau), x, t, cfg.dt)
    y_new = rk4_step(lambda s, tau: response_rhs(model, s, theta_hat), y, t, cfg.dt)
    t_new = t + cfg.dt

    F_norm = float(np.linalg.norm(F))
    e = y_new - x_new
    theta_true = model.theta_true(t_new)
    record = TraceRecord(
        t=t_new, x=x_new, y=y_new, e=e,
        theta_hat=theta_hat, theta_true=theta_true,
        theta_err=theta_hat - theta_true,
        F_norm=F_norm,
        cost=running_cost(e, theta_hat, cfg.w),
    )
    new_state = EstimatorState(t=t_new, x=x_new, y=y_new, lam=lam_new,
                               F_norm=F_norm, theta_hat=theta_hat)
    return new_state, record


def run(cfg: EstimatorConfig, model: SystemModel | None = None) -> list[TraceRecord]:
    """Iterate step from t=0 to t_end; deterministic given the config.

    On numerical blowup the raised error carries the step index, time
    stamp, and the partial trace collected so far (``exc.trace``).
    """
    if model is None:
        model = get_model(cfg.model_name)
    cfg.validate(model)
    n_steps = int(round(cfg.t_end / cfg.dt))
    state = initial_state(cfg, model)
    trace: list[TraceRecord] = []
    for i in range(n_steps):
        try:
            state, record = step(state, cfg, model)
        except (NumericalBlowup, SingularHessian) as exc:
            err = type(exc)(f"{exc} (step {i}, t={state.t:.4f})")
            err.trace = trace  # type: ignore[attr-defined]
            raise err from exc
        trace.append(record)
    return trace


def tail_metrics(trace: list[TraceRecord], t_from: float) -> TailMetrics:
    """RMS/max error metrics over the trace tail [t_from, t_end]."""
    if not trace or t_from >= trace[-1].t:
        raise EmptyWindow(
            f"metrics window [{t_from}, ...] selects no samples"
        )
    sel = [r for r in trace if r.t >= t_from]
    if not sel:
        raise EmptyWindow(f"metrics window [{t_from}, ...] selects no samples")
    e_norms = np.array([np.linalg.norm(r.e) for r in sel])
    theta_err = np.array([r.theta_err for r in sel])
    return TailMetrics(
        t_from=t_from,
        t_end=sel[-1].t,
        e_rms=float(np.sqrt(np.mean(e_norms ** 2))),
        e_max=float(e_norms.max()),
        theta_err_rms=np.sqrt(np.mean(theta_err ** 2, axis=0)),
        theta_err_max=np.abs(theta_err).max(axis=0),
        F_norm_max=float(max(r.F_norm for r in sel)),
    )
