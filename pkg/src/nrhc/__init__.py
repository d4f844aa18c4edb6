"""Real-time nonlinear receding horizon parameter estimation."""

from .errors import ConfigError, EmptyWindow, NumericalBlowup, SingularHessian
from .estimator import (EstimatorConfig, EstimatorState, TailMetrics,
                        TraceRecord, horizon_length, run, step, tail_metrics)
from .hamiltonian import (CostWeights, HamiltonianPartials, glk_matrices,
                          optimal_parameter, partials, running_cost)
from .model import (ParameterTrajectory, SystemModel, drive_rhs, get_model,
                    guay_model, lorenz_model, model_names, register_model,
                    response_rhs)
from .sweep import HorizonGrid, SweepResult, backward_sweep, forward_sweep

__version__ = "0.1.0"
