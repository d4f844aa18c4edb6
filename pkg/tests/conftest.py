import numpy as np
import pytest

from nrhc.hamiltonian import CostWeights
from nrhc.model import ParameterTrajectory, SystemModel, guay_model, lorenz_model


@pytest.fixture
def lorenz():
    return lorenz_model()


@pytest.fixture
def guay():
    return guay_model()


@pytest.fixture
def lorenz_weights():
    return CostWeights(Q=np.diag([1.0, 0.5, 0.1]), R=np.diag([0.02, 0.02]))


@pytest.fixture
def guay_weights():
    return CostWeights(Q=np.diag([100.0, 110.0]), R=np.diag([0.1, 0.2]))


def make_lq_model():
    """Linear 2-state model with constant regressor; Riccati test instance."""
    A = np.array([[0.0, 1.0], [-2.0, -3.0]])
    Dc = np.array([[0.4, 0.0], [0.3, 0.8]])
    zeros22 = np.zeros((2, 2))
    return SystemModel(
        "lq_test", 2, 2, A,
        f=lambda y: np.zeros(2),
        f_jac=lambda y: zeros22,
        D=lambda y: Dc,
        D_jac=lambda y: (zeros22, zeros22),
        theta_true=ParameterTrajectory(lambda t: np.zeros(2), "zero"),
        lambda_hess=lambda y, lam, th: zeros22,
    )


def make_zero_theta_lorenz():
    """Lorenz structure with an identically zero true-parameter trajectory."""
    base = lorenz_model()
    return SystemModel(
        "lorenz_zero", base.n, base.p, base.A, base.f, base.f_jac,
        base.D, base.D_jac,
        ParameterTrajectory(lambda t: np.zeros(2), "zero"),
        base.lambda_hess,
    )
