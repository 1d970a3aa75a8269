"""Position/velocity Kalman filter driven by position-only measurements."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, ParameterError
from .trajectory import Trajectory

DEFAULT_Q = 30.0 ** 2

H = np.array([[1.0, 0.0]])
I2 = np.eye(2)


@dataclass(frozen=True, eq=False)
class KalmanModel:
    A: np.ndarray
    H: np.ndarray
    q: float
    r: float
    dt: float

    def __post_init__(self):
        if not self.q > 0:
            raise ParameterError(f"Q must be positive, got {self.q}")
        if not self.r > 0:
            raise ParameterError(f"R must be positive, got {self.r}")
        if not self.dt > 0:
            raise ParameterError(f"dt must be positive, got {self.dt}")

    @classmethod
    def from_dt(cls, dt, q=DEFAULT_Q, r=None):
        """Constant-velocity model; R defaults to Q when not given."""
        r = q if r is None else r
        A = np.array([[1.0, dt], [0.0, 1.0]])
        return cls(A, H.copy(), float(q), float(r), float(dt))

    @classmethod
    def for_trajectory(cls, traj: Trajectory, q=DEFAULT_Q, r=None):
        """Pick R from the generating noise when the trajectory carries it."""
        if r is None and traj.noise is not None and traj.noise.white_sigma > 0:
            r = traj.noise.white_sigma ** 2
        return cls.from_dt(traj.dt, q, r)


@dataclass(frozen=True, eq=False)
class KalmanState:
    x_hat: np.ndarray
    P: np.ndarray
    K: np.ndarray
    k: int

    @property
    def position(self):
        return float(self.x_hat[0])


def init(z1, z2, model: KalmanModel):
    x_hat = np.array([(z1 + z2) / 2.0, (z2 - z1) / model.dt])
    return KalmanState(x_hat, model.q * I2, np.zeros(2), 1)


def predict(state: KalmanState, model: KalmanModel):
    A = model.A
    x_prior = A @ state.x_hat
    P_prior = A @ state.P @ A.T + model.q * I2
    P_prior = (P_prior + P_prior.T) / 2
    return KalmanState(x_prior, P_prior, state.K, state.k + 1)


def update(state: KalmanState, z, model: KalmanModel):
    """Measurement update on an a priori state from `predict`."""
    Hm = model.H
    S = (Hm @ state.P @ Hm.T).item() + model.r
    if not S > 0 or not np.isfinite(S):
        raise NumericalError(f"innovation variance is not positive at step {state.k}: {S}")
    K = (state.P @ Hm.T).ravel() / S
    residual = z - (Hm @ state.x_hat).item()
    x_post = state.x_hat + K * residual
    P_post = (I2 - np.outer(K, Hm)) @ state.P
    P_post = (P_post + P_post.T) / 2
    return KalmanState(x_post, P_post, K, state.k)


def iterate(measured, model: KalmanModel):
    """Yield the initial state, then each posterior state from sample 2 on."""
    measured = np.asarray(measured, dtype=float)
    if measured.size < 2:
        raise ParameterError("the filter needs at least two measurements to initialise")
    state = init(measured[0], measured[1], model)
    yield state
    for z in measured[2:]:
        state = update(predict(state, model), z, model)
        yield state


def run(traj: Trajectory, model: KalmanModel | None = None):
    """Filter the measured series; returns (position estimates, final state)."""
    model = KalmanModel.for_trajectory(traj) if model is None else model
    estimates = np.empty(len(traj))
    states = iterate(traj.measured, model)
    state = next(states)
    estimates[:2] = state.position
    for i, state in enumerate(states, start=2):
        estimates[i] = state.position
    return estimates, state
