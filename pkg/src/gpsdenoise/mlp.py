"""2-3-1 perceptron (tanh hidden layer, linear output) trained by per-sample backprop.

Inputs at step k are the two most recent measurements (measured[k-1],
measured[k]); the target is the true position at k.  Both are standardised
with statistics from the training half only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DivergenceError, ParameterError
from .trajectory import ErrorStats, Trajectory, error_stats

N_IN, N_HIDDEN = 2, 3
STD_FLOOR = 1e-12


@dataclass(frozen=True)
class Scaling:
    """Affine standardisation: network units = (raw - mean) / std."""

    in_mean: tuple = (0.0, 0.0)
    in_std: tuple = (1.0, 1.0)
    out_mean: float = 0.0
    out_std: float = 1.0

    @classmethod
    def fit(cls, inputs, targets):
        inputs = np.asarray(inputs, dtype=float)
        targets = np.asarray(targets, dtype=float)

        def floor(sd):
            return np.where(sd > STD_FLOOR, sd, 1.0)

        return cls(tuple(inputs.mean(axis=0)), tuple(floor(inputs.std(axis=0))),
                   float(targets.mean()), float(floor(np.asarray(targets.std()))))

    def encode_input(self, u):
        return (np.asarray(u, dtype=float) - np.asarray(self.in_mean)) / np.asarray(self.in_std)

    def encode_target(self, t):
        return (t - self.out_mean) / self.out_std

    def decode_output(self, v):
        return v * self.out_std + self.out_mean


@dataclass(frozen=True, eq=False)
class MlpParams:
    w_hidden: np.ndarray  # (3, 2)
    b_hidden: np.ndarray  # (3,)
    w_out: np.ndarray  # (3,)
    b_out: float
    scaling: Scaling = Scaling()
    train_mse: float | None = None

    def __post_init__(self):
        if np.shape(self.w_hidden) != (N_HIDDEN, N_IN) or np.shape(self.b_hidden) != (N_HIDDEN,) \
                or np.shape(self.w_out) != (N_HIDDEN,):
            raise ParameterError("parameters do not match the 2-3-1 architecture")

    @classmethod
    def zeros(cls, scaling=Scaling()):
        return cls(np.zeros((N_HIDDEN, N_IN)), np.zeros(N_HIDDEN), np.zeros(N_HIDDEN), 0.0, scaling)

    def flat(self):
        return np.concatenate([self.w_hidden.ravel(), self.b_hidden, self.w_out, [self.b_out]])

    def with_flat(self, v):
        v = np.asarray(v, dtype=float)
        return replace(self, w_hidden=v[:6].reshape(N_HIDDEN, N_IN), b_hidden=v[6:9].copy(),
                       w_out=v[9:12].copy(), b_out=float(v[12]))


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 500
    learning_rate: float = 0.01
    seed: int = 0
    # None: fit from the training data
    normalization: Scaling | None = None

    def __post_init__(self):
        if not isinstance(self.epochs, (int, np.integer)) or self.epochs < 1:
            raise ParameterError(f"epochs must be an integer >= 1, got {self.epochs!r}")
        if not self.learning_rate > 0:
            raise ParameterError(f"learning_rate must be positive, got {self.learning_rate}")


def _net(p: MlpParams, u):
    """Forward pass in network units; returns (output, hidden activations)."""
    a = np.tanh(p.w_hidden @ u + p.b_hidden)
    return p.w_out @ a + p.b_out, a


def forward(params: MlpParams, x):
    out, _ = _net(params, params.scaling.encode_input(x))
    return float(params.scaling.decode_output(out))


def _backprop(p: MlpParams, u, t):
    """Gradient of 0.5*(net(u) - t)^2 in network units, flattened like `MlpParams.flat`."""
    out, a = _net(p, u)
    delta = out - t
    d_hidden = delta * p.w_out * (1.0 - a * a)
    return np.concatenate([np.outer(d_hidden, u).ravel(), d_hidden, delta * a, [delta]]), delta


def grad(params: MlpParams, x, target):
    """Gradient of 0.5*(forward(x) - target)^2 w.r.t. every weight and bias."""
    sc = params.scaling
    g, _ = _backprop(params, sc.encode_input(x), sc.encode_target(target))
    return g * sc.out_std ** 2


def sgd_step(params: MlpParams, x, target, lr):
    sc = params.scaling
    g, _ = _backprop(params, sc.encode_input(x), sc.encode_target(target))
    return params.with_flat(params.flat() - lr * g)


def init_params(seed, scaling=Scaling()):
    rng = np.random.default_rng(seed)
    v = rng.uniform(-0.5, 0.5, size=N_HIDDEN * N_IN + 2 * N_HIDDEN + 1)
    return MlpParams.zeros(scaling).with_flat(v)


def train(inputs, targets, config: TrainConfig = TrainConfig()):
    """Stochastic gradient descent over the dataset in order, once per epoch."""
    inputs = np.asarray(inputs, dtype=float).reshape(-1, N_IN)
    targets = np.asarray(targets, dtype=float).ravel()
    if inputs.shape[0] == 0:
        raise ParameterError("training set is empty")
    if inputs.shape[0] != targets.size:
        raise ParameterError("inputs and targets differ in length")

    scaling = config.normalization or Scaling.fit(inputs, targets)
    U = scaling.encode_input(inputs)
    T = scaling.encode_target(targets)

    p = init_params(config.seed, scaling)
    # scalar loop: the 13 weights are tiny, numpy call overhead dominates
    w = p.flat().tolist()
    data = list(zip(U.tolist(), T.tolist()))
    lr = config.learning_rate
    tanh = math.tanh
    for epoch in range(1, config.epochs + 1):
        sq = 0.0
        for (u0, u1), t in data:
            a0 = tanh(w[0] * u0 + w[1] * u1 + w[6])
            a1 = tanh(w[2] * u0 + w[3] * u1 + w[7])
            a2 = tanh(w[4] * u0 + w[5] * u1 + w[8])
            delta = w[9] * a0 + w[10] * a1 + w[11] * a2 + w[12] - t
            d0 = delta * w[9] * (1.0 - a0 * a0)
            d1 = delta * w[10] * (1.0 - a1 * a1)
            d2 = delta * w[11] * (1.0 - a2 * a2)
            w[0] -= lr * d0 * u0
            w[1] -= lr * d0 * u1
            w[2] -= lr * d1 * u0
            w[3] -= lr * d1 * u1
            w[4] -= lr * d2 * u0
            w[5] -= lr * d2 * u1
            w[6] -= lr * d0
            w[7] -= lr * d1
            w[8] -= lr * d2
            w[9] -= lr * delta * a0
            w[10] -= lr * delta * a1
            w[11] -= lr * delta * a2
            w[12] -= lr * delta
            sq += delta * delta
        if not math.isfinite(sq) or not all(math.isfinite(v) for v in w):
            raise DivergenceError(epoch)

    p = p.with_flat(w)
    preds = np.array([forward(p, x) for x in inputs])
    return replace(p, train_mse=float(np.mean((preds - targets) ** 2)))


def features(measured, start, stop):
    """Input pairs (measured[k-1], measured[k]) for k in [start, stop)."""
    measured = np.asarray(measured, dtype=float)
    k = np.arange(max(start, 1), stop)
    return np.column_stack([measured[k - 1], measured[k]]), k


def evaluate_split(traj: Trajectory, config: TrainConfig = TrainConfig()):
    """Train on the first half, predict the second half.

    Returns (estimates, ErrorStats, params); estimates cover samples
    N//2 .. N-1.
    """
    n = len(traj)
    if n < 4:
        raise ParameterError(f"need at least 4 samples for a train/evaluate split, got {n}")
    half = n // 2
    x_train, k_train = features(traj.measured, 1, half)
    params = train(x_train, traj.truth[k_train], config)
    # truth is only read for the second half from here on
    x_eval, k_eval = features(traj.measured, half, n)
    estimates = predict(params, x_eval)
    return estimates, error_stats(estimates, traj.truth[k_eval]), params


def predict(params: MlpParams, inputs):
    sc = params.scaling
    U = sc.encode_input(np.asarray(inputs, dtype=float).reshape(-1, N_IN))
    out = np.tanh(U @ params.w_hidden.T + params.b_hidden) @ params.w_out + params.b_out
    return sc.decode_output(out)


def run(traj: Trajectory, config: TrainConfig = TrainConfig()) -> tuple[np.ndarray, ErrorStats]:
    estimates, stats, _ = evaluate_split(traj, config)
    return estimates, stats
