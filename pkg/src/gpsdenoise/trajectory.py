"""Synthetic and recorded single-axis position series, plus error statistics."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import FormatError, ParameterError

DEFAULT_N = 180
DEFAULT_DT = 0.05
DEFAULT_TRUTH_LEVEL = 100.0

MOTIONS = ("static", "constant-velocity")


@dataclass(frozen=True)
class NoiseSpec:
    """AR(1) Gaussian error process with a constant bias.

    The defaults put the raw mean absolute error near 12 m for 180 samples.
    """

    white_sigma: float = 15.0
    ar_coeff: float = 0.2
    bias: float = 0.0
    seed: int = 7

    def __post_init__(self):
        if not self.white_sigma >= 0:
            raise ParameterError(f"white_sigma must be >= 0, got {self.white_sigma}")
        if not 0 <= self.ar_coeff < 1:
            raise ParameterError(f"ar_coeff must lie in [0, 1), got {self.ar_coeff}")
        if not math.isfinite(self.bias):
            raise ParameterError("bias must be finite")


@dataclass(frozen=True, eq=False)
class Trajectory:
    truth: np.ndarray
    measured: np.ndarray
    dt: float = DEFAULT_DT
    axis_label: str = "z"
    # generating noise process, when known (synthetic data only)
    noise: NoiseSpec | None = field(default=None, compare=False)

    def __post_init__(self):
        truth = np.asarray(self.truth, dtype=float)
        measured = np.asarray(self.measured, dtype=float)
        if truth.ndim != 1 or measured.ndim != 1:
            raise ParameterError("truth and measured must be one-dimensional")
        if len(truth) != len(measured):
            raise ParameterError(
                f"truth and measured lengths differ ({len(truth)} vs {len(measured)})")
        if len(truth) < 2:
            raise ParameterError(f"a trajectory needs at least 2 samples, got {len(truth)}")
        if not self.dt > 0:
            raise ParameterError(f"dt must be positive, got {self.dt}")
        object.__setattr__(self, "truth", truth)
        object.__setattr__(self, "measured", measured)

    def __len__(self):
        return len(self.truth)

    @property
    def times(self):
        return np.arange(len(self)) * self.dt

    def head(self, m):
        """First `m` samples as a new trajectory."""
        if not 2 <= m <= len(self):
            raise ParameterError(f"head length must be in [2, {len(self)}], got {m}")
        return Trajectory(self.truth[:m], self.measured[:m], self.dt, self.axis_label, self.noise)


@dataclass(frozen=True)
class ErrorStats:
    mean_abs: float
    variance: float
    count: int

    def as_dict(self):
        return {"mean_abs": self.mean_abs, "variance": self.variance, "count": self.count}


def ar1_noise(n, noise: NoiseSpec):
    rng = np.random.default_rng(noise.seed)
    w = rng.normal(0.0, noise.white_sigma, size=n) if noise.white_sigma > 0 else np.zeros(n)
    e = np.empty(n)
    prev = 0.0
    for k in range(n):
        prev = noise.ar_coeff * prev + w[k]
        e[k] = prev
    return e + noise.bias


def generate(n=DEFAULT_N, dt=DEFAULT_DT, motion="static", noise: NoiseSpec | None = None,
             truth_level=DEFAULT_TRUTH_LEVEL, velocity=1.0, axis_label="z"):
    """Simulate a receiver axis: deterministic truth plus AR(1)+bias error."""
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise ParameterError(f"n must be an integer >= 2, got {n!r}")
    if not dt > 0:
        raise ParameterError(f"dt must be positive, got {dt}")
    if motion not in MOTIONS:
        raise ParameterError(f"motion must be one of {MOTIONS}, got {motion!r}")
    noise = NoiseSpec() if noise is None else noise

    t = np.arange(n) * dt
    truth = np.full(n, float(truth_level))
    if motion == "constant-velocity":
        truth = truth + velocity * t
    measured = truth + ar1_noise(n, noise)
    return Trajectory(truth, measured, dt, axis_label, noise)


def load_csv(path):
    """Read a `t,truth,measured` file; the sampling period must be uniform."""
    path = Path(path)
    t, truth, measured = [], [], []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = None
        for row in reader:
            if not row or row[0].startswith("#"):
                continue
            header = [c.strip() for c in row]
            break
        if header != ["t", "truth", "measured"]:
            raise FormatError(f"expected header 't,truth,measured', got {header!r}",
                              line=reader.line_num or 1)
        for row in reader:
            if not row or not "".join(row).strip() or row[0].startswith("#"):
                continue
            if len(row) != 3:
                raise FormatError(f"expected 3 fields, got {len(row)}", line=reader.line_num)
            try:
                values = [float(c) for c in row]
            except ValueError:
                raise FormatError(f"non-numeric field in {row!r}", line=reader.line_num) from None
            if not all(math.isfinite(v) for v in values):
                raise FormatError("non-finite value", line=reader.line_num)
            t.append(values[0])
            truth.append(values[1])
            measured.append(values[2])

    if not t:
        raise FormatError("no samples")
    if len(t) < 2:
        raise FormatError("need at least 2 samples to infer the sampling period")
    t = np.asarray(t)
    dt = t[1] - t[0]
    if not dt > 0:
        raise FormatError(f"timestamps must increase (dt={dt})")
    steps = np.diff(t)
    bad = np.flatnonzero(np.abs(steps - dt) > 1e-9 * dt)
    if bad.size:
        i = int(bad[0])
        raise FormatError(f"non-uniform dt: step {steps[i]!r} differs from {dt!r}")
    return Trajectory(np.asarray(truth), np.asarray(measured), float(dt))


def save_csv(traj: Trajectory, path_or_file):
    """Write the `t,truth,measured` layout read by `load_csv`."""
    own = not hasattr(path_or_file, "write")
    fh = open(path_or_file, "w", newline="") if own else path_or_file
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "truth", "measured"])
        for k in range(len(traj)):
            writer.writerow([repr(k * traj.dt), repr(float(traj.truth[k])),
                             repr(float(traj.measured[k]))])
    finally:
        if own:
            fh.close()


def error_stats(estimate, truth):
    """Mean and population variance of the absolute error series."""
    estimate = np.asarray(estimate, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if estimate.shape != truth.shape:
        raise ParameterError(f"length mismatch: {estimate.shape} vs {truth.shape}")
    if estimate.size < 1:
        raise ParameterError("error_stats needs at least one sample")
    err = np.abs(estimate - truth)
    return ErrorStats(float(err.mean()), float(err.var()), int(err.size))
