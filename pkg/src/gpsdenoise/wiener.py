"""Causal FIR Wiener filter: correlation estimates, Toeplitz solve, convolution.

Correlations use the biased (1/N) estimator.  With that choice the Toeplitz
system is exactly the normal equation of the zero-padded least-squares
problem solved by `design_mse`, so the designed filter is its minimiser.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DesignError, ParameterError
from .trajectory import Trajectory

LENGTHS = (180, 135, 90)
REFLECTION_LIMIT = 1 - 1e-12
RESIDUAL_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class CorrelationSet:
    r_xx: np.ndarray
    r_sx: np.ndarray
    n_samples: int

    @property
    def m(self):
        return len(self.r_xx)


@dataclass(frozen=True, eq=False)
class FirFilter:
    h: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.h, dtype=float).ravel()
        if h.size < 1:
            raise ParameterError("a filter needs at least one coefficient")
        if not np.all(np.isfinite(h)):
            raise ParameterError("filter coefficients must be finite")
        h.setflags(write=False)
        object.__setattr__(self, "h", h)

    @property
    def M(self):
        return self.h.size


def _check_lags(n, m):
    if not isinstance(m, (int, np.integer)) or m < 1:
        raise ParameterError(f"lag count must be a positive integer, got {m!r}")
    if m > n:
        raise ParameterError(f"lag count {m} exceeds series length {n}")


def autocorr(x, m):
    """r(tau) = (1/N) sum_k x[k] x[k+tau], tau = 0..m-1."""
    x = np.asarray(x, dtype=float)
    n = x.size
    _check_lags(n, m)
    return np.correlate(x, x, mode="full")[n - 1: n - 1 + m] / n


def crosscorr(s, x, m):
    """r(tau) = (1/N) sum_k s[k+tau] x[k]: the desired signal against past input.

    This is the lag direction that pairs with a causal filter
    y[k] = sum_i h[i] x[k-i].
    """
    s = np.asarray(s, dtype=float)
    x = np.asarray(x, dtype=float)
    if s.shape != x.shape:
        raise ParameterError(f"series lengths differ ({s.size} vs {x.size})")
    n = x.size
    _check_lags(n, m)
    return np.correlate(s, x, mode="full")[n - 1: n - 1 + m] / n


def correlations(traj: Trajectory, m, window=None):
    """Correlation estimates from the first `window` samples (default: all)."""
    window = len(traj) if window is None else window
    if not 1 <= window <= len(traj):
        raise ParameterError(f"window must be in [1, {len(traj)}], got {window}")
    x = traj.measured[:window]
    s = traj.truth[:window]
    return CorrelationSet(autocorr(x, m), crosscorr(s, x, m), window)


def toeplitz(r):
    r = np.asarray(r, dtype=float)
    idx = np.abs(np.arange(r.size)[:, None] - np.arange(r.size)[None, :])
    return r[idx]


def levinson(r, b):
    """Solve the symmetric Toeplitz system T(r) h = b by Levinson recursion.

    Returns None when a reflection coefficient reaches the stability limit,
    which signals that the caller should fall back to a dense solve.
    """
    r = np.asarray(r, dtype=float)
    b = np.asarray(b, dtype=float)
    n = r.size
    if r[0] <= 0:
        return None
    rho = r[1:] / r[0]
    b = b / r[0]
    x = np.zeros(n)
    y = np.zeros(n)
    x[0] = b[0]
    if n == 1:
        return x
    alpha = -rho[0]
    y[0] = alpha
    beta = 1.0
    for k in range(1, n):
        if abs(alpha) >= REFLECTION_LIMIT:
            return None
        beta *= 1.0 - alpha * alpha
        rev = y[k - 1::-1]
        mu = (b[k] - rho[:k] @ x[k - 1::-1]) / beta
        x[:k] += mu * rev
        x[k] = mu
        if k < n - 1:
            alpha = (-rho[k] - rho[:k] @ rev) / beta
            y[:k] += alpha * rev
            y[k] = alpha
    return x


def relative_residual(r_xx, h, r_sx):
    r_sx = np.asarray(r_sx, dtype=float)
    scale = np.max(np.abs(r_sx))
    resid = np.max(np.abs(toeplitz(r_xx) @ h - r_sx))
    return resid / scale if scale > 0 else resid


def design(corr: CorrelationSet, m=None):
    """Solve R_xx h = r_sx for an order-`m` filter."""
    m = corr.m if m is None else m
    if not isinstance(m, (int, np.integer)) or m < 1:
        raise ParameterError(f"filter length must be a positive integer, got {m!r}")
    if corr.r_xx.size < m or corr.r_sx.size < m:
        raise ParameterError(f"correlations cover {corr.m} lags, need {m}")
    r = corr.r_xx[:m]
    b = corr.r_sx[:m]
    if not np.any(b):
        return FirFilter(np.zeros(m))

    h = levinson(r, b)
    if h is not None and np.all(np.isfinite(h)) and relative_residual(r, h, b) < RESIDUAL_TOL:
        return FirFilter(h)

    T = toeplitz(r)
    try:
        h = np.linalg.solve(T, b)
    except np.linalg.LinAlgError:
        raise DesignError("Toeplitz system is singular", np.linalg.cond(T)) from None
    if not np.all(np.isfinite(h)) or relative_residual(r, h, b) >= RESIDUAL_TOL:
        raise DesignError("Toeplitz solve missed the residual tolerance", np.linalg.cond(T))
    return FirFilter(h)


def apply(fir: FirFilter, x):
    """Causal convolution from zero initial state; output length equals input."""
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        return x.copy()
    return np.convolve(fir.h, x)[: x.size]


def design_from_trajectory(traj: Trajectory, m):
    """Reduced-length scheme: design from the first `m` samples only."""
    if not isinstance(m, (int, np.integer)) or not 1 <= m <= len(traj):
        raise ParameterError(f"filter length must be in [1, {len(traj)}], got {m!r}")
    return design(correlations(traj, m, window=m), m)


def design_mse(h, x, s):
    """Zero-padded squared error that the biased-correlation design minimises.

    (1/N) * sum over the full convolution of (s padded with M-1 zeros - h*x)^2.
    """
    h = np.asarray(h, dtype=float)
    x = np.asarray(x, dtype=float)
    s = np.asarray(s, dtype=float)
    y = np.convolve(h, x)
    target = np.concatenate([s, np.zeros(h.size - 1)])
    return float(np.sum((target - y) ** 2) / x.size)


def transient(m, skip):
    """Number of leading output samples to exclude from error statistics."""
    return m - 1 if skip else 0
