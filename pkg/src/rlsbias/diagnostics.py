"""Bias and convergence-rate diagnostics.

Two complementary views of the regularization-induced error on noise-free
data: closed-form predictions of where k * (estimate - truth) settles, and
empirical log-log slopes of error trajectories (a 1/k decay shows up as a
slope of -1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NotPersistentlyExcitingError
from .estimators import Regularizer, RegressorAccumulator
from .excitation import CEstimate
from .linalg import SINGULARITY_RTOL, spd_solve, sym_eigenvalues


@dataclass
class BiasPrediction:
    """Predicted asymptote v of k * (theta_k - theta_true)."""

    v: np.ndarray

    @property
    def per_component_scaled_error(self) -> np.ndarray:
        """Alias: componentwise asymptote of the scaled error."""
        return self.v


def predict_bias_asymptote(
    C: CEstimate, reg: Regularizer, theta_true: np.ndarray
) -> BiasPrediction:
    """v = C^-1 R (theta0 - theta_true).

    Raises NotPersistentlyExcitingError when C is singular within
    tolerance (the limit does not exist without persistent excitation).
    """
    theta_true = np.asarray(theta_true, dtype=float).ravel()
    evs = sym_eigenvalues(C.C)
    if evs[-1] <= SINGULARITY_RTOL * max(evs[0], 0.0) or evs[0] <= 0.0:
        raise NotPersistentlyExcitingError(
            f"average excitation matrix is singular (eigenvalue range "
            f"[{evs[-1]:.3e}, {evs[0]:.3e}])"
        )
    v = spd_solve(C.C, reg.R @ (reg.theta0 - theta_true))
    return BiasPrediction(v=v)


def exact_bias(
    acc: RegressorAccumulator, reg: Regularizer, theta_true: np.ndarray
) -> np.ndarray:
    """Finite-k error of the regularized solution on noise-free data.

    Returns (gram + R)^-1 R (theta0 - theta_true), which equals
    theta_estimate - theta_true exactly when y = phi theta_true held at
    every absorbed step.  With no data this reduces to theta0 - theta_true.
    """
    theta_true = np.asarray(theta_true, dtype=float).ravel()
    return spd_solve(acc.gram + reg.R, reg.R @ (reg.theta0 - theta_true))


def log_slope(f_k: float, f_km1: float, k: int) -> float:
    """Discrete log-log slope between steps k-1 and k.

    (log f_k - log f_{k-1}) / (log k - log(k-1)); the value is independent
    of the logarithm base.  Returns NaN when either value is non-positive
    (undefined-slope sentinel).  Requires k >= 2.
    """
    if k < 2:
        raise ValueError(f"log slope needs k >= 2, got {k}")
    if f_k <= 0.0 or f_km1 <= 0.0:
        return float("nan")
    return (math.log(f_k) - math.log(f_km1)) / (math.log(k) - math.log(k - 1))


def log_slope_sequence(values: np.ndarray) -> np.ndarray:
    """log_slope along a trajectory indexed by k = 0..len-1.

    Entries at k <= 1 are NaN, as are entries where either value in the
    ratio is non-positive.
    """
    values = np.asarray(values, dtype=float)
    out = np.full(values.shape, np.nan)
    if values.size < 3:
        return out
    k = np.arange(values.size, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = np.where(values > 0.0, np.log(np.where(values > 0.0, values, 1.0)), np.nan)
        num = logs[2:] - logs[1:-1]
        den = np.log(k[2:]) - np.log(k[1:-1])
        out[2:] = num / den
    return out


def moving_average(series, window: int) -> np.ndarray:
    """Trailing moving average; the first window-1 entries are NaN warm-up.

    NaN entries inside a window are excluded from its mean (a window with
    no finite entries yields NaN).
    """
    series = np.asarray(series, dtype=float)
    if series.size == 0:
        raise ValueError("cannot average an empty series")
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    out = np.full(series.shape, np.nan)
    if window > series.size:
        return out
    finite = np.isfinite(series)
    vals = np.where(finite, series, 0.0)
    csum = np.concatenate([[0.0], np.cumsum(vals)])
    ccnt = np.concatenate([[0], np.cumsum(finite.astype(np.int64))])
    sums = csum[window:] - csum[:-window]
    cnts = ccnt[window:] - ccnt[:-window]
    with np.errstate(invalid="ignore"):
        out[window - 1 :] = np.where(cnts > 0, sums / np.maximum(cnts, 1), np.nan)
    return out


@dataclass
class TraceRecord:
    """One step of an error/conditioning trace.

    per_component_error holds |theta_k - theta_true| componentwise;
    error_norm is the Euclidean norm of the same difference.  kappa is the
    condition number of (gram-through-k + R), NaN when skipped by a stride.
    log_slope is NaN at k <= 1 and wherever undefined.  For trial-averaged
    traces, log_slope is recomputed from the averaged error norm and
    log_slope_trial_mean carries the mean of the per-trial slopes.
    """

    k: int
    per_component_error: np.ndarray
    error_norm: float
    kappa: float = float("nan")
    log_slope: float = float("nan")
    delta_kappa: float = float("nan")
    log_slope_trial_mean: float = field(default=float("nan"))


def _delta_sequence(values: np.ndarray) -> np.ndarray:
    out = np.full(values.shape, np.nan)
    if values.size >= 2:
        out[1:] = values[1:] - values[:-1]
    return out


def _nan_mean_stack(arrays: list[np.ndarray]) -> np.ndarray:
    """Positionwise mean over trials, ignoring NaN; sequential accumulation
    in trial order so results do not depend on how trials were scheduled."""
    total = np.zeros_like(arrays[0])
    count = np.zeros(arrays[0].shape, dtype=np.int64)
    for a in arrays:
        good = np.isfinite(a)
        total = total + np.where(good, a, 0.0)
        count = count + good.astype(np.int64)
    with np.errstate(invalid="ignore"):
        return np.where(count > 0, total / np.maximum(count, 1), np.nan)


def average_over_trials(traces) -> list[TraceRecord]:
    """Pointwise mean of several per-trial traces on the same step grid.

    Component errors, error norms, and kappa are averaged positionwise;
    log_slope is recomputed from the averaged error norm; the mean of the
    per-trial slopes is kept alongside in log_slope_trial_mean;
    delta_kappa is recomputed from the averaged kappa.  A single trial
    passes through unchanged (slope recomputation aside).
    """
    traces = [list(t) for t in traces]
    if not traces:
        raise ValueError("need at least one trace")
    ks = [rec.k for rec in traces[0]]
    for t in traces[1:]:
        if [rec.k for rec in t] != ks:
            raise ValueError("traces do not share a common step grid")
    comps = _nan_mean_stack(
        [np.stack([rec.per_component_error for rec in t]) for t in traces]
    )
    norms = _nan_mean_stack(
        [np.array([rec.error_norm for rec in t]) for t in traces]
    )
    kappas = _nan_mean_stack([np.array([rec.kappa for rec in t]) for t in traces])
    slope_mean = _nan_mean_stack(
        [np.array([rec.log_slope for rec in t]) for t in traces]
    )
    slope_of_avg = log_slope_sequence(norms)
    dkappa = _delta_sequence(kappas)
    return [
        TraceRecord(
            k=ks[i],
            per_component_error=comps[i],
            error_norm=float(norms[i]),
            kappa=float(kappas[i]),
            log_slope=float(slope_of_avg[i]),
            delta_kappa=float(dkappa[i]),
            log_slope_trial_mean=float(slope_mean[i]),
        )
        for i in range(len(ks))
    ]
