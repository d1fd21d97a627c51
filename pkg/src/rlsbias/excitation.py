"""Excitation diagnostics: windowed excitation bounds, average excitation
estimates, and regularized condition-number trajectories."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .estimators import Regularizer, RegressorAccumulator
from .linalg import condition_number, sym_eigenvalues

# A window counts as exciting when its smallest eigenvalue clears this
# fraction of max(1, largest eigenvalue).
PE_RTOL = 1e-10


@dataclass
class PEWindowReport:
    """Eigenvalue bounds of one excitation window."""

    window_length: int
    alpha: float  # smallest eigenvalue of the window sum, clamped at 0
    beta: float  # largest eigenvalue of the window sum
    satisfied: bool


@dataclass
class CEstimate:
    """Average excitation matrix gram / k together with the step count."""

    C: np.ndarray
    k: int


def pe_window_check(grams, start: int, window_length: int) -> PEWindowReport:
    """Eigenvalue bounds of sum(grams[start .. start + window_length]).

    ``grams`` is a sequence of per-step matrices phi.T @ phi.  The window is
    inclusive on both ends (window_length + 1 terms).  The window counts as
    exciting when alpha > PE_RTOL * max(1, beta).
    """
    grams = list(grams)
    if window_length < 0:
        raise ValueError(f"window length must be >= 0, got {window_length}")
    if start < 0 or start + window_length >= len(grams):
        raise ValueError(
            f"window [{start}, {start + window_length}] out of range for "
            f"{len(grams)} gram matrices"
        )
    total = np.zeros_like(np.asarray(grams[start], dtype=float))
    for g in grams[start : start + window_length + 1]:
        total += g
    evs = sym_eigenvalues(total)
    alpha = max(float(evs[-1]), 0.0)
    beta = float(evs[0])
    return PEWindowReport(
        window_length=window_length,
        alpha=alpha,
        beta=beta,
        satisfied=alpha > PE_RTOL * max(1.0, beta),
    )


def estimate_C(acc: RegressorAccumulator) -> CEstimate:
    """Running average gram / count of the accumulated excitation."""
    if acc.count < 1:
        raise ValueError("cannot estimate average excitation with no data")
    return CEstimate(acc.gram / acc.count, acc.count)


def regularized_condition_trajectory(snapshots, reg: Regularizer) -> list[float]:
    """Condition number of (gram + R) for each accumulator snapshot.

    With no data the trajectory starts at the condition number of R itself
    (1 for scaled-identity regularizers).
    """
    return [condition_number(s.gram + reg.R) for s in snapshots]
