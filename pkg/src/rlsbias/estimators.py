"""Regularized least-squares estimators: batch and recursive forms.

The recursive update keeps its regularization fixed at initialization: the
inverse of the prior weight matrix seeds the covariance-like matrix P, and
after absorbing observations 0..k-1 the recursive estimate equals the batch
solution over the same window with the same prior.  That equivalence is the
backbone of the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotSPDError, RankDeficientError
from .linalg import (
    SINGULARITY_RTOL,
    spd_cholesky,
    spd_inverse,
    spd_solve,
    sym_eigenvalues,
    symmetrize,
)


@dataclass
class Regularizer:
    """Prior weight matrix R (SPD) and prior mean theta0.

    R is symmetrized on construction and checked for positive definiteness.
    """

    R: np.ndarray
    theta0: np.ndarray

    def __post_init__(self):
        self.R = symmetrize(np.asarray(self.R, dtype=float))
        self.theta0 = np.asarray(self.theta0, dtype=float).ravel()
        if self.R.shape != (self.theta0.size, self.theta0.size):
            raise ValueError(
                f"R shape {self.R.shape} does not match theta0 size "
                f"{self.theta0.size}"
            )
        spd_cholesky(self.R)  # raises NotSPDError if R is not SPD

    @classmethod
    def scaled_identity(cls, n: int, r: float, theta0: np.ndarray | None = None):
        """R = r * I_n with prior mean theta0 (zero by default)."""
        if r <= 0.0:
            raise ValueError(f"regularization weight must be positive, got {r}")
        if theta0 is None:
            theta0 = np.zeros(n)
        return cls(r * np.eye(n), theta0)

    @property
    def n(self) -> int:
        return self.theta0.size


@dataclass
class Observation:
    """One step of data: regressor block phi (p x n) and output y (p,)."""

    phi: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        self.phi = np.atleast_2d(np.asarray(self.phi, dtype=float))
        self.y = np.atleast_1d(np.asarray(self.y, dtype=float)).ravel()


@dataclass
class EstimatorState:
    """Recursive estimator state: current estimate, P matrix, step count.

    Treat as immutable; rls_step returns a fresh state.
    """

    theta: np.ndarray
    P: np.ndarray
    step: int = 0


@dataclass
class RegressorAccumulator:
    """Running sums sum(phi.T @ phi) and sum(phi.T @ y) with a step count.

    Stores the normal-equation data instead of the raw regressor stack, so
    memory stays O(n^2) regardless of horizon.
    """

    gram: np.ndarray
    cross: np.ndarray
    count: int = 0

    @classmethod
    def zeros(cls, n: int):
        return cls(np.zeros((n, n)), np.zeros(n), 0)

    def add(self, obs: Observation) -> None:
        phi = obs.phi
        if phi.shape[0] == 1:
            f = phi[0]
            self.gram += np.outer(f, f)
            self.cross += f * obs.y[0]
        else:
            self.gram += phi.T @ phi
            self.cross += phi.T @ obs.y
        self.count += 1

    def copy(self):
        return RegressorAccumulator(self.gram.copy(), self.cross.copy(), self.count)

    @property
    def n(self) -> int:
        return self.cross.size


def bls_solve(acc: RegressorAccumulator, reg: Regularizer) -> np.ndarray:
    """Regularized batch solution (gram + R)^-1 (cross + R theta0).

    With no data this returns theta0 (up to factorization round-off).
    """
    if acc.n != reg.n:
        raise ValueError(f"dimension mismatch: data {acc.n}, prior {reg.n}")
    return spd_solve(acc.gram + reg.R, acc.cross + reg.R @ reg.theta0)


def bls_solve_unregularized(acc: RegressorAccumulator) -> np.ndarray:
    """Plain least squares from accumulated data; requires a full-rank gram.

    Raises RankDeficientError when the gram matrix is singular within
    tolerance.
    """
    evs = sym_eigenvalues(acc.gram)
    if evs[-1] <= SINGULARITY_RTOL * max(evs[0], 0.0) or evs[0] <= 0.0:
        raise RankDeficientError(
            f"gram matrix is rank deficient (eigenvalue range "
            f"[{evs[-1]:.3e}, {evs[0]:.3e}])"
        )
    return spd_solve(acc.gram, acc.cross)


def rls_init(reg: Regularizer) -> EstimatorState:
    """Initial recursive state: theta = theta0, P = R^-1, step 0."""
    return EstimatorState(reg.theta0.copy(), spd_inverse(reg.R), 0)


def rls_step(state: EstimatorState, obs: Observation) -> EstimatorState:
    """Absorb one observation into the recursive estimate.

    P_next = P - P phi.T (I + phi P phi.T)^-1 phi P, re-symmetrized;
    theta_next = theta + P_next phi.T (y - phi theta).  The inner p x p
    solve goes through Cholesky; a non-positive pivot there means P has
    lost positive definiteness numerically.
    """
    phi = obs.phi
    theta = state.theta
    P = state.P
    if phi.shape[1] != theta.size:
        raise ValueError(
            f"regressor has {phi.shape[1]} columns, expected {theta.size}"
        )
    if phi.shape[0] == 1:
        f = phi[0]
        b = P @ f
        s = 1.0 + f @ b
        if s <= 0.0:
            raise NotSPDError(
                f"innovation scale {s:.3e} <= 0 at step {state.step}; "
                "P lost positive definiteness"
            )
        P_next = symmetrize(P - np.outer(b, b) / s)
        theta_next = theta + (P_next @ f) * (obs.y[0] - f @ theta)
    else:
        B = P @ phi.T
        S = np.eye(phi.shape[0]) + phi @ B
        try:
            X = spd_solve(S, B.T)
        except NotSPDError as exc:
            raise NotSPDError(
                f"innovation matrix not SPD at step {state.step}: {exc}"
            ) from exc
        P_next = symmetrize(P - B @ X)
        theta_next = theta + P_next @ (phi.T @ (obs.y - phi @ theta))
    return EstimatorState(theta_next, P_next, state.step + 1)


def error_identity_check(
    state: EstimatorState, reg: Regularizer, theta_true: np.ndarray
) -> float:
    """Residual norm of the noise-free error identity.

    On data generated exactly as y = phi theta_true, the estimation error
    equals P_k R (theta0 - theta_true); returns the norm of the difference
    between the two sides.
    """
    theta_true = np.asarray(theta_true, dtype=float).ravel()
    lhs = state.theta - theta_true
    rhs = state.P @ (reg.R @ (reg.theta0 - theta_true))
    return float(np.linalg.norm(lhs - rhs))


def pinv_identity_check(
    before: EstimatorState, after: EstimatorState, obs: Observation
) -> float:
    """Relative residual of the information-update identity.

    Checks inv(P_after) = inv(P_before) + phi.T phi; the residual is in
    Frobenius norm, relative to ||inv(P_after)||_F floored at 1.
    """
    inv_b = spd_inverse(before.P)
    inv_a = spd_inverse(after.P)
    resid = inv_a - inv_b - obs.phi.T @ obs.phi
    denom = max(1.0, float(np.linalg.norm(inv_a)))
    return float(np.linalg.norm(resid)) / denom
