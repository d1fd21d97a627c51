"""Finite- and infinite-impulse-response models in regression form.

Both model families are flattened into a single parameter vector via
column-major vectorization of the horizontally stacked coefficient blocks,
with a matching Kronecker-structured regressor row, so y_k = phi_k @ theta
holds exactly at every simulated step.  Signals before time zero are zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SimulationDivergenceError
from .estimators import Observation
from .linalg import kron_with_identity, vec_stack

# Output norm beyond this aborts a simulation (unstable recursion).
DIVERGENCE_GUARD = 1e12


@dataclass
class FirModel:
    """Moving-average model y_k = sum_i G_i u_{k-i}, i = 1..w.

    G holds w coefficient matrices of shape (p, q).
    """

    w: int
    p: int
    q: int
    G: list

    def __post_init__(self):
        if self.w < 1:
            raise ValueError(f"window length must be >= 1, got {self.w}")
        self.G = [np.asarray(g, dtype=float) for g in self.G]
        if len(self.G) != self.w:
            raise ValueError(f"expected {self.w} coefficient blocks, got {len(self.G)}")
        for i, g in enumerate(self.G):
            if g.shape != (self.p, self.q):
                raise ValueError(
                    f"G[{i}] has shape {g.shape}, expected ({self.p}, {self.q})"
                )

    @property
    def n(self) -> int:
        return self.w * self.p * self.q

    @classmethod
    def scalar(cls, coeffs):
        """Single-input single-output model from a coefficient sequence."""
        coeffs = [np.array([[float(c)]]) for c in coeffs]
        return cls(w=len(coeffs), p=1, q=1, G=coeffs)


@dataclass
class IirModel:
    """Autoregressive moving-average model
    y_k = -sum_i F_i y_{k-i} + sum_i G_i u_{k-i}, i = 1..w.

    F holds w blocks of shape (p, p), G holds w blocks of shape (p, q).
    Note the minus sign on the output-feedback sum; a recursion written as
    y_k = a1 y_{k-1} + ... corresponds to F_1 = -a1, etc.
    """

    w: int
    p: int
    q: int
    F: list
    G: list

    def __post_init__(self):
        if self.w < 1:
            raise ValueError(f"window length must be >= 1, got {self.w}")
        self.F = [np.asarray(f, dtype=float) for f in self.F]
        self.G = [np.asarray(g, dtype=float) for g in self.G]
        if len(self.F) != self.w or len(self.G) != self.w:
            raise ValueError(
                f"expected {self.w} blocks in F and G, got "
                f"{len(self.F)} and {len(self.G)}"
            )
        for i, f in enumerate(self.F):
            if f.shape != (self.p, self.p):
                raise ValueError(
                    f"F[{i}] has shape {f.shape}, expected ({self.p}, {self.p})"
                )
        for i, g in enumerate(self.G):
            if g.shape != (self.p, self.q):
                raise ValueError(
                    f"G[{i}] has shape {g.shape}, expected ({self.p}, {self.q})"
                )

    @property
    def n(self) -> int:
        return self.w * self.p * (self.p + self.q)

    @classmethod
    def scalar(cls, f_coeffs, g_coeffs):
        f = [np.array([[float(c)]]) for c in f_coeffs]
        g = [np.array([[float(c)]]) for c in g_coeffs]
        if len(f) != len(g):
            raise ValueError("F and G must have the same window length")
        return cls(w=len(f), p=1, q=1, F=f, G=g)


class SignalBuffer:
    """Shift registers of the last w inputs and outputs, newest first.

    Starts zero-filled, which encodes the convention that signals before
    time zero vanish.
    """

    def __init__(self, w: int, input_dim: int, output_dim: int):
        if w < 1:
            raise ValueError(f"window length must be >= 1, got {w}")
        self.w = w
        self.inputs = np.zeros((w, input_dim))
        self.outputs = np.zeros((w, output_dim))

    def push(self, u: np.ndarray, y: np.ndarray | None = None) -> None:
        """Advance one step: u_k becomes the newest input, optionally y_k
        the newest output."""
        self.inputs[1:] = self.inputs[:-1]
        self.inputs[0] = u
        if y is not None:
            self.outputs[1:] = self.outputs[:-1]
            self.outputs[0] = y

    def input_window(self) -> np.ndarray:
        """[u_{k-1}, ..., u_{k-w}] flattened newest first."""
        return self.inputs.ravel()

    def output_window(self) -> np.ndarray:
        """[y_{k-1}, ..., y_{k-w}] flattened newest first."""
        return self.outputs.ravel()


def fir_true_theta(model: FirModel) -> np.ndarray:
    """Parameter vector vec[G_1 ... G_w], column-major."""
    return vec_stack(model.G)


def fir_regressor(buffer: SignalBuffer, p: int) -> np.ndarray:
    """Regressor block [u_{k-1}.T ... u_{k-w}.T] (x) I_p, shape (p, w*p*q)."""
    return kron_with_identity(buffer.input_window(), p)


def iir_true_theta(model: IirModel) -> np.ndarray:
    """Parameter vector vec[F_1 ... F_w G_1 ... G_w], column-major."""
    return vec_stack(list(model.F) + list(model.G))


def iir_regressor(buffer: SignalBuffer, p: int) -> np.ndarray:
    """Regressor block [-y_{k-1}.T ... -y_{k-w}.T u_{k-1}.T ... u_{k-w}.T]
    (x) I_p."""
    row = np.concatenate([-buffer.output_window(), buffer.input_window()])
    return kron_with_identity(row, p)


def _as_input_matrix(inputs, q: int) -> np.ndarray:
    arr = np.asarray(inputs, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None] if q == 1 else arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != q:
        raise ValueError(f"inputs have shape {arr.shape}, expected (steps, {q})")
    return arr


def fir_simulate(model: FirModel, inputs: np.ndarray) -> list[Observation]:
    """Drive the model with an input sequence; emits (phi_k, y_k) pairs.

    inputs has shape (steps, q) (a 1-D array is accepted when q == 1).
    Outputs are computed through the regression form, so y_k = phi_k theta
    holds bitwise.
    """
    theta = fir_true_theta(model)
    u_seq = _as_input_matrix(inputs, model.q)
    buf = SignalBuffer(model.w, model.q, model.p)
    out = []
    for k in range(u_seq.shape[0]):
        phi = fir_regressor(buf, model.p)
        y = phi @ theta
        out.append(Observation(phi, y))
        buf.push(u_seq[k])
    return out


def iir_simulate(model: IirModel, inputs: np.ndarray) -> list[Observation]:
    """Drive the recursion with an input sequence; emits (phi_k, y_k) pairs.

    Aborts with SimulationDivergenceError when ||y_k|| exceeds the
    divergence guard.
    """
    theta = iir_true_theta(model)
    u_seq = _as_input_matrix(inputs, model.q)
    buf = SignalBuffer(model.w, model.q, model.p)
    out = []
    for k in range(u_seq.shape[0]):
        phi = iir_regressor(buf, model.p)
        y = phi @ theta
        if np.linalg.norm(y) > DIVERGENCE_GUARD:
            raise SimulationDivergenceError(
                f"output norm {np.linalg.norm(y):.3e} exceeded "
                f"{DIVERGENCE_GUARD:.1e} at step {k}",
                step=k,
            )
        out.append(Observation(phi, y))
        buf.push(u_seq[k], y)
    return out
