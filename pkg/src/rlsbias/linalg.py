"""Dense symmetric linear-algebra kernel.

Everything downstream works with small symmetric matrices (parameter
dimensions of a few tens at most), so the kernel favours simple, guaranteed
methods: cyclic Jacobi rotations for eigenvalues and an unpivoted Cholesky
factorization for SPD solves.  Eigenvalue spectra are returned as plain
1-D arrays sorted in descending order.
"""

from __future__ import annotations

import numpy as np

from .errors import (
    EigenConvergenceError,
    NotPSDError,
    NotSPDError,
    NotSymmetricError,
)

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap


# Eigenvalues at or below this fraction of the largest one count as zero
# when deciding singularity / positive definiteness.
SINGULARITY_RTOL = 1e-14

# Jacobi sweep cap scales with matrix size; convergence is quadratic so the
# cap is never approached in practice.
SWEEP_CAP_FACTOR = 100


def symmetrize(a: np.ndarray) -> np.ndarray:
    """Return the symmetric part (a + a.T) / 2 as a new float array."""
    a = np.asarray(a, dtype=float)
    return (a + a.T) / 2.0


def _check_square_symmetric(a: np.ndarray, rtol: float = 1e-10) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotSymmetricError(f"expected a square matrix, got shape {a.shape}")
    scale = np.max(np.abs(a)) if a.size else 0.0
    if scale > 0.0 and np.max(np.abs(a - a.T)) > rtol * scale:
        raise NotSymmetricError("matrix is not symmetric within tolerance")
    return symmetrize(a)


@njit(cache=True)
def _jacobi_sweeps(a, max_sweeps):
    """Cyclic Jacobi rotations on a symmetric matrix, in place.

    Returns (off_norm, sweeps_used).  off_norm is the Frobenius norm of the
    off-diagonal part when iteration stopped; the diagonal then holds the
    eigenvalues.
    """
    n = a.shape[0]
    sweeps = 0
    off = 0.0
    for _ in range(max_sweeps + 1):
        off = 0.0
        for i in range(n - 1):
            for j in range(i + 1, n):
                off += a[i, j] * a[i, j]
        off = np.sqrt(2.0 * off)
        fro = 0.0
        for i in range(n):
            for j in range(n):
                fro += a[i, j] * a[i, j]
        fro = np.sqrt(fro)
        if off <= 1e-14 * fro:
            return off, sweeps
        if sweeps == max_sweeps:
            return off, sweeps
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                # Stable rotation (smaller root of t^2 + 2*tau*t - 1 = 0).
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                a[p, p] = a[p, p] - t * apq
                a[q, q] = a[q, q] + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                for i in range(n):
                    if i != p and i != q:
                        aip = a[i, p]
                        aiq = a[i, q]
                        a[i, p] = c * aip - s * aiq
                        a[p, i] = a[i, p]
                        a[i, q] = s * aip + c * aiq
                        a[q, i] = a[i, q]
    return off, sweeps


def _jacobi_diagonal(work: np.ndarray, max_sweeps: int | None) -> np.ndarray:
    """Run Jacobi sweeps in place and return the (unsorted) eigenvalue
    diagonal, raising on non-convergence."""
    n = work.shape[0]
    if max_sweeps is None:
        max_sweeps = SWEEP_CAP_FACTOR * n * n
    off, _ = _jacobi_sweeps(work, max_sweeps)
    fro = np.linalg.norm(work)
    if off > 1e-14 * fro and off > 0.0:
        raise EigenConvergenceError(
            f"Jacobi iteration stopped after {max_sweeps} sweeps with "
            f"off-diagonal residual {off:.3e}",
            residual=float(off),
        )
    return np.diag(work)


@njit(cache=True)
def _jacobi_eig_batch(mats, shift, max_sweeps):
    """Extreme eigenvalues of a stack of symmetric matrices plus shift*I.

    Returns (lmax, lmin, off, fro) per matrix; off/fro feed the same
    convergence test that _jacobi_diagonal applies.
    """
    count = mats.shape[0]
    n = mats.shape[1]
    lmax = np.empty(count)
    lmin = np.empty(count)
    off = np.empty(count)
    fro = np.empty(count)
    work = np.empty((n, n))
    for s in range(count):
        for i in range(n):
            for j in range(n):
                work[i, j] = mats[s, i, j]
            work[i, i] += shift
        o, _ = _jacobi_sweeps(work, max_sweeps)
        f = 0.0
        for i in range(n):
            for j in range(n):
                f += work[i, j] * work[i, j]
        fro[s] = np.sqrt(f)
        mx = work[0, 0]
        mn = work[0, 0]
        for i in range(1, n):
            if work[i, i] > mx:
                mx = work[i, i]
            if work[i, i] < mn:
                mn = work[i, i]
        lmax[s] = mx
        lmin[s] = mn
        off[s] = o
    return lmax, lmin, off, fro


def sym_eigenvalues(a: np.ndarray, max_sweeps: int | None = None) -> np.ndarray:
    """Eigenvalues of a symmetric matrix, sorted descending.

    Args:
        a: square symmetric matrix.
        max_sweeps: override for the Jacobi sweep cap (default
            ``SWEEP_CAP_FACTOR * n**2``).

    Raises:
        NotSymmetricError: if ``a`` is not square/symmetric.
        EigenConvergenceError: if the off-diagonal residual has not fallen
            below tolerance within the sweep cap.
    """
    a = _check_square_symmetric(a)
    n = a.shape[0]
    if n == 0:
        return np.empty(0)
    if n == 1:
        return a.ravel().copy()
    return np.sort(_jacobi_diagonal(a.copy(), max_sweeps))[::-1].copy()


def condition_number(a: np.ndarray, *, assume_symmetric: bool = False) -> float:
    """Spectral condition number lambda_max / lambda_min of a symmetric PSD
    matrix.

    Returns ``inf`` when the matrix is singular within tolerance
    (lambda_min <= SINGULARITY_RTOL * lambda_max, which covers the zero
    matrix).  ``assume_symmetric`` skips the symmetry validation; callers
    that build the matrix symmetric by construction use it on hot paths.

    Raises:
        NotPSDError: if an eigenvalue is below ``-SINGULARITY_RTOL *
            lambda_max``, i.e. the matrix is not PSD.
    """
    if assume_symmetric:
        a = np.asarray(a, dtype=float)
        if a.shape[0] == 1:
            evs = a.ravel()
        else:
            d = _jacobi_diagonal(a.copy(), None)
            evs = np.array([d.max(), d.min()])
    else:
        evs = sym_eigenvalues(a)
    if evs.size == 0:
        raise NotPSDError("empty matrix has no condition number")
    return _condition_from_extremes(float(evs[0]), float(evs[-1]))


def _condition_from_extremes(lmax: float, lmin: float) -> float:
    if lmin < -SINGULARITY_RTOL * max(abs(lmax), 1e-300):
        raise NotPSDError(
            f"matrix is not PSD: smallest eigenvalue {lmin:.3e} "
            f"(largest {lmax:.3e})"
        )
    if lmin <= SINGULARITY_RTOL * lmax or lmax <= 0.0:
        return float("inf")
    return float(lmax / lmin)


def condition_numbers(mats: np.ndarray, shift: float = 0.0) -> np.ndarray:
    """Condition numbers of a stack of symmetric matrices plus shift * I.

    ``mats`` has shape (count, n, n); each slice must already be symmetric
    (no per-slice validation, this is a hot path).  Sentinel and PSD
    semantics match :func:`condition_number`.

    Raises:
        EigenConvergenceError: if any slice fails to diagonalize.
        NotPSDError: if any shifted slice has a clearly negative eigenvalue.
    """
    mats = np.asarray(mats, dtype=float)
    if mats.ndim != 3 or mats.shape[1] != mats.shape[2]:
        raise NotSymmetricError(
            f"expected a (count, n, n) stack, got shape {mats.shape}"
        )
    if mats.shape[0] == 0:
        return np.empty(0)
    n = mats.shape[1]
    lmax, lmin, off, fro = _jacobi_eig_batch(
        mats, float(shift), SWEEP_CAP_FACTOR * n * n
    )
    bad = off > 1e-14 * fro
    if np.any(bad & (off > 0.0)):
        worst = int(np.argmax(off / np.maximum(fro, 1e-300)))
        raise EigenConvergenceError(
            f"Jacobi iteration failed on slice {worst} with off-diagonal "
            f"residual {off[worst]:.3e}",
            residual=float(off[worst]),
        )
    out = np.empty(mats.shape[0])
    for i in range(out.size):
        out[i] = _condition_from_extremes(float(lmax[i]), float(lmin[i]))
    return out


def spd_cholesky(a: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor of an SPD matrix.

    Raises NotSPDError when a pivot is non-positive, carrying the pivot
    index and value.
    """
    a = _check_square_symmetric(a)
    n = a.shape[0]
    L = np.zeros_like(a)
    for j in range(n):
        d = a[j, j] - L[j, :j] @ L[j, :j]
        if d <= 0.0:
            raise NotSPDError(
                f"non-positive pivot {d:.3e} at index {j}; matrix is not SPD"
            )
        L[j, j] = np.sqrt(d)
        if j + 1 < n:
            L[j + 1 :, j] = (a[j + 1 :, j] - L[j + 1 :, :j] @ L[j, :j]) / L[j, j]
    return L


def spd_solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve a @ x = b for SPD ``a`` via Cholesky; ``b`` may be a vector or
    matrix of right-hand sides."""
    L = spd_cholesky(a)
    b = np.asarray(b, dtype=float)
    squeeze = b.ndim == 1
    y = np.empty_like(b if not squeeze else b[:, None])
    rhs = b[:, None] if squeeze else b
    n = L.shape[0]
    if rhs.shape[0] != n:
        raise ValueError(f"rhs has {rhs.shape[0]} rows, expected {n}")
    # Forward then back substitution, vectorized over columns.
    for i in range(n):
        y[i] = (rhs[i] - L[i, :i] @ y[:i]) / L[i, i]
    x = np.empty_like(y)
    for i in range(n - 1, -1, -1):
        x[i] = (y[i] - L[i + 1 :, i] @ x[i + 1 :]) / L[i, i]
    return x[:, 0] if squeeze else x


def spd_inverse(a: np.ndarray) -> np.ndarray:
    """Inverse of an SPD matrix, symmetrized before return."""
    a = np.asarray(a, dtype=float)
    x = spd_solve(a, np.eye(a.shape[0]))
    return symmetrize(x)


def kron_with_identity(row: np.ndarray, p: int) -> np.ndarray:
    """Kronecker product row (x) I_p, i.e. the p x (m*p) block row
    [row_1 * I_p, ..., row_m * I_p]."""
    row = np.asarray(row, dtype=float).ravel()
    if p < 1:
        raise ValueError(f"block size must be positive, got {p}")
    if p == 1:
        return row[None, :].copy()
    return np.kron(row[None, :], np.eye(p))


def vec_stack(blocks) -> np.ndarray:
    """Column-major vectorization of a horizontal block stack.

    Concatenates equally-shaped blocks [B_1 ... B_m] left to right and
    returns vec of the result in column-major (Fortran) order.
    """
    blocks = [np.asarray(b, dtype=float) for b in blocks]
    if not blocks:
        raise ValueError("need at least one block")
    shape = blocks[0].shape
    if any(b.shape != shape for b in blocks):
        raise ValueError(
            f"block shapes differ: {[b.shape for b in blocks]}"
        )
    return np.hstack(blocks).ravel(order="F")
