"""Dense complex linear algebra and Gaussian matrix sampling.

Matrices are plain ``numpy`` arrays (``complex128`` for channels and
codewords). Functions accept a single matrix or, where noted, a stack of
matrices along the leading axes.
"""

import numpy as np


class RankDeficientError(ValueError):
    """Raised when a full-column-rank matrix was required."""


def as_matrix(A, dtype=complex) -> np.ndarray:
    """Validate and return ``A`` as a finite 2-D array."""
    A = np.asarray(A, dtype=dtype)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise ValueError(f"expected a nonempty 2-D matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def sample_gaussian_matrix(rows: int, cols: int, rng: np.random.Generator, size=None) -> np.ndarray:
    """I.i.d. circular complex Gaussian entries with unit total variance.

    Real and imaginary parts are independent normals of variance 1/2. With
    ``size`` given, returns a stack of shape ``(size, rows, cols)``.
    """
    if rows < 1 or cols < 1:
        raise ValueError("rows and cols must be positive")
    shape = (rows, cols) if size is None else (size, rows, cols)
    g = rng.standard_normal(shape + (2,))
    return (g[..., 0] + 1j * g[..., 1]) * np.sqrt(0.5)


def singular_values(A, tol: float = 1e-24, max_sweeps: int = 60) -> np.ndarray:
    """Singular values of ``A`` in ascending order (one-sided Jacobi).

    Columns are rotated pairwise until they are mutually orthogonal; the
    singular values are then the column norms. Stops when the squared
    off-diagonal mass of the Gram matrix falls below ``tol`` times its
    squared Frobenius norm.
    """
    A = as_matrix(A)
    if A.shape[1] > A.shape[0]:
        A = A.conj().T
    W = A.copy()
    n = W.shape[1]
    for _ in range(max_sweeps):
        norms = np.einsum("ij,ij->j", W.conj(), W).real
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha = norms[p]
                beta = norms[q]
                gamma = np.vdot(W[:, p], W[:, q])
                g = abs(gamma)
                if g == 0.0 or alpha == 0.0 or beta == 0.0:
                    continue
                off += g * g
                if g <= 1e-300:
                    continue
                # rotate the phase away, then apply a real Jacobi rotation
                phase = gamma / g
                zeta = (beta - alpha) / (2.0 * g)
                t = np.copysign(1.0, zeta) / (abs(zeta) + np.sqrt(1.0 + zeta * zeta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                wp = W[:, p].copy()
                wq = W[:, q] * np.conj(phase)
                W[:, p] = c * wp - s * wq
                W[:, q] = (s * wp + c * wq) * phase
                norms[p] = np.vdot(W[:, p], W[:, p]).real
                norms[q] = np.vdot(W[:, q], W[:, q]).real
        total = float(np.sum(norms))
        if off <= tol * total * total:
            break
    sv = np.sqrt(np.einsum("ij,ij->j", W.conj(), W).real)
    return np.sort(sv)


def batch_singular_values(A: np.ndarray) -> np.ndarray:
    """Ascending singular values for a stack ``(..., rows, cols)`` via LAPACK."""
    return np.linalg.svd(A, compute_uv=False)[..., ::-1]


def qr_decompose(A, rtol: float = 1e-12):
    """Thin QR with a real, positive diagonal in ``R``.

    Raises :class:`RankDeficientError` when a diagonal entry of ``R`` is
    below ``rtol`` times the largest one.
    """
    A = np.asarray(A)
    if A.ndim != 2 or A.size == 0:
        raise ValueError(f"expected a nonempty 2-D matrix, got shape {A.shape}")
    if A.shape[1] > A.shape[0]:
        raise RankDeficientError(f"{A.shape[1]} columns cannot be independent in dimension {A.shape[0]}")
    Q, R = np.linalg.qr(A, mode="reduced")
    d = np.diag(R)
    mag = np.abs(d)
    if mag.max() == 0.0 or mag.min() <= rtol * mag.max():
        raise RankDeficientError("matrix does not have full column rank")
    phase = d / mag
    Q = Q * phase[np.newaxis, :]
    R = np.conj(phase)[:, np.newaxis] * R
    R[np.diag_indices_from(R)] = mag
    return Q, R


def block_diagonal_lift(H: np.ndarray, T: int) -> np.ndarray:
    """Repeat ``H`` ``T`` times along the diagonal.

    Works on a single ``(N, M)`` matrix or a stack ``(..., N, M)``; the
    result has shape ``(..., N*T, M*T)``.
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    H = np.asarray(H)
    if T == 1:
        return H.copy()
    N, M = H.shape[-2:]
    out = np.zeros(H.shape[:-2] + (N * T, M * T), dtype=H.dtype)
    for t in range(T):
        out[..., t * N:(t + 1) * N, t * M:(t + 1) * M] = H
    return out
