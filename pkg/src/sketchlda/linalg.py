"""Small dense linear algebra used throughout the package.

Everything here works on plain ``numpy`` arrays.  The dimensions we care about
are tiny on the column side (a handful of features), so the symmetric
eigensolver is a straightforward cyclic Jacobi iteration instead of a LAPACK
call; least squares and the condition number go through the SVD.
"""

from typing import NamedTuple

import numpy as np

from .errors import NumericalError, ValidationError

EPS = np.finfo(float).eps


class SymEig(NamedTuple):
    """Eigenpairs of a symmetric matrix, eigenvalues in descending order."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns


def as_matrix(X, name="X"):
    """Return ``X`` as a finite 2-D float array or raise ValidationError."""
    A = np.asarray(X, dtype=float)
    if A.ndim == 1:
        A = A[:, None]
    if A.ndim != 2:
        raise ValidationError(f"{name} must be 2-D, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValidationError(f"{name} contains NaN or infinite entries")
    return A


def as_vector(v, name="v"):
    a = np.asarray(v, dtype=float)
    if a.ndim != 1:
        a = a.reshape(-1)
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"{name} contains NaN or infinite entries")
    return a


def sym_eig(S, max_sweeps=100):
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns a :class:`SymEig` with eigenvalues sorted in descending order and
    orthonormal eigenvectors stored as columns.
    """
    A = as_matrix(S, "S")
    p, q = A.shape
    if p != q or p < 1:
        raise ValidationError(f"S must be square and non-empty, got {A.shape}")
    scale = np.abs(A).max()
    if np.abs(A - A.T).max() > 1e-10 * max(scale, 1.0):
        raise ValidationError("S is not symmetric")
    A = 0.5 * (A + A.T)
    V = np.eye(p)
    fro = np.linalg.norm(A)
    if fro == 0.0:
        return SymEig(np.zeros(p), V)

    offdiag = ~np.eye(p, dtype=bool)
    for _ in range(max_sweeps):
        off = np.linalg.norm(A[offdiag])
        if off <= p * EPS * fro:
            break
        for i in range(p - 1):
            for j in range(i + 1, p):
                aij = A[i, j]
                if abs(aij) <= EPS * EPS * fro:
                    continue
                theta = (A[j, j] - A[i, i]) / (2.0 * aij)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.hypot(theta, 1.0))
                c = 1.0 / np.hypot(t, 1.0)
                s = t * c
                ai, aj = A[:, i].copy(), A[:, j].copy()
                A[:, i] = c * ai - s * aj
                A[:, j] = s * ai + c * aj
                ai, aj = A[i, :].copy(), A[j, :].copy()
                A[i, :] = c * ai - s * aj
                A[j, :] = s * ai + c * aj
                vi, vj = V[:, i].copy(), V[:, j].copy()
                V[:, i] = c * vi - s * vj
                V[:, j] = s * vi + c * vj
    else:
        raise NumericalError(f"Jacobi eigensolver did not converge in {max_sweeps} sweeps")

    w = np.diag(A).copy()
    order = np.argsort(-w, kind="stable")
    return SymEig(w[order], V[:, order])


def _rank_tol(s, shape):
    return max(shape) * EPS * (s[0] if s.size else 0.0)


def numerical_rank(X):
    A = as_matrix(X)
    s = np.linalg.svd(A, compute_uv=False)
    return int(np.sum(s > _rank_tol(s, A.shape))) if s.size and s[0] > 0 else 0


def thin_svd_left(X):
    """Orthonormal basis ``U`` (n x rank) for the column space of ``X``."""
    A = as_matrix(X)
    n, p = A.shape
    if not n >= p >= 1:
        raise ValidationError(f"need n >= p >= 1, got {A.shape}")
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    if s[0] == 0.0:
        return U[:, :0]
    r = int(np.sum(s > _rank_tol(s, A.shape)))
    return U[:, :r]


def solve_least_squares(X, y):
    """Minimum-norm solution of ``min ||X b - y||``.

    Singular values at or below ``max(n, p) * eps * s_max`` are treated as
    zero, which gives the minimum-norm minimizer for rank-deficient ``X``.
    """
    A = as_matrix(X)
    b = as_vector(y, "y")
    if A.size == 0:
        raise ValidationError("empty design matrix")
    if b.shape[0] != A.shape[0]:
        raise ValidationError(f"y has length {b.shape[0]}, X has {A.shape[0]} rows")
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    keep = s > _rank_tol(s, A.shape) if s[0] > 0 else np.zeros_like(s, dtype=bool)
    coef = np.zeros_like(s)
    coef[keep] = (U[:, keep].T @ b) / s[keep]
    return Vt.T @ coef


def scaled_condition_number(X):
    """``||X||_F^2 * ||(X^T X)^+||_2``; equals ``p`` for orthonormal columns."""
    A = as_matrix(X)
    s = np.linalg.svd(A, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        raise ValidationError("scaled condition number of a zero matrix is undefined")
    s_min = s[s > _rank_tol(s, A.shape)][-1]
    return float(np.sum(s * s) / (s_min * s_min))


def pinv_gram_norm(X):
    """``||(X^T X)^+||_2``, i.e. one over the smallest nonzero squared singular value."""
    A = as_matrix(X)
    s = np.linalg.svd(A, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        raise ValidationError("zero matrix")
    s_min = s[s > _rank_tol(s, A.shape)][-1]
    return float(1.0 / (s_min * s_min))


def _start_vector(m):
    # all-ones plus a golden-ratio ramp so the start is not an exact
    # eigenvector of structured (e.g. circulant) Gram matrices
    v = 1.0 + 0.5 * np.modf(np.arange(1, m + 1) * 0.6180339887498949)[0]
    return v / np.linalg.norm(v)


def spectral_norm_sq(X, tol=1e-10, max_iter=10_000):
    """Largest squared singular value of ``X`` by power iteration on the Gram matrix."""
    A = as_matrix(X)
    if not np.any(A):
        raise ValidationError("spectral norm of a zero matrix requested")
    G = A.T @ A if A.shape[1] <= A.shape[0] else A @ A.T
    v = _start_vector(G.shape[0])
    w = G @ v
    if np.linalg.norm(w) <= EPS * np.trace(G):
        v = G[:, np.argmax(np.linalg.norm(G, axis=0))]
        v = v / np.linalg.norm(v)
        w = G @ v
    lam = float(v @ w)
    for _ in range(max_iter):
        v = w / np.linalg.norm(w)
        w = G @ v
        new = float(v @ w)
        if abs(new - lam) <= tol * abs(new):
            return new
        lam = new
    return lam
