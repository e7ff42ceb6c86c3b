"""Small dense linear-algebra kernels.

Everything here works on plain ``numpy`` arrays. Inputs are validated
(shape, finiteness) and outputs are fresh arrays, so callers can share
matrices freely.
"""

import numpy as np

#: Entrywise asymmetry allowed before a matrix is rejected as non-symmetric.
SYMMETRY_TOL = 1e-12
#: Absolute accuracy of the extreme eigenvalues / singular values.
EIG_TOL = 1e-10
#: Smallest singular value accepted as "full column rank".
RANK_TOL = 1e-10
#: Normal-equation residual accepted for a least-squares solution.
LSQ_TOL = 1e-8


class LinAlgError(ValueError):
    """Raised on malformed or numerically unusable input."""


def as_matrix(A, name="A"):
    """Return ``A`` as a finite 2-D float array, raising on bad input."""
    M = np.array(A, dtype=float)
    if M.ndim != 2:
        raise LinAlgError(f"{name} must be 2-D, got shape {M.shape}")
    if M.size == 0:
        raise LinAlgError(f"{name} is empty")
    if not np.all(np.isfinite(M)):
        raise LinAlgError(f"{name} contains NaN or Inf")
    return M


def as_vector(x, name="x"):
    """Return ``x`` as a finite 1-D float array."""
    v = np.array(x, dtype=float)
    if v.ndim != 1:
        raise LinAlgError(f"{name} must be 1-D, got shape {v.shape}")
    if v.size == 0:
        raise LinAlgError(f"{name} is empty")
    if not np.all(np.isfinite(v)):
        raise LinAlgError(f"{name} contains NaN or Inf")
    return v


def matvec(A, x):
    """Matrix-vector product ``A @ x`` with dimension checking."""
    A = as_matrix(A)
    x = as_vector(x)
    if A.shape[1] != x.size:
        raise LinAlgError(
            f"dimension mismatch: A has {A.shape[1]} columns, x has length {x.size}")
    return A @ x


def spectral_extremes_symmetric(M):
    """Smallest and largest eigenvalue of a symmetric matrix.

    Parameters
    ----------
    M : array_like, shape (m, m)
        Symmetric to within :data:`SYMMETRY_TOL` entrywise.

    Returns
    -------
    (float, float)
        ``(min_eig, max_eig)``.
    """
    M = as_matrix(M, "M")
    if M.shape[0] != M.shape[1]:
        raise LinAlgError(f"matrix must be square, got shape {M.shape}")
    if np.max(np.abs(M - M.T)) > SYMMETRY_TOL:
        raise LinAlgError("matrix is not symmetric")
    ev = np.linalg.eigvalsh(0.5 * (M + M.T))
    return float(ev[0]), float(ev[-1])


def max_singular_value(M):
    """Largest singular value (spectral norm) of ``M``."""
    M = as_matrix(M, "M")
    return float(np.linalg.norm(M, 2))


def solve_least_squares(A, y):
    """Solve ``min_x ||A x - y||_2`` for a full-column-rank ``A``.

    Raises
    ------
    LinAlgError
        If ``A`` is rank deficient (smallest singular value below
        :data:`RANK_TOL`) or the dimensions disagree.
    """
    A = as_matrix(A)
    y = as_vector(y, "y")
    if A.shape[0] != y.size:
        raise LinAlgError(
            f"dimension mismatch: A has {A.shape[0]} rows, y has length {y.size}")
    if A.shape[1] > A.shape[0]:
        raise LinAlgError(
            f"rank deficient: {A.shape[1]} columns exceed {A.shape[0]} rows")
    sv = np.linalg.svd(A, compute_uv=False)
    if sv[-1] <= RANK_TOL:
        raise LinAlgError(
            f"rank deficient: smallest singular value {sv[-1]:.3e} <= {RANK_TOL:g}")
    Q, R = np.linalg.qr(A)
    return np.linalg.solve(R, Q.T @ y)
