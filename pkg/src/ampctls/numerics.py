"""Dense complex linear algebra with explicit failure modes.

Every downstream module funnels its factorizations through here so that the
numerical policy lives in one place:

* overdetermined least squares goes through a column-pivoted QR, never the
  normal equations;
* right pseudoinverse application (minimum-norm action of W^H (W W^H)^-1)
  goes through a QR of W^H;
* a reciprocal-condition estimate below ``RCOND_FLOOR`` is treated as rank
  deficiency and raised, not silently regularized.

All arrays are plain numpy ndarrays; inputs are validated for shape and
finiteness at the boundary.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg as sla

__all__ = [
    "RCOND_FLOOR",
    "SingularSystemError",
    "FullRowRankError",
    "NotPositiveDefiniteError",
    "as_vector",
    "as_matrix",
    "least_squares_solve",
    "right_pseudoinverse_apply",
    "kron",
    "whitening_factor",
]

# reciprocal condition estimates below this are rank deficiency
RCOND_FLOOR = 1e-12


class SingularSystemError(np.linalg.LinAlgError):
    """Coefficient matrix is numerically rank deficient."""


class FullRowRankError(np.linalg.LinAlgError):
    """W W^H is numerically singular; W does not have full row rank."""


class NotPositiveDefiniteError(np.linalg.LinAlgError):
    """Matrix expected Hermitian positive definite is not."""


def as_vector(x, name: str = "x") -> np.ndarray:
    """Validate and return a finite complex 1-D array."""
    x = np.asarray(x, dtype=complex)
    if x.ndim != 1:
        raise ValueError(f"{name} must be 1-D, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name} contains non-finite entries")
    return x


def as_matrix(a, name: str = "A") -> np.ndarray:
    """Validate and return a finite complex 2-D array."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
    return a


def least_squares_solve(a, b) -> np.ndarray:
    """Solve min_x ||A x - b||_2 for full-column-rank A.

    Parameters
    ----------
    a : (M, n) array_like, complex, M >= n
    b : (M,) array_like, complex

    Returns
    -------
    x : (n,) ndarray

    Raises
    ------
    SingularSystemError
        If the reciprocal condition estimate from the pivoted QR falls
        below ``RCOND_FLOOR``.
    """
    a = as_matrix(a, "A")
    b = as_vector(b, "b")
    m, n = a.shape
    if m < n:
        raise ValueError(f"need M >= n, got shape {a.shape}")
    if b.shape[0] != m:
        raise ValueError("A and b row counts differ")
    if n == 0:
        return np.zeros(0, dtype=complex)
    q, r, piv = sla.qr(a, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    if diag[0] == 0.0 or diag.min() / diag[0] < RCOND_FLOOR:
        raise SingularSystemError(
            f"rank-deficient system: rcond estimate "
            f"{0.0 if diag[0] == 0.0 else diag.min() / diag[0]:.3e} < {RCOND_FLOOR:g}"
        )
    z = sla.solve_triangular(r, q.conj().T @ b, lower=False)
    x = np.empty_like(z)
    x[piv] = z
    return x


def right_pseudoinverse_apply(w, z) -> np.ndarray:
    """Apply the right pseudoinverse: s = W^H (W W^H)^-1 z.

    W must be wide or square with full row rank. The result is the
    minimum-norm solution of W s = z. Computed from a pivoted QR of W^H
    (W W^H is never formed).

    Parameters
    ----------
    w : (M, L) array_like, complex, L >= M
    z : (M,) array_like, complex

    Returns
    -------
    s : (L,) ndarray

    Raises
    ------
    FullRowRankError
        If W is numerically row-rank deficient.
    """
    w = as_matrix(w, "W")
    z = as_vector(z, "z")
    m, ell = w.shape
    if ell < m:
        raise ValueError(f"need L >= M (wide or square), got shape {w.shape}")
    if z.shape[0] != m:
        raise ValueError("W and z row counts differ")
    # W^H P = Q R  =>  W = P R^H Q^H; feasibility W s = z becomes R^H (Q^H s) = P^T z
    q, r, piv = sla.qr(w.conj().T, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    if diag[0] == 0.0 or diag.min() / diag[0] < RCOND_FLOOR:
        raise FullRowRankError(
            f"W W^H numerically singular: rcond estimate "
            f"{0.0 if diag[0] == 0.0 else diag.min() / diag[0]:.3e} < {RCOND_FLOOR:g}"
        )
    t = sla.solve_triangular(r.conj().T, z[piv], lower=True)
    return q @ t


def kron(a, b) -> np.ndarray:
    """Kronecker product (thin wrapper over numpy.kron).

    Kept as a named operation so the block rearrangement identities used by
    the mismatch assembly have a single audited entry point:
    (v kron I_n) x == (I_k kron x) v for v of length k, x of length n.
    """
    return np.kron(np.asarray(a), np.asarray(b))


def whitening_factor(c) -> np.ndarray:
    """Factor D of a covariance C with D^H D = C^-1.

    Uses the Cholesky factorization C = L L^H and returns D = L^-1, so that
    ||D g||^2 = g^H C^-1 g. For C = sigma^2 I this gives D = I / sigma.

    Parameters
    ----------
    c : (n, n) array_like, Hermitian positive definite

    Returns
    -------
    d : (n, n) ndarray, lower triangular

    Raises
    ------
    NotPositiveDefiniteError
        If C is not Hermitian within 1e-10 relative or not positive definite.
    """
    c = as_matrix(c, "C")
    n, n2 = c.shape
    if n != n2:
        raise ValueError(f"C must be square, got shape {c.shape}")
    herm_gap = np.linalg.norm(c - c.conj().T)
    if herm_gap > 1e-10 * max(np.linalg.norm(c), 1e-300):
        raise NotPositiveDefiniteError(f"C is not Hermitian (gap {herm_gap:.3e})")
    try:
        lower = sla.cholesky(c, lower=True)
    except sla.LinAlgError as exc:
        raise NotPositiveDefiniteError("C is not positive definite") from exc
    return sla.solve_triangular(lower, np.eye(n, dtype=complex), lower=True)
