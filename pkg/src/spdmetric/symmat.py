"""Symmetric-matrix primitives and spectral matrix functions.

Matrices are plain ``numpy.ndarray`` objects of shape ``(d, d)``. A
*symmetric* matrix satisfies ``|A[i, j] - A[j, i]| <= 1e-12 * max(1,
max|A|)``; an *SPD* matrix is symmetric with strictly positive eigenvalues
(use :func:`assert_spd` to validate data at the boundary). All spectral
functions (log, exp, square root, inverse square root) share one kernel,
:func:`spectral_map`, built on the symmetric eigendecomposition, and every
reconstruction is re-symmetrized with :func:`sym` so outputs are bitwise
symmetric.
"""

from typing import NamedTuple

import numpy as np

#: Relative eigenvalue tolerance below which a matrix is rejected as not SPD.
SPD_TOL = 1e-12

#: Relative tolerance of the symmetry invariant.
SYM_TOL = 1e-12


class NotPositiveDefinite(ValueError):
    """Raised when a matrix fails SPD validation.

    Attributes
    ----------
    lambda_min : float
        Smallest eigenvalue of the offending matrix.
    """

    def __init__(self, message, lambda_min):
        super().__init__(message)
        self.lambda_min = lambda_min


class SpectralDecomposition(NamedTuple):
    """Eigendecomposition of a symmetric matrix.

    ``eigenvalues`` are ascending; ``eigenvectors`` holds the corresponding
    orthonormal eigenvectors as columns, so that
    ``eigenvectors @ diag(eigenvalues) @ eigenvectors.T`` reconstructs the
    input.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def sym(m):
    """Symmetric part ``(M + M.T) / 2`` of a square matrix."""
    m = np.asarray(m, dtype=float)
    if m.ndim < 2 or m.shape[-1] != m.shape[-2]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return (m + np.swapaxes(m, -1, -2)) / 2.0


def frob_inner(a, b):
    """Frobenius inner product ``tr(A.T B)`` of two same-shape matrices."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.sum(a * b))


def frob_norm(a):
    """Frobenius norm of a matrix."""
    return float(np.linalg.norm(np.asarray(a, dtype=float)))


def check_symmetric(m, tol=SYM_TOL):
    """Validate the symmetry invariant, returning the matrix unchanged.

    Raises
    ------
    ValueError
        If any entry differs from its transpose by more than
        ``tol * max(1, max|entry|)``, or if the matrix is not square.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    scale = max(1.0, float(np.max(np.abs(m))) if m.size else 1.0)
    skew = float(np.max(np.abs(m - m.T)))
    if skew > tol * scale:
        raise ValueError(
            f"matrix is not symmetric: max |A - A.T| = {skew:.3e} "
            f"exceeds {tol:.0e} * {scale:.3e}"
        )
    return m


def eigh(x):
    """Eigendecomposition of a symmetric matrix.

    Uses a symmetric-specific LAPACK driver (never a general nonsymmetric
    solver), so eigenvalues come back ascending with orthonormal
    eigenvectors.

    Parameters
    ----------
    x : ndarray, shape (d, d)
        Symmetric matrix.

    Returns
    -------
    SpectralDecomposition

    Raises
    ------
    numpy.linalg.LinAlgError
        If the iterative eigen-solver fails to converge within its internal
        iteration budget (numerically pathological input).
    """
    x = check_symmetric(x)
    lam, vec = np.linalg.eigh(x)
    return SpectralDecomposition(lam, vec)


def spectral_map(x, fn):
    """Apply a scalar function to a symmetric matrix through its spectrum.

    Returns ``V diag(fn(lam)) V.T`` for ``x = V diag(lam) V.T``, re-symmetrized
    so the output is bitwise symmetric.

    Parameters
    ----------
    x : ndarray, shape (d, d)
        Symmetric matrix.
    fn : callable
        Scalar function, vectorized over an eigenvalue array. Must be defined
        (finite) on every eigenvalue of ``x``.

    Raises
    ------
    ValueError
        If ``fn`` produces a non-finite value on some eigenvalue (e.g. the
        logarithm of a non-positive eigenvalue, or exponential overflow).
    """
    lam, vec = eigh(x)
    with np.errstate(all="ignore"):
        mapped = np.asarray(fn(lam), dtype=float)
    if not np.all(np.isfinite(mapped)):
        bad = lam[~np.isfinite(mapped)]
        raise ValueError(
            f"spectral function undefined or overflowing at eigenvalue(s) {bad}"
        )
    return sym((vec * mapped) @ vec.T)


def logm(x):
    """Matrix logarithm of an SPD matrix."""
    return spectral_map(x, np.log)


def expm(s):
    """Matrix exponential of a symmetric matrix; the result is SPD.

    Overflow for extreme eigenvalues is reported as ``ValueError``, never
    silently saturated.
    """
    return spectral_map(s, np.exp)


def sqrtm(x):
    """Principal square root of an SPD matrix."""
    return spectral_map(x, np.sqrt)


def invsqrtm(x):
    """Inverse of the principal square root of an SPD matrix."""
    return spectral_map(x, lambda lam: 1.0 / np.sqrt(lam))


def _logm_stack(stack):
    """Matrix logarithm of a stack of symmetric PD matrices (no input checks).

    Internal fast path sharing one batched eigendecomposition; used where the
    stack is symmetric by construction.
    """
    lam, vec = np.linalg.eigh(stack)
    if np.min(lam) <= 0:
        raise ValueError(
            f"matrix in stack is not positive definite "
            f"(lambda_min = {np.min(lam):.6e})"
        )
    return sym((vec * np.log(lam)[..., None, :]) @ np.swapaxes(vec, -1, -2))


def assert_spd(x, tol=SPD_TOL):
    """Validate that ``x`` is SPD and return it unchanged.

    Succeeds iff ``lambda_min(x) > tol * max(1, lambda_max(x))``. There is no
    automatic eigenvalue clipping: data problems surface as errors.

    Raises
    ------
    NotPositiveDefinite
        Carrying the offending smallest eigenvalue.
    ValueError
        If ``x`` violates the symmetry invariant.
    """
    x = check_symmetric(x)
    lam = np.linalg.eigvalsh(x)
    lam_min = float(lam[0])
    lam_max = float(lam[-1])
    if not lam_min > tol * max(1.0, lam_max):
        raise NotPositiveDefinite(
            f"matrix is not positive definite: lambda_min = {lam_min:.6e} "
            f"(threshold {tol:.0e} * max(1, {lam_max:.6e}))",
            lam_min,
        )
    return x
