"""Distances, tangent-space maps and the Riemannian mean on the SPD cone.

Four distances live here: the flat Euclidean (Frobenius) distance, the
LogEuclidean distance, its congruence-parameterized variant with reference
point ``G``, and the affine-invariant Riemannian (geodesic) distance. The
exponential/logarithmic maps move between the cone and the tangent space at
a point, whose inner product ``tr(G^-1 S_A G^-1 S_B)`` is the affine-invariant
metric.
"""

import numpy as np

from .symmat import _logm_stack, expm, frob_norm, invsqrtm, logm, sym


class MaxIterExceeded(RuntimeError):
    """Raised when the Riemannian mean iteration fails to converge.

    Attributes
    ----------
    residual : float
        Norm of the final Karcher gradient.
    """

    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


def _check_same_dim(*mats):
    shapes = {np.asarray(m).shape for m in mats}
    if len(shapes) != 1:
        raise ValueError(f"dimension mismatch: {sorted(shapes)}")


def _sqrt_pair(g):
    """Square root and inverse square root of an SPD matrix from one eigh."""
    lam, vec = np.linalg.eigh(sym(g))
    if lam[0] <= 0:
        raise ValueError(f"matrix is not SPD: lambda_min = {lam[0]:.6e}")
    root = np.sqrt(lam)
    return sym((vec * root) @ vec.T), sym((vec / root) @ vec.T)


def dist_euclid(a, b):
    """Euclidean (Frobenius) distance ``||A - B||_F``."""
    _check_same_dim(a, b)
    return frob_norm(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))


def dist_logeuclid(a, b):
    """LogEuclidean distance ``||log(A) - log(B)||_F`` between SPD matrices."""
    _check_same_dim(a, b)
    return frob_norm(logm(a) - logm(b))


def congruent(m, a):
    """Congruent transform ``M A M`` for SPD ``M`` (SPD-preserving)."""
    _check_same_dim(m, a)
    m = np.asarray(m, dtype=float)
    return sym(m @ np.asarray(a, dtype=float) @ m)


def dist_logeuclid_g(g, a, b):
    """LogEuclidean distance with reference point ``G``.

    Both arguments are first whitened by ``G^{-1/2}``:
    ``||log(G^{-1/2} A G^{-1/2}) - log(G^{-1/2} B G^{-1/2})||_F``. With
    ``G = I`` this is :func:`dist_logeuclid`.
    """
    _check_same_dim(g, a, b)
    w = invsqrtm(g)
    return frob_norm(logm(congruent(w, a)) - logm(congruent(w, b)))


def dist_airm(a, b):
    """Affine-invariant Riemannian distance ``||log(A^{-1/2} B A^{-1/2})||_F``.

    Invariant under simultaneous congruence of both arguments. The pencil
    form (see :func:`dist_airm_pencil`) agrees to roundoff.
    """
    _check_same_dim(a, b)
    return frob_norm(logm(congruent(invsqrtm(a), b)))


def dist_airm_pencil(a, b):
    """Pencil cross-check of :func:`dist_airm`.

    Computed as ``sqrt(sum(log^2 lam))`` over the eigenvalues ``lam`` of the
    symmetric whitened matrix ``A^{-1/2} B A^{-1/2}`` (the eigenvalues of the
    pencil ``(A, B)``).
    """
    _check_same_dim(a, b)
    lam = np.linalg.eigvalsh(congruent(invsqrtm(a), b))
    if lam[0] <= 0:
        raise ValueError(f"pencil is not positive: lambda_min = {lam[0]:.6e}")
    return float(np.sqrt(np.sum(np.log(lam) ** 2)))


def exp_map(g, s):
    """Exponential map at ``G``: ``G^{1/2} exp(G^{-1/2} S G^{-1/2}) G^{1/2}``.

    Maps a symmetric tangent vector ``S`` at ``G`` to a point on the SPD cone.
    """
    _check_same_dim(g, s)
    root, inv_root = _sqrt_pair(g)
    return sym(root @ expm(congruent(inv_root, sym(s))) @ root)


def log_map(g, a):
    """Logarithmic map at ``G``: ``G^{1/2} log(G^{-1/2} A G^{-1/2}) G^{1/2}``.

    Inverse of :func:`exp_map`; returns the symmetric tangent vector at ``G``
    pointing to ``A``.
    """
    _check_same_dim(g, a)
    root, inv_root = _sqrt_pair(g)
    return sym(root @ logm(congruent(inv_root, a)) @ root)


def tangent_inner(g, s_a, s_b):
    """Affine-invariant inner product ``tr(G^-1 S_A G^-1 S_B)`` at ``G``."""
    _check_same_dim(g, s_a, s_b)
    g = np.asarray(g, dtype=float)
    p = np.linalg.solve(g, np.asarray(s_a, dtype=float))
    q = np.linalg.solve(g, np.asarray(s_b, dtype=float))
    return float(np.sum(p * q.T))


def tangent_norm(g, s):
    """Norm of a tangent vector under the affine-invariant metric at ``G``."""
    return float(np.sqrt(max(tangent_inner(g, s, s), 0.0)))


def riemannian_mean(mats, tol=1e-10, max_iter=100):
    """Riemannian (Karcher) mean of a list of SPD matrices.

    Fixed-point iteration ``X <- exp_map(X, mean_i log_map(X, X_i))`` with
    unit step, initialized at the arithmetic mean. The returned point
    satisfies ``||mean_i log_map(X, X_i)||_X < tol``. The per-sample tangent
    terms are reduced in index order, so the result is reproducible.

    Parameters
    ----------
    mats : sequence of ndarray
        Non-empty list of SPD matrices of a common dimension.
    tol : float
        Convergence threshold on the Karcher-gradient norm.
    max_iter : int
        Iteration budget.

    Raises
    ------
    MaxIterExceeded
        Carrying the final residual, if the budget is exhausted.
    """
    mats = [np.asarray(m, dtype=float) for m in mats]
    if not mats:
        raise ValueError("riemannian_mean of an empty list")
    _check_same_dim(*mats)
    stack = np.stack(mats)
    xbar = sym(stack.mean(axis=0))

    def karcher_step(x):
        root, inv_root = _sqrt_pair(x)
        j = _logm_stack(sym(inv_root @ stack @ inv_root)).mean(axis=0)
        return frob_norm(j), sym(root @ expm(j) @ root)

    for _ in range(max_iter):
        residual, nxt = karcher_step(xbar)
        if residual < tol:
            return xbar
        xbar = nxt
    residual, _ = karcher_step(xbar)
    if residual < tol:
        return xbar
    raise MaxIterExceeded(
        f"Riemannian mean did not converge in {max_iter} iterations "
        f"(residual {residual:.3e} > tol {tol:.0e})",
        residual,
    )
