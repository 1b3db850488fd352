"""Centered kernel-target alignment of the LogEuclidean kernel.

The kernel with reference point ``G`` is

    k_G(X, X') = tr(log(G^{-1/2} X G^{-1/2}) log(G^{-1/2} X' G^{-1/2})),

its Gram matrix over a labeled dataset is ``h(G)``, and the objective is the
centered alignment with the label outer product,

    f(G) = <U h(G) U, y y^T> / ||U h(G) U||,

where ``U = I - 11^T / n`` is the centering matrix. The constant ``||y y^T||``
of the general alignment criterion is deliberately omitted, so values lie in
``[-n, n]`` rather than ``[-1, 1]``; the maximizer is unaffected.

The Euclidean gradient of ``f`` is assembled exactly from directional
derivatives of the matrix logarithm (see :func:`kta_gradient`); no finite
differences are involved. The per-sample square roots ``X_i^{+/-1/2}`` are
computed once per dataset and cached, since they dominate the cost and do not
depend on ``G``. All reductions run in index order, so results are
deterministic for fixed inputs.
"""

from dataclasses import dataclass, field

import numpy as np

from .logderiv import loewner_log
from .symmat import _logm_stack, frob_norm, invsqrtm, logm, sym

#: Centered Gram norms at or below this are treated as degenerate.
DEGENERATE_NORM = 1e-14


class DegenerateGram(ValueError):
    """Raised when the centered Gram matrix has (numerically) zero norm.

    Happens when all samples coincide after the log mapping, leaving the
    alignment undefined.
    """


@dataclass
class EvalCounter:
    """Tally of objective/gradient work, for sizing experiments.

    A gradient costs one batched eigendecomposition plus ``n^2`` small matrix
    products per call; ``dlog_directions`` counts the directional-derivative
    applications performed.
    """

    objective: int = 0
    gradient: int = 0
    dlog_directions: int = 0


@dataclass
class LabeledSpdDataset:
    """Binary-labeled SPD samples of a common dimension.

    Parameters
    ----------
    samples : list of ndarray
        At least two SPD matrices, all ``(d, d)``.
    labels : array-like
        Values in ``{-1, +1}``, one per sample.
    """

    samples: list
    labels: np.ndarray
    _sqrt: np.ndarray = field(default=None, repr=False, compare=False)
    _invsqrt: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.samples = [np.asarray(x, dtype=float) for x in self.samples]
        self.labels = np.asarray(self.labels, dtype=int)
        if len(self.samples) < 2:
            raise ValueError(f"need at least 2 samples, got {len(self.samples)}")
        if self.labels.shape != (len(self.samples),):
            raise ValueError(
                f"{len(self.samples)} samples but {self.labels.shape} labels"
            )
        d = self.samples[0].shape
        if len(d) != 2 or d[0] != d[1]:
            raise ValueError(f"samples must be square matrices, got shape {d}")
        for i, x in enumerate(self.samples):
            if x.shape != d:
                raise ValueError(f"sample {i} has shape {x.shape}, expected {d}")
        bad = set(np.unique(self.labels)) - {-1, 1}
        if bad:
            raise ValueError(f"labels must be in {{-1, +1}}, got {sorted(bad)}")

    @property
    def n(self):
        return len(self.samples)

    @property
    def dim(self):
        return self.samples[0].shape[0]

    def _roots(self):
        """Cached stacks of ``X_i^{1/2}`` and ``X_i^{-1/2}``."""
        if self._sqrt is None:
            lam, vec = np.linalg.eigh(np.stack(self.samples))
            if np.min(lam) <= 0:
                raise ValueError(
                    f"dataset contains a non-SPD sample "
                    f"(lambda_min = {np.min(lam):.6e})"
                )
            root = np.sqrt(lam)
            up = np.einsum("nab,nb,ncb->nac", vec, root, vec)
            down = np.einsum("nab,nb,ncb->nac", vec, 1.0 / root, vec)
            self._sqrt = sym(up)
            self._invsqrt = sym(down)
        return self._sqrt, self._invsqrt


def kernel_le(g, x, xp):
    """LogEuclidean kernel ``k_G(X, X')`` with reference point ``G``."""
    w = invsqrtm(g)
    lx = logm(sym(w @ np.asarray(x, dtype=float) @ w))
    lxp = logm(sym(w @ np.asarray(xp, dtype=float) @ w))
    return float(np.sum(lx * lxp))


def gram(g, ds):
    """Gram matrix ``h(G)`` of the LogEuclidean kernel over a dataset.

    Symmetric positive semidefinite by construction (it is the Gram matrix of
    the vectorized whitened logs).
    """
    w = invsqrtm(g)
    whitened = sym(w @ np.stack(ds.samples) @ w)
    flat = _logm_stack(whitened).reshape(ds.n, -1)
    h = flat @ flat.T
    return (h + h.T) / 2.0


def centering_matrix(n):
    """Centering matrix ``I - 11^T / n`` (idempotent, annihilates ones)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return np.eye(n) - np.full((n, n), 1.0 / n)


def _centered_stats(h, labels):
    """Centered Gram, its norm, and the alignment value."""
    u = centering_matrix(h.shape[0])
    centered = sym(u @ h @ u)
    norm = frob_norm(centered)
    if norm <= DEGENERATE_NORM:
        raise DegenerateGram(
            f"centered Gram norm {norm:.3e} <= {DEGENERATE_NORM:.0e}; "
            "all samples coincide under the current mapping"
        )
    y = labels.astype(float)
    value = float(y @ centered @ y) / norm
    return centered, norm, value


def kta_objective(g, ds, counter=None):
    """Centered kernel-target alignment ``f(G)`` of a dataset.

    Bounded by ``n`` in absolute value (Cauchy-Schwarz against ``||yy^T||``).

    Raises
    ------
    DegenerateGram
        If the centered Gram matrix has numerically zero norm.
    """
    _, _, value = _centered_stats(gram(g, ds), ds.labels)
    if counter is not None:
        counter.objective += 1
    return value


@dataclass
class KtaGradient:
    """Alignment value and its Euclidean / Riemannian gradients at ``G``.

    ``riem_grad`` is ``G sym(euclid_grad) G``, the tangent vector dual to the
    Euclidean gradient under the affine-invariant metric.
    """

    value: float
    euclid_grad: np.ndarray
    riem_grad: np.ndarray


def kta_gradient(g, ds, counter=None):
    """Exact gradient of the alignment objective at ``G``.

    Assembles ``sum_ij Z_ij grad h_ij`` where

        Z(G)    = U (yy^T / ||UhU|| - f(G) UhU / ||UhU||^2) U,
        Q_i(G)  = log(X_i^{-1/2} G X_i^{-1/2}),
        A_ij    = X_i^{1/2} X_j^{-1/2} Q_j X_j^{1/2} X_i^{-1/2},
        grad h_ij = X_i^{-1/2} Dlog(M_i)[sym(A_ij)] X_i^{-1/2}
                  + X_j^{-1/2} Dlog(M_j)[sym(A_ji)] X_j^{-1/2},

    with ``M_i = X_i^{-1/2} G X_i^{-1/2}``. Since ``Dlog`` is linear in its
    direction and ``grad h_ij = grad h_ji``, the double sum collapses to one
    directional derivative per sample:

        grad f = 2 sum_i X_i^{-1/2} Dlog(M_i)[sum_j Z_ij sym(A_ij)] X_i^{-1/2}.

    Parameters
    ----------
    g : ndarray
        SPD reference point.
    ds : LabeledSpdDataset
    counter : EvalCounter, optional
        Incremented in place when given.

    Returns
    -------
    KtaGradient
    """
    g = np.asarray(g, dtype=float)
    h = gram(g, ds)
    _, norm, value = _centered_stats(h, ds.labels)
    u = centering_matrix(ds.n)
    y = ds.labels.astype(float)
    z = sym(u @ (np.outer(y, y) / norm - value * (u @ h @ u) / norm**2) @ u)

    root, inv_root = ds._roots()
    m = sym(inv_root @ g @ inv_root)
    lam, vec = np.linalg.eigh(m)
    if np.min(lam) <= 0:
        raise ValueError(f"whitened point not SPD: lambda_min = {np.min(lam):.6e}")
    vec_t = vec.transpose(0, 2, 1)
    q = (vec * np.log(lam)[:, None, :]) @ vec_t

    # A[i, j] = (root_i inv_root_j) Q_j (root_j inv_root_i), as batched
    # products over the pair grid.
    e = root[:, None] @ inv_root[None, :]
    a = (e @ q[None, :]) @ e.transpose(1, 0, 2, 3)
    sym_a = (a + a.transpose(0, 1, 3, 2)) / 2.0
    directions = np.einsum("ij,ijab->iab", z, sym_a)

    # Batched Daleckii-Krein application of Dlog(M_i) to each direction.
    inner = vec_t @ directions @ vec
    k = vec @ (loewner_log(lam) * inner) @ vec_t
    euclid = sym(2.0 * np.sum(inv_root @ k @ inv_root, axis=0))
    riem = sym(g @ euclid @ g)

    if counter is not None:
        counter.gradient += 1
        counter.objective += 1
        counter.dlog_directions += ds.n
    return KtaGradient(value=value, euclid_grad=euclid, riem_grad=riem)


def kta_fd_directional(g, ds, direction, step=1e-5):
    """Central-difference directional derivative of :func:`kta_objective`.

    Independent oracle for :func:`kta_gradient`: returns
    ``(f(G + step*H) - f(G - step*H)) / (2*step)`` for a symmetric direction
    ``H``, halving ``step`` until both perturbed points are SPD.
    """
    g = np.asarray(g, dtype=float)
    direction = sym(direction)
    while step > 0:
        lo = np.linalg.eigvalsh(sym(g - step * direction))[0]
        hi = np.linalg.eigvalsh(sym(g + step * direction))[0]
        if lo > 0 and hi > 0:
            break
        step /= 2.0
    else:
        raise ValueError("step underflowed before G +/- step*H became SPD")
    f_hi = kta_objective(sym(g + step * direction), ds)
    f_lo = kta_objective(sym(g - step * direction), ds)
    return (f_hi - f_lo) / (2.0 * step)
