"""1-NN classification with pluggable SPD metrics, toy data, whitening, IO.

The classifier is deliberately minimal: the label of the closest training
sample, ties broken by lowest sample index. Metrics are selected through
:class:`MetricSpec`; the LogEuclidean variant takes its reference point as
the identity, the Riemannian mean of the training set, or an explicit SPD
matrix.

Toy covariance matrices are built as

    X = Q diag(lam_1..lam_r, mu_1..mu_r) Q^T + V diag(|eps_1..eps_2r|) V^T

with a single orthonormal ``Q`` shared by the whole dataset, a fresh
orthonormal ``V`` per sample, ``lam ~ N(5, 0.2)`` for the positive class and
``N(4, 0.1)`` for the negative one, ``mu ~ U([mu_lo, mu_hi])`` and
``eps ~ N(0, 1)``. Randomness comes from numpy's PCG64: the dataset seed is
split into three child streams (``Q``, train, test) via
``SeedSequence.spawn``, and each sample consumes its stream in the fixed
order lam, mu, eps, V — so a seed pins the dataset bit for bit.
"""

import math
from dataclasses import dataclass

import numpy as np

from .alignment import LabeledSpdDataset
from .geometry import congruent, riemannian_mean
from .symmat import NotPositiveDefinite, assert_spd, invsqrtm, logm, sym

EUCLID = "euclid"
AIRM = "airm"
LOGEUCLID = "logeuclid"


class DatasetFormatError(ValueError):
    """Raised for malformed dataset or matrix files."""


@dataclass
class MetricSpec:
    """Distance selector for the 1-NN classifier.

    ``kind`` is one of ``"euclid"``, ``"airm"``, ``"logeuclid"``. For the
    LogEuclidean kind, ``reference`` is ``"identity"``, ``"mean"`` (the
    Riemannian mean of the training set, resolved at use time) or an explicit
    SPD matrix.
    """

    kind: str
    reference: object = "identity"

    def __post_init__(self):
        if self.kind not in (EUCLID, AIRM, LOGEUCLID):
            raise ValueError(f"unknown metric kind {self.kind!r}")
        if isinstance(self.reference, str):
            if self.reference not in ("identity", "mean"):
                raise ValueError(f"unknown reference {self.reference!r}")
        else:
            self.reference = np.asarray(self.reference, dtype=float)

    @classmethod
    def euclid(cls):
        return cls(EUCLID)

    @classmethod
    def airm(cls):
        return cls(AIRM)

    @classmethod
    def logeuclid(cls, reference="identity"):
        return cls(LOGEUCLID, reference)


def _distance_closure(train, spec):
    """Build ``x -> distances to all training samples`` for a metric spec.

    Precomputes whatever is reusable across queries (flattened samples for
    the Euclidean case, whitened logs for the LogEuclidean cases), so that
    scoring a test set is cheap. Distances are identical to the corresponding
    ``geometry.dist_*`` functions.
    """
    stack = np.stack(train.samples)
    d = train.dim

    if spec.kind == EUCLID:
        flat = stack.reshape(train.n, -1)

        def dists(x):
            return np.linalg.norm(flat - np.asarray(x, dtype=float).ravel(), axis=1)

        return dists

    if spec.kind == LOGEUCLID:
        if isinstance(spec.reference, np.ndarray):
            ref = assert_spd(sym(spec.reference))
            if ref.shape != (d, d):
                raise ValueError(
                    f"reference has shape {ref.shape}, samples are {d}x{d}"
                )
        elif spec.reference == "mean":
            ref = riemannian_mean(train.samples)
        else:
            ref = None
        if ref is None:
            whiten_w = None
            logs = np.stack([logm(x) for x in train.samples])
        else:
            whiten_w = invsqrtm(ref)
            logs = np.stack(
                [logm(congruent(whiten_w, x)) for x in train.samples]
            )
        flat_logs = logs.reshape(train.n, -1)

        def dists(x):
            x = np.asarray(x, dtype=float)
            lx = logm(x) if whiten_w is None else logm(congruent(whiten_w, x))
            return np.linalg.norm(flat_logs - lx.ravel(), axis=1)

        return dists

    def dists(x):
        w = invsqrtm(x)
        pencil = sym(np.einsum("ab,nbc,cd->nad", w, stack, w))
        lam = np.linalg.eigh(pencil)[0]
        if np.min(lam) <= 0:
            raise ValueError("non-positive pencil eigenvalue in AIRM distance")
        return np.sqrt(np.sum(np.log(lam) ** 2, axis=1))

    return dists


def nn1_classify(train, x, spec):
    """Label of the training sample closest to ``x`` under the given metric.

    Ties are broken by lowest sample index.
    """
    if np.asarray(x).shape != (train.dim, train.dim):
        raise ValueError(
            f"query has shape {np.asarray(x).shape}, samples are "
            f"{train.dim}x{train.dim}"
        )
    dists = _distance_closure(train, spec)(x)
    return int(train.labels[int(np.argmin(dists))])


def nn1_predict(train, samples, spec):
    """1-NN labels for a sequence of query matrices (shared precomputation)."""
    dists = _distance_closure(train, spec)
    return np.array([int(train.labels[int(np.argmin(dists(x)))]) for x in samples])


def evaluate_accuracy(train, test, spec):
    """Fraction of test samples whose 1-NN label matches, in ``[0, 1]``."""
    if test.dim != train.dim:
        raise ValueError(f"dimension mismatch: train {train.dim}, test {test.dim}")
    pred = nn1_predict(train, test.samples, spec)
    return float(np.mean(pred == test.labels))


@dataclass
class ToyConfig:
    """Parameters of the synthetic covariance generator.

    Matrices are ``2r x 2r``. ``scale_as_std`` controls whether the second
    parameter of the class Gaussians is read as a standard deviation
    (default) or a variance; ``shared_noise_basis`` draws the noise basis
    ``V`` once per dataset instead of per sample.
    """

    r: int
    n_train: int
    n_test: int
    mu_lo: float = 1.0
    mu_hi: float = 6.0
    seed: int = 0
    scale_as_std: bool = True
    shared_noise_basis: bool = False

    def __post_init__(self):
        if self.r < 1:
            raise ValueError(f"r must be >= 1, got {self.r}")
        if self.n_train % 2 or self.n_test % 2:
            raise ValueError(
                f"n_train and n_test must be even for balanced classes, "
                f"got {self.n_train}/{self.n_test}"
            )
        if self.n_train < 2 or self.n_test < 2:
            raise ValueError("need at least 2 samples per split")
        if not self.mu_lo < self.mu_hi:
            raise ValueError(f"mu_lo must be < mu_hi, got [{self.mu_lo}, {self.mu_hi}]")


def random_orthonormal(rng, d):
    """Haar-distributed orthonormal matrix (QR with the R-diagonal sign fix)."""
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


def random_spd(rng, d, eig_log_range=(-1.0, 1.0)):
    """Random SPD matrix with eigenvalues ``exp(U(eig_log_range))``."""
    lam = np.exp(rng.uniform(*eig_log_range, size=d))
    q = random_orthonormal(rng, d)
    return sym((q * lam) @ q.T)


def random_sym(rng, d, scale=1.0):
    """Random symmetric matrix with independent normal entries."""
    return sym(rng.standard_normal((d, d)) * scale)


def _toy_sample(rng, q, noise_basis, cfg, positive):
    dim = 2 * cfg.r
    mean, spread = (5.0, 0.2) if positive else (4.0, 0.1)
    sd = spread if cfg.scale_as_std else math.sqrt(spread)
    while True:
        lam = rng.normal(mean, sd, size=cfg.r)
        mu = rng.uniform(cfg.mu_lo, cfg.mu_hi, size=cfg.r)
        eps = np.abs(rng.standard_normal(dim))
        v = noise_basis if noise_basis is not None else random_orthonormal(rng, dim)
        x = sym((q * np.concatenate([lam, mu])) @ q.T + (v * eps) @ v.T)
        try:
            return assert_spd(x)
        except NotPositiveDefinite:
            continue  # measure-zero degenerate draw; redraw from the stream


def _toy_split(rng, q, noise_basis, cfg, n):
    half = n // 2
    samples = [_toy_sample(rng, q, noise_basis, cfg, i < half) for i in range(n)]
    labels = np.where(np.arange(n) < half, 1, -1)
    return LabeledSpdDataset(samples, labels)


def toy_generate(cfg):
    """Generate a (train, test) pair of balanced toy datasets.

    One orthonormal ``Q`` is drawn per call and shared by both splits and
    classes. Deterministic for a fixed ``cfg.seed`` (see the module docstring
    for the stream-splitting scheme).
    """
    ss_q, ss_train, ss_test = np.random.SeedSequence(cfg.seed).spawn(3)
    rng_q = np.random.default_rng(ss_q)
    q = random_orthonormal(rng_q, 2 * cfg.r)
    basis = random_orthonormal(rng_q, 2 * cfg.r) if cfg.shared_noise_basis else None
    train = _toy_split(np.random.default_rng(ss_train), q, basis, cfg, cfg.n_train)
    test = _toy_split(np.random.default_rng(ss_test), q, basis, cfg, cfg.n_test)
    return train, test


def whiten(ds):
    """Center a dataset at the identity by the congruence ``X -> M X M``
    with ``M`` the inverse square root of the Riemannian mean.

    Returns the whitened dataset together with the mean that was removed.
    Pairwise AIRM distances are preserved exactly (congruence isometry), and
    the Riemannian mean of the output is the identity up to the mean solver's
    tolerance.
    """
    xbar = riemannian_mean(ds.samples)
    w = invsqrtm(xbar)
    samples = [congruent(w, x) for x in ds.samples]
    return LabeledSpdDataset(samples, ds.labels.copy()), xbar


def _format_entries(row):
    return " ".join(repr(float(v)) for v in row)


def dataset_write(ds, path):
    """Write a dataset in the ``SPDDS 1`` text format.

    Entries use the shortest round-tripping decimal representation, so a
    write/read cycle reproduces the matrices bit for bit.
    """
    with open(path, "w", encoding="ascii") as fh:
        fh.write("SPDDS 1\n")
        fh.write(f"n={ds.n} d={ds.dim}\n")
        for x, label in zip(ds.samples, ds.labels):
            sign = "+1" if label > 0 else "-1"
            fh.write(f"{sign} {_format_entries(x.ravel())}\n")


def dataset_read(path):
    """Read a ``SPDDS 1`` dataset file.

    Samples are symmetrized and validated as SPD; a non-SPD sample raises
    :class:`spdmetric.symmat.NotPositiveDefinite` naming its index.
    """
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].split() != ["SPDDS", "1"]:
        raise DatasetFormatError(f"{path}: expected header 'SPDDS 1'")
    try:
        fields = dict(kv.split("=") for kv in lines[1].split())
        n, d = int(fields["n"]), int(fields["d"])
    except (IndexError, KeyError, ValueError) as exc:
        raise DatasetFormatError(f"{path}: malformed size line") from exc
    body = [ln for ln in lines[2:] if ln.strip()]
    if len(body) != n:
        raise DatasetFormatError(f"{path}: expected {n} sample lines, got {len(body)}")
    samples, labels = [], []
    for i, line in enumerate(body):
        parts = line.split()
        if len(parts) != 1 + d * d:
            raise DatasetFormatError(
                f"{path}: sample {i}: expected 1 + {d * d} fields, got {len(parts)}"
            )
        try:
            label = int(parts[0])
            entries = np.array([float(v) for v in parts[1:]])
        except ValueError as exc:
            raise DatasetFormatError(f"{path}: sample {i}: unparsable value") from exc
        if label not in (-1, 1):
            raise DatasetFormatError(
                f"{path}: sample {i}: label {label} outside {{-1, +1}}"
            )
        x = sym(entries.reshape(d, d))
        try:
            assert_spd(x)
        except NotPositiveDefinite as exc:
            raise NotPositiveDefinite(
                f"{path}: sample {i}: {exc}", exc.lambda_min
            ) from exc
        samples.append(x)
        labels.append(label)
    return LabeledSpdDataset(samples, np.array(labels))


def matrix_write(x, path):
    """Write one SPD matrix in the ``SPDM 1`` text format."""
    x = np.asarray(x, dtype=float)
    with open(path, "w", encoding="ascii") as fh:
        fh.write("SPDM 1\n")
        fh.write(f"d={x.shape[0]}\n")
        for row in x:
            fh.write(_format_entries(row) + "\n")


def matrix_read(path):
    """Read an ``SPDM 1`` matrix file (symmetrized, validated as SPD)."""
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].split() != ["SPDM", "1"]:
        raise DatasetFormatError(f"{path}: expected header 'SPDM 1'")
    try:
        d = int(lines[1].split("=")[1])
    except (IndexError, ValueError) as exc:
        raise DatasetFormatError(f"{path}: malformed size line") from exc
    body = [ln for ln in lines[2:] if ln.strip()]
    if len(body) != d:
        raise DatasetFormatError(f"{path}: expected {d} rows, got {len(body)}")
    try:
        x = np.array([[float(v) for v in ln.split()] for ln in body])
    except ValueError as exc:
        raise DatasetFormatError(f"{path}: unparsable matrix entry") from exc
    if x.shape != (d, d):
        raise DatasetFormatError(f"{path}: expected {d}x{d} entries, got {x.shape}")
    return assert_spd(sym(x))
