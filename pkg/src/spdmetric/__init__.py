"""Supervised reference-point learning for the LogEuclidean SPD metric.

The package learns the reference point of a congruence-parameterized
LogEuclidean distance on symmetric positive definite matrices by maximizing
centered kernel-target alignment with geodesic gradient ascent, and evaluates
the learned metric with a 1-nearest-neighbor classifier against Euclidean,
affine-invariant Riemannian and unlearned LogEuclidean baselines.
"""

from .alignment import (
    DegenerateGram,
    EvalCounter,
    KtaGradient,
    LabeledSpdDataset,
    centering_matrix,
    gram,
    kernel_le,
    kta_fd_directional,
    kta_gradient,
    kta_objective,
)
from .geometry import (
    MaxIterExceeded,
    congruent,
    dist_airm,
    dist_airm_pencil,
    dist_euclid,
    dist_logeuclid,
    dist_logeuclid_g,
    exp_map,
    log_map,
    riemannian_mean,
    tangent_inner,
    tangent_norm,
)
from .learnkit import (
    DatasetFormatError,
    MetricSpec,
    ToyConfig,
    dataset_read,
    dataset_write,
    evaluate_accuracy,
    matrix_read,
    matrix_write,
    nn1_classify,
    nn1_predict,
    random_orthonormal,
    random_spd,
    random_sym,
    toy_generate,
    whiten,
)
from .logderiv import dlog, dlog_fd_oracle, loewner_log
from .optimize import (
    OptimizerConfig,
    OptTrace,
    TraceRow,
    geodesic_step,
    learn_metric,
    retract_to_ball,
)
from .symmat import (
    NotPositiveDefinite,
    SpectralDecomposition,
    assert_spd,
    eigh,
    expm,
    frob_inner,
    frob_norm,
    invsqrtm,
    logm,
    spectral_map,
    sqrtm,
    sym,
)

__version__ = "0.1.0"

__all__ = [
    "DegenerateGram",
    "EvalCounter",
    "KtaGradient",
    "LabeledSpdDataset",
    "centering_matrix",
    "gram",
    "kernel_le",
    "kta_fd_directional",
    "kta_gradient",
    "kta_objective",
    "MaxIterExceeded",
    "congruent",
    "dist_airm",
    "dist_airm_pencil",
    "dist_euclid",
    "dist_logeuclid",
    "dist_logeuclid_g",
    "exp_map",
    "log_map",
    "riemannian_mean",
    "tangent_inner",
    "tangent_norm",
    "DatasetFormatError",
    "MetricSpec",
    "ToyConfig",
    "dataset_read",
    "dataset_write",
    "evaluate_accuracy",
    "matrix_read",
    "matrix_write",
    "nn1_classify",
    "nn1_predict",
    "random_orthonormal",
    "random_spd",
    "random_sym",
    "toy_generate",
    "whiten",
    "dlog",
    "dlog_fd_oracle",
    "loewner_log",
    "OptimizerConfig",
    "OptTrace",
    "TraceRow",
    "geodesic_step",
    "learn_metric",
    "retract_to_ball",
    "NotPositiveDefinite",
    "SpectralDecomposition",
    "assert_spd",
    "eigh",
    "expm",
    "frob_inner",
    "frob_norm",
    "invsqrtm",
    "logm",
    "spectral_map",
    "sqrtm",
    "sym",
]
