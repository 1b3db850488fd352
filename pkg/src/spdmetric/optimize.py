"""Geodesic gradient ascent on the SPD cone with a geodesic-ball constraint.

Maximizes the alignment objective under ``dist_airm(G0, G) <= epsilon`` by
stepping along geodesics, ``G <- exp_map(G, eta * grad)``, with Armijo
backtracking on the step size and retraction to the ball boundary whenever a
trial point leaves the feasible region. Only improving steps are accepted, so
the objective is non-decreasing across iterations.
"""

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .alignment import EvalCounter, kta_gradient, kta_objective
from .geometry import dist_airm, exp_map, log_map, tangent_norm
from .symmat import sym


@dataclass
class OptimizerConfig:
    """Tuning knobs for :func:`learn_metric`.

    ``epsilon`` is the radius of the geodesic trust ball around the starting
    point. The first trial step of each iteration moves a geodesic distance of
    ``init_displacement`` (subsequent iterations warm-start from twice the
    previously accepted step size).
    """

    epsilon: float = 10.0
    max_iter: int = 200
    grad_tol: float = 1e-6
    f_rel_tol: float = 1e-9
    armijo_c: float = 1e-4
    backtrack_beta: float = 0.5
    max_backtracks: int = 30
    init_displacement: float = 0.1
    # Cap on the geodesic displacement of any trial step. Keeps the whitened
    # eigenvalue range of trial points within floating-point territory where
    # eigendecompositions of their congruences stay accurate.
    max_displacement: float = 6.0

    def __post_init__(self):
        positive = {
            "epsilon": self.epsilon,
            "grad_tol": self.grad_tol,
            "f_rel_tol": self.f_rel_tol,
            "armijo_c": self.armijo_c,
            "max_backtracks": self.max_backtracks,
            "init_displacement": self.init_displacement,
            "max_displacement": self.max_displacement,
        }
        for name, val in positive.items():
            if not val > 0:
                raise ValueError(f"{name} must be positive, got {val}")
        if self.max_iter < 0:
            raise ValueError(f"max_iter must be >= 0, got {self.max_iter}")
        if not 0.0 < self.backtrack_beta < 1.0:
            raise ValueError(
                f"backtrack_beta must be in (0, 1), got {self.backtrack_beta}"
            )


class TraceRow(NamedTuple):
    """One accepted iteration of :func:`learn_metric`."""

    iteration: int
    f: float
    grad_norm: float
    step: float
    dist_to_g0: float
    backtracks: int


@dataclass
class OptTrace:
    """Per-iteration history of a :func:`learn_metric` run.

    ``f`` is non-decreasing across rows. ``stop_reason`` is one of
    ``grad_tol``, ``f_rel_tol``, ``max_iter`` or ``line_search_failed``;
    the latter also sets ``line_search_failed`` (the run still returns its
    best iterate). ``evals`` tallies objective/gradient work.
    """

    rows: list = field(default_factory=list)
    stop_reason: str = ""
    line_search_failed: bool = False
    evals: EvalCounter = field(default_factory=EvalCounter)


def geodesic_step(g, grad, eta):
    """Move from ``G`` along the geodesic with tangent ``grad`` for time ``eta``.

    Equals ``exp_map(G, eta * grad)``, i.e.
    ``G^{1/2} exp(eta G^{-1/2} grad G^{-1/2}) G^{1/2}``.
    """
    if eta < 0:
        raise ValueError(f"step size must be >= 0, got {eta}")
    return exp_map(g, eta * sym(grad))


def retract_to_ball(g0, g, eps):
    """Pull ``G`` back onto the geodesic ball of radius ``eps`` around ``G0``.

    Points inside the ball are returned unchanged; outside points are moved
    along the geodesic from ``G0`` through ``G`` until their distance equals
    ``eps`` (same tangent ray, rescaled).
    """
    if eps <= 0:
        raise ValueError(f"ball radius must be positive, got {eps}")
    dist = dist_airm(g0, g)
    if dist <= eps:
        return np.asarray(g, dtype=float)
    return exp_map(g0, (eps / dist) * log_map(g0, g))


def learn_metric(ds, g0, cfg=None):
    """Learn the reference point maximizing alignment on a dataset.

    Geodesic gradient ascent started at ``g0`` (typically the Riemannian mean
    of the samples), constrained to ``dist_airm(g0, G) <= cfg.epsilon``.
    Iterations stop when the Riemannian gradient norm falls below
    ``grad_tol * (1 + |f|)``, when the relative objective improvement stays
    below ``f_rel_tol`` for 3 consecutive iterations, or at ``max_iter``.

    Parameters
    ----------
    ds : LabeledSpdDataset
    g0 : ndarray
        SPD starting point and ball center.
    cfg : OptimizerConfig, optional

    Returns
    -------
    (ndarray, OptTrace)
        The learned reference point (the best iterate; its objective value is
        never below ``f(g0)``) and the iteration trace.
    """
    cfg = OptimizerConfig() if cfg is None else cfg
    g = np.asarray(g0, dtype=float)
    trace = OptTrace()
    if cfg.max_iter == 0:
        trace.stop_reason = "max_iter"
        return g, trace

    eta_prev = None
    stall = 0
    for it in range(1, cfg.max_iter + 1):
        kg = kta_gradient(g, ds, counter=trace.evals)
        f_cur = kg.value
        grad_norm = tangent_norm(g, kg.riem_grad)
        if grad_norm < cfg.grad_tol * (1.0 + abs(f_cur)):
            trace.stop_reason = "grad_tol"
            break

        eta_cap = cfg.max_displacement / grad_norm
        eta = (
            cfg.init_displacement / grad_norm if eta_prev is None else 2.0 * eta_prev
        )
        eta = min(eta, eta_cap)
        accepted = False
        candidate = None
        f_new = f_cur
        backtracks = 0
        for backtracks in range(cfg.max_backtracks + 1):
            try:
                candidate = retract_to_ball(
                    g0, geodesic_step(g, kg.riem_grad, eta), cfg.epsilon
                )
                f_new = kta_objective(candidate, ds, counter=trace.evals)
            except (ValueError, np.linalg.LinAlgError):
                # Trial point numerically out of range; treat as a rejected
                # step and look closer.
                eta *= cfg.backtrack_beta
                continue
            if f_new >= f_cur + cfg.armijo_c * eta * grad_norm**2:
                accepted = True
                break
            eta *= cfg.backtrack_beta
        if not accepted:
            trace.stop_reason = "line_search_failed"
            trace.line_search_failed = True
            break

        g = candidate
        eta_prev = eta
        trace.rows.append(
            TraceRow(
                iteration=it,
                f=f_new,
                grad_norm=grad_norm,
                step=eta,
                dist_to_g0=dist_airm(g0, g),
                backtracks=backtracks,
            )
        )
        if f_new - f_cur < cfg.f_rel_tol * max(1.0, abs(f_new)):
            stall += 1
            if stall >= 3:
                trace.stop_reason = "f_rel_tol"
                break
        else:
            stall = 0
    else:
        trace.stop_reason = "max_iter"
    return g, trace
