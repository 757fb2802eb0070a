"""The four estimators for sparse-regression prediction.

Given an observation y_tilde = X theta + noise with theta in an l1 ball,
the choices are: project onto a fixed subspace, take the nearest point of
the attainable mean set, or split the space first (the projected variant):
pass the observation through raw on a small skewed part and solve the
nearest-point problem only on the complement, where the attainable set is
narrow. The split dimension k is chosen by balancing k * sigma^2 against
a width-times-noise term. The adaptive variant runs a sequence of
residual tests to pick k without knowing the radius.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ProjectionOperator, as_vector, complement
from .nearest import SolveOptions, l1_ls


def orth_proj_estimate(P, y_tilde):
    """Projection estimator: keep the component of the observation in P."""
    return P.apply(as_vector(y_tilde, "y_tilde"))


def nn_estimate(inst, y_tilde, opts=None):
    """Nearest-point estimator for q = 1: fit onto the hull of +-C x_j.

    Computed through the radius-folded design (columns scaled by C, unit
    ball) so all estimators in this module share one solver path.
    """
    if inst.q != 1.0:
        raise ValueError(
            "nearest-point estimation requires q = 1; the feasible set is "
            "nonconvex for q < 1 and no efficient solver is known"
        )
    y = as_vector(y_tilde, "y_tilde")
    if y.size != inst.n:
        raise ValueError(f"observation has length {y.size}, expected {inst.n}")
    return l1_ls(inst.scaled_design(), y, 1.0, opts).y_hat


@dataclass(frozen=True)
class PNNSelection:
    """Chosen split for the projected estimator.

    r holds the selection criterion value for every k in the profile used;
    k_star is the argmin (ties toward smaller k). projection spans the
    narrow (n - k_star)-dimensional part, complement the raw part.
    """

    k_star: int
    r: np.ndarray
    projection: ProjectionOperator
    complement: ProjectionOperator


def pnn_select(inst, profile):
    """Pick the split dimension k minimizing k sigma^2 + z_k sigma sqrt(log p).

    ``profile`` must be the width profile of the radius-scaled design
    (C times the columns), so profile.achieved already carries the radius.
    The log uses base e with p clamped to at least 3, keeping the factor
    at or above 1 on tiny instances.
    """
    sigma = inst.sigma
    logp = math.log(max(inst.p, 3))
    r = profile.ks * sigma**2 + profile.achieved * sigma * math.sqrt(logp)
    j = int(np.argmin(r))  # first minimum; ks ascend, so ties go small
    proj = profile.projections[j]
    return PNNSelection(int(profile.ks[j]), r, proj, complement(proj))


def pnn_solve(inst, y_tilde, sel, opts=None):
    """Projected nearest-point estimate plus the inner solver record.

    The raw part passes the observation through on sel.complement; the
    nearest-point part fits the projected scaled columns to the projected
    observation on the unit l1 ball. Returns (estimate, NNSolution of the
    sub-problem).
    """
    if inst.q != 1.0:
        raise ValueError(
            "projected nearest-point estimation requires q = 1; the feasible "
            "set is nonconvex for q < 1 and no efficient solver is known"
        )
    y = as_vector(y_tilde, "y_tilde")
    if y.size != inst.n:
        raise ValueError(f"observation has length {y.size}, expected {inst.n}")
    raw = sel.complement.apply(y)
    A = sel.projection.apply(inst.scaled_design())
    b = sel.projection.apply(y)
    sol = l1_ls(A, b, 1.0, opts)
    return raw + sol.y_hat, sol


def pnn_estimate(inst, y_tilde, sel, opts=None):
    """Projected nearest-point estimate; see pnn_solve."""
    return pnn_solve(inst, y_tilde, sel, opts)[0]


@dataclass(frozen=True)
class AdaptiveRecord:
    k: int
    delta: float
    radius: float
    stat: float
    threshold: float
    accepted: bool


@dataclass(frozen=True)
class AdaptiveTrace:
    """Per-k test log of the adaptive sweep; final_k None means fallback."""

    records: list
    final_k: int | None
    converged: bool = True


def adaptive_estimate(inst, y_tilde, profile, opts=None):
    """Radius-free estimation by sequential residual tests.

    ``profile`` must be the width profile of the raw design (the radius is
    exactly what this procedure does not know) and must contain every k in
    0..floor(n/2). At each k the observation is projected onto the narrow
    subspace, fitted there on an l1 body of radius k*sigma/Delta_k, and
    the squared residual is compared against (n-k) sigma^2 plus a
    2 sqrt(n log n) sigma^2 slack. The first passing k wins; if none does,
    the estimate falls back to the observation itself.
    """
    if inst.sigma <= 0:
        raise ValueError("adaptive estimation requires sigma > 0; every test threshold would be vacuous")
    y = as_vector(y_tilde, "y_tilde")
    n = inst.n
    if y.size != n:
        raise ValueError(f"observation has length {y.size}, expected {n}")
    sigma = inst.sigma
    slack = 2.0 * math.sqrt(n * math.log(n)) * sigma**2
    records = []
    all_converged = True
    for k in range(n // 2 + 1):
        P = profile.projection_for(k)
        delta = profile.achieved_for(k)
        y_k = P.apply(y)
        if k == 0:
            radius = 0.0
            solve_radius = 0.0
        elif delta == 0.0:
            # width collapsed: the projected body is {0}, any radius fits 0
            radius = math.inf
            solve_radius = 0.0
        else:
            radius = k * sigma / delta
            solve_radius = radius
        sol = l1_ls(P.apply(inst.X), y_k, solve_radius, opts)
        all_converged = all_converged and sol.converged
        diff = sol.y_hat - y_k
        stat = float(diff @ diff)
        threshold = (n - k) * sigma**2 + slack
        accepted = stat <= threshold
        records.append(AdaptiveRecord(k, delta, radius, stat, threshold, accepted))
        if accepted:
            y_hat = sol.y_hat + complement(P).apply(y)
            return y_hat, AdaptiveTrace(records, k, all_converged)
    return y.copy(), AdaptiveTrace(records, None, all_converged)
