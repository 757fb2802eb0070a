"""Risk certificates and a Monte Carlo risk harness.

The minimax prediction risk over an lq-constrained design body is not
computable exactly; this module sandwiches it. The upper side evaluates,
for each split dimension k, the cost of passing k raw coordinates plus a
width-times-noise term for the nearest-point part, and takes the best k.
The lower side turns relaxation width bounds into a max-over-k packing
value. Every bound fixes its absolute constant to 1, so the outputs are
certificates up to absolute constants rather than sharp values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import as_vector, make_rng
from .width import WidthOptions, width_profile


def c_q(q):
    """Sparsity-exponent constant 2^(1/q) (1/q) ln(2/q); about 1.386 at q=1."""
    q = float(q)
    if not 0.0 < q <= 1.0:
        raise ValueError(f"q must be in (0, 1], got {q}")
    return 2.0 ** (1.0 / q) * (1.0 / q) * math.log(2.0 / q)


def upper_bound(profile, q, sigma, p):
    """Best-k upper certificate on a radius-scaled width profile.

    u_k = k sigma^2 + c_q z_k^q sigma^(2-q) (log p)^(1 - q/2) with z_k the
    achieved width. Returns (min value, the per-k array, the minimizing k,
    ties toward smaller k).
    """
    sigma = float(sigma)
    logp = math.log(max(int(p), 3))
    u = profile.ks * sigma**2 + c_q(q) * profile.achieved**q * sigma ** (2.0 - q) * logp ** (
        1.0 - 0.5 * q
    )
    j = int(np.argmin(u))
    return float(u[j]), u, int(profile.ks[j])


def lower_bound(profile, q, sigma):
    """Max-over-k lower certificate: min(k sigma^2, k^(1-2/q) z_k^2) at k >= 1.

    Uses the relaxation side of the profile, which never exceeds the true
    width, so the certificate stays conservative. Ties go to the largest k.
    """
    sigma = float(sigma)
    q = float(q)
    if not 0.0 < q <= 1.0:
        raise ValueError(f"q must be in (0, 1], got {q}")
    best = 0.0
    k_best = 0
    for j, k in enumerate(profile.ks):
        if k < 1:
            continue
        val = min(k * sigma**2, float(k) ** (1.0 - 2.0 / q) * profile.relax_lower[j] ** 2)
        if val >= best:
            best, k_best = val, int(k)
    return best, k_best


@dataclass(frozen=True)
class RiskCertificate:
    q: float
    sigma: float
    u: np.ndarray
    upper: float
    k_upper: int
    lower: float
    k_lower: int
    ratio: float
    c_q: float
    proj_risk: float
    converged: bool


def minimax_certificate(inst, opts=None):
    """Sandwich the minimax prediction risk of a problem instance.

    Builds the width profile of the design once, scales it by the radius,
    and assembles the upper and lower certificates plus the best fixed-
    projection risk min_k (k sigma^2 + z_k^2). ratio is +inf when the
    lower certificate is zero.
    """
    if opts is None:
        opts = WidthOptions()
    # Noise-normalized solve: widths of (C X)/sigma, then scale every bound
    # by sigma^2. Dividing the design (not multiplying by 1/sigma) makes
    # certificate(X, sigma) and certificate(X/sigma, 1) feed bit-identical
    # matrices to the relaxation, so the sigma^2 homogeneity is exact in
    # floating point instead of drifting with solver trajectories.
    denom = inst.sigma if inst.sigma > 0 else 1.0
    profile = width_profile(inst.scaled_design() / denom, opts)
    factor = inst.sigma**2
    upper_unit, u_unit, k_upper = upper_bound(profile, inst.q, 1.0, inst.p)
    lower_unit, k_lower = lower_bound(profile, inst.q, 1.0)
    upper = factor * upper_unit
    u = factor * u_unit
    lower = factor * lower_unit
    if factor == 0.0:
        k_upper = int(profile.ks[0])
    proj = factor * float(np.min(profile.ks + profile.achieved**2))
    ratio = math.inf if lower == 0.0 else upper / max(lower, 1e-12)
    return RiskCertificate(
        q=inst.q,
        sigma=inst.sigma,
        u=u,
        upper=upper,
        k_upper=k_upper,
        lower=lower,
        k_lower=k_lower,
        ratio=ratio,
        c_q=c_q(inst.q),
        proj_risk=proj,
        converged=bool(np.all(profile.converged)),
    )


def euclidean_ball_lower(n, r, sigma):
    """Reference floor min(n sigma^2, r^2) for a Euclidean ball of radius r."""
    n = int(n)
    r = float(r)
    sigma = float(sigma)
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    if r < 0 or sigma < 0:
        raise ValueError("r and sigma must be non-negative")
    return min(n * sigma**2, r**2)


@dataclass(frozen=True)
class MonteCarloReport:
    trials: int
    seed: int
    means: np.ndarray
    stderrs: np.ndarray
    max_mse: float


def mc_risk(estimator, candidates, sigma, trials, seed):
    """Empirical worst-case mean squared error over a candidate truth set.

    For each candidate y the estimator sees y plus fresh Gaussian noise,
    `trials` times; the per-candidate mean and standard error are reported
    along with the max of the means. Noise streams are keyed by
    (seed, candidate index, trial index), so two estimators evaluated with
    the same seed see identical noise (paired comparison), and reruns are
    bit-identical.
    """
    trials = int(trials)
    if trials < 1:
        raise ValueError(f"trials must be at least 1, got {trials}")
    cands = [as_vector(c, "candidate") for c in candidates]
    if not cands:
        raise ValueError("need at least one candidate")
    sigma = float(sigma)
    means = np.zeros(len(cands))
    stderrs = np.zeros(len(cands))
    for ci, y in enumerate(cands):
        errs = np.zeros(trials)
        for ti in range(trials):
            rng = make_rng(seed, ci, ti)
            y_hat = estimator(y + sigma * rng.standard_normal(y.size))
            diff = y_hat - y
            errs[ti] = diff @ diff
        means[ci] = errs.mean()
        stderrs[ci] = errs.std(ddof=1) / math.sqrt(trials) if trials > 1 else 0.0
    return MonteCarloReport(trials, int(seed), means, stderrs, float(means.max()))


def sparse_candidates(inst, count, seed):
    """Random radius-saturating sparse truths: support size at most 3,
    magnitudes re-scaled so the lq mass equals the radius exactly."""
    rng = make_rng(seed)
    out = np.zeros((int(count), inst.n))
    if inst.C == 0.0:
        return out
    for i in range(int(count)):
        s = int(rng.integers(1, 4))
        s = min(s, inst.p)
        idx = rng.choice(inst.p, size=s, replace=False)
        theta = np.zeros(inst.p)
        theta[idx] = rng.uniform(0.2, 1.0, size=s) * rng.choice([-1.0, 1.0], size=s)
        mass = float(np.sum(np.abs(theta) ** inst.q))
        theta *= inst.C / mass ** (1.0 / inst.q)
        out[i] = inst.X @ theta
    return out


def candidate_set(inst, seed, extra=32):
    """Standard risk-evaluation candidates: the 2p signed scaled columns,
    the zero vector, and `extra` random sparse draws."""
    scaled = inst.scaled_design()
    verts = np.concatenate([scaled.T, -scaled.T], axis=0)
    zero = np.zeros((1, inst.n))
    return np.concatenate([verts, zero, sparse_candidates(inst, extra, seed)], axis=0)
