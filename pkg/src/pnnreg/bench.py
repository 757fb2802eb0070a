"""Benchmark scenarios where the estimator gaps are visible at desk scale.

Three setups, each returning a JSON-ready dict:

  ellipsoid: a stretched axis ellipsoid (one axis of length n^(1/4), the
    rest unit). Nearest-point estimation at the long tip drags in noise
    from every short axis, while projecting onto the long axis alone keeps
    the error at one noise unit. Risks are measured for n in {64, 256,
    1024} together with the fitted log-log growth exponent.

  product: a product body, a 64-dimensional ellipsoid with 4 long axes
    stacked with an 8-dimensional l1 ball. Compares plain nearest-point,
    the projected variant whose raw part is the 4 long axes, and a family
    of coordinate projections.

  identity: identity design at n = 256 with noise 1/sqrt(n), the full
    projected-estimator pipeline (width profile, split selection, fit)
    against the best fixed-projection risk formula.
"""

from __future__ import annotations

import numpy as np

from .core import ProblemInstance
from .estimators import pnn_estimate, pnn_select
from .nearest import AxisEllipsoid, ellipsoid_nearest, project_l1_ball
from .risk import mc_risk
from .width import WidthOptions, width_profile


def _report_row(rep):
    return {
        "means": [float(v) for v in rep.means],
        "stderrs": [float(v) for v in rep.stderrs],
        "risk": float(rep.max_mse),
    }


def bench_ellipsoid(trials=200, seed=42):
    """Nearest-point vs single-axis projection on a stretched ellipsoid."""
    rows = []
    ns = (64, 256, 1024)
    for n in ns:
        weights = np.ones(n)
        weights[-1] = 1.0 / np.sqrt(n)
        body = AxisEllipsoid(weights)
        truth = np.zeros(n)
        truth[-1] = float(n) ** 0.25

        def nearest(v):
            return ellipsoid_nearest(body, v)

        def keep_last(v):
            out = np.zeros_like(v)
            out[-1] = v[-1]
            return out

        nn = mc_risk(nearest, [truth], 1.0, trials, seed)
        proj = mc_risk(keep_last, [truth], 1.0, trials, seed)
        rows.append(
            {
                "n": int(n),
                "nn_risk": float(nn.max_mse),
                "nn_se": float(nn.stderrs[0]),
                "proj_risk": float(proj.max_mse),
                "proj_se": float(proj.stderrs[0]),
                "ratio": float(nn.max_mse / proj.max_mse),
            }
        )
    slope = np.polyfit(np.log(ns), np.log([r["nn_risk"] for r in rows]), 1)[0]
    return {
        "scenario": "ellipsoid",
        "trials": int(trials),
        "sigma": 1.0,
        "rows": rows,
        "growth_exponent": float(slope),
        "ratio_at_largest": rows[-1]["ratio"],
    }


def bench_product(trials=500, seed=42):
    """Estimator gap on an ellipsoid-times-l1-ball product body.

    Ambient dimension 72 = 64 + 8. The ellipsoid block has 4 long axes of
    length sqrt(8) (weight 1/8) and 60 unit axes; the l1 block has radius
    sqrt(8). Nearest-point maps on a product split blockwise.
    """
    k = 4
    ell_dim = 64
    l1_dim = 8
    l1_radius = float(np.sqrt(8.0))
    long_len = float(np.sqrt(8.0))
    weights = np.concatenate([np.full(k, 1.0 / 8.0), np.ones(ell_dim - k)])
    body = AxisEllipsoid(weights)
    short_ball = AxisEllipsoid(np.ones(ell_dim - k))

    def nearest_full(v):
        return np.concatenate(
            [ellipsoid_nearest(body, v[:ell_dim]), project_l1_ball(v[ell_dim:], l1_radius)]
        )

    def projected_nn(v):
        # raw pass-through on the 4 long axes, nearest-point on the rest
        return np.concatenate(
            [
                v[:k],
                ellipsoid_nearest(short_ball, v[k:ell_dim]),
                project_l1_ball(v[ell_dim:], l1_radius),
            ]
        )

    masks = {
        "long_axes": (0, k),
        "long_axes+l1": None,  # handled explicitly below
        "ellipsoid": (0, ell_dim),
        "l1": (ell_dim, ell_dim + l1_dim),
        "all": (0, ell_dim + l1_dim),
        "none": (0, 0),
    }

    def projector(name):
        keep = np.zeros(ell_dim + l1_dim, dtype=bool)
        if name == "long_axes+l1":
            keep[:k] = True
            keep[ell_dim:] = True
        else:
            a, b = masks[name]
            keep[a:b] = True

        def est(v):
            return np.where(keep, v, 0.0)

        return est

    tip = np.zeros(ell_dim + l1_dim)
    tip[0] = long_len
    vertex = np.zeros(ell_dim + l1_dim)
    vertex[ell_dim] = l1_radius
    short_tip = np.zeros(ell_dim + l1_dim)
    short_tip[k] = 1.0
    candidates = [tip + vertex, short_tip + vertex, tip, np.zeros(ell_dim + l1_dim)]

    nn = mc_risk(nearest_full, candidates, 1.0, trials, seed)
    pnn = mc_risk(projected_nn, candidates, 1.0, trials, seed)
    proj_reports = {
        name: mc_risk(projector(name), candidates, 1.0, trials, seed) for name in masks
    }
    best_name = min(proj_reports, key=lambda m: proj_reports[m].max_mse)
    return {
        "scenario": "product",
        "trials": int(trials),
        "sigma": 1.0,
        "candidates": len(candidates),
        "nn": _report_row(nn),
        "pnn": _report_row(pnn),
        "projections": {m: _report_row(r) for m, r in proj_reports.items()},
        "best_projection": best_name,
        "best_projection_risk": float(proj_reports[best_name].max_mse),
    }


def bench_identity(trials=200, seed=42):
    """Projected estimator vs the fixed-projection risk formula, identity design."""
    n = 256
    sigma = 1.0 / np.sqrt(n)
    inst = ProblemInstance(np.eye(n), q=1.0, C=1.0, sigma=float(sigma))
    ks = [0, 1, 2, 4, 8, 16, 32, 64, 128, 256]
    profile = width_profile(inst.X, WidthOptions(repeats=16, seed=seed, ks=tuple(ks)))
    scaled = profile.scaled(inst.C)
    sel = pnn_select(inst, scaled)
    proj_risk = float(np.min(scaled.ks * inst.sigma**2 + scaled.achieved**2))

    e1 = np.zeros(n)
    e1[0] = 1.0
    spread = np.zeros(n)
    spread[:3] = 1.0 / 3.0
    candidates = [np.zeros(n), e1, spread]

    rep = mc_risk(lambda v: pnn_estimate(inst, v, sel), candidates, inst.sigma, trials, seed)
    return {
        "scenario": "identity",
        "n": n,
        "sigma": float(sigma),
        "trials": int(trials),
        "ks": [int(v) for v in ks],
        "k_star": int(sel.k_star),
        "achieved": [float(v) for v in scaled.achieved],
        "proj_risk": proj_risk,
        "pnn": _report_row(rep),
        "pnn_risk": float(rep.max_mse),
        "ratio": float(rep.max_mse / proj_risk),
    }
