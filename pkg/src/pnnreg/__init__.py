"""Projected nearest neighbor estimation for sparse linear regression.

Submodules: core (types, projections, RNG), width (subspace width
profiles via semidefinite relaxation and rounding), nearest (nearest-point
solvers), estimators (projection / nearest-point / projected / adaptive),
risk (minimax certificates, Monte Carlo harness), bench (gap scenarios),
cli (command-line front end).
"""

__version__ = "0.1.0"

from .core import (
    ProblemInstance,
    ProjectionOperator,
    apply,
    complement,
    eig_sym,
    make_rng,
    orthonormalize,
    sample_gaussian,
)
from .nearest import (
    AxisEllipsoid,
    NNSolution,
    SolveOptions,
    ellipsoid_nearest,
    l1_ls,
    project_l1_ball,
    vertex_vi_residual,
)
from .width import (
    RelaxationResult,
    WidthOptions,
    WidthProfile,
    pca_projection,
    round_projection,
    width_bruteforce,
    width_profile,
    width_relaxation_solve,
)
from .estimators import (
    AdaptiveRecord,
    AdaptiveTrace,
    PNNSelection,
    adaptive_estimate,
    nn_estimate,
    orth_proj_estimate,
    pnn_estimate,
    pnn_select,
    pnn_solve,
)
from .risk import (
    MonteCarloReport,
    RiskCertificate,
    c_q,
    candidate_set,
    euclidean_ball_lower,
    lower_bound,
    mc_risk,
    minimax_certificate,
    sparse_candidates,
    upper_bound,
)
from .bench import bench_ellipsoid, bench_identity, bench_product

__all__ = [
    "AdaptiveRecord",
    "AdaptiveTrace",
    "AxisEllipsoid",
    "MonteCarloReport",
    "NNSolution",
    "PNNSelection",
    "ProblemInstance",
    "ProjectionOperator",
    "RelaxationResult",
    "RiskCertificate",
    "SolveOptions",
    "WidthOptions",
    "WidthProfile",
    "adaptive_estimate",
    "apply",
    "bench_ellipsoid",
    "bench_identity",
    "bench_product",
    "c_q",
    "candidate_set",
    "complement",
    "eig_sym",
    "ellipsoid_nearest",
    "euclidean_ball_lower",
    "l1_ls",
    "lower_bound",
    "make_rng",
    "mc_risk",
    "minimax_certificate",
    "nn_estimate",
    "orth_proj_estimate",
    "orthonormalize",
    "pca_projection",
    "pnn_estimate",
    "pnn_select",
    "pnn_solve",
    "project_l1_ball",
    "round_projection",
    "sample_gaussian",
    "sparse_candidates",
    "upper_bound",
    "vertex_vi_residual",
    "width_bruteforce",
    "width_profile",
    "width_relaxation_solve",
]
