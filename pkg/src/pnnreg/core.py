"""Shared numerical primitives: RNG streams, problem data, projections.

Everything downstream (width solver, estimators, risk bounds, CLI) goes
through the helpers here so that seeding, orthonormality checks and
eigendecomposition conventions stay consistent in one place.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Orthonormality / symmetry tolerances. Absolute on unit-scale quantities.
GRAM_TOL = 1e-10
SYM_TOL = 1e-9

_MAX_SEED = 2**64


def make_rng(seed_or_rng, *stream):
    """Build a reproducible generator for a given integer seed and stream key.

    ``stream`` is a tuple of non-negative ints naming a substream; the same
    (seed, stream) pair always yields the same generator state. Passing an
    existing ``numpy.random.Generator`` returns it unchanged (stream keys are
    only meaningful for integer seeds).
    """
    if isinstance(seed_or_rng, np.random.Generator):
        if stream:
            raise ValueError("stream keys require an integer seed, not a Generator")
        return seed_or_rng
    seed = int(seed_or_rng)
    if not 0 <= seed < _MAX_SEED:
        raise ValueError(f"seed must be in [0, 2**64), got {seed}")
    if stream:
        for s in stream:
            if int(s) < 0:
                raise ValueError("stream keys must be non-negative")
        ss = np.random.SeedSequence(seed, spawn_key=tuple(int(s) for s in stream))
    else:
        ss = np.random.SeedSequence(seed)
    return np.random.Generator(np.random.Philox(ss))


def sample_gaussian(n, sigma, rng):
    """Draw an n-vector of centered Gaussian noise with standard deviation sigma."""
    rng = make_rng(rng)
    return float(sigma) * rng.standard_normal(int(n))


def as_vector(v, name="vector"):
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def as_matrix(m, name="matrix"):
    arr = np.asarray(m, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be two dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


@dataclass(frozen=True)
class ProblemInstance:
    """A regression problem: observations live in R^n, coefficients in R^p.

    The coefficient vector is constrained to the q-quasinorm ball of radius C,
    noise is centered Gaussian with standard deviation sigma. The design X is
    stored read-only; columns are the p regressors.
    """

    X: np.ndarray
    q: float = 1.0
    C: float = 1.0
    sigma: float = 1.0

    def __post_init__(self):
        X = as_matrix(self.X, "design")
        X = X.copy()
        X.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "q", float(self.q))
        object.__setattr__(self, "C", float(self.C))
        object.__setattr__(self, "sigma", float(self.sigma))
        if not 0.0 < self.q <= 1.0:
            raise ValueError(f"q must be in (0, 1], got {self.q}")
        if self.C < 0:
            raise ValueError(f"radius C must be non-negative, got {self.C}")
        if self.sigma < 0:
            raise ValueError(f"sigma must be non-negative, got {self.sigma}")

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def p(self):
        return self.X.shape[1]

    def scaled_design(self):
        """Columns of X scaled by the radius C; the convex hull of +-columns
        (for q = 1) is the set of attainable mean vectors."""
        return self.C * self.X


def orthonormalize(vectors):
    """Orthonormal basis of the span of the inputs, by modified Gram-Schmidt.

    Accepts a sequence of 1-D arrays or a 2-D array whose columns are the
    vectors. Returns a ProjectionOperator whose basis keeps Gram-Schmidt
    order: the first direction is parallel to the first independent input,
    and so on. Inputs with singular value below 1e-10 times the largest are
    treated as dependent and dropped.
    """
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        cols = as_matrix(vectors, "vectors")
    else:
        vs = [as_vector(v) for v in vectors]
        if not vs:
            raise ValueError("need at least one vector")
        cols = np.column_stack(vs)
    n, m = cols.shape
    if m == 0:
        return ProjectionOperator(np.zeros((n, 0)))
    svals = np.linalg.svd(cols, compute_uv=False)
    drop = GRAM_TOL * max(svals[0], 1.0)
    out = []
    for j in range(m):
        v = cols[:, j].copy()
        # two passes: the second mops up cancellation error from the first
        for _ in range(2):
            for u in out:
                v -= (u @ v) * u
        nv = np.linalg.norm(v)
        if nv > drop:
            out.append(v / nv)
    if not out:
        return ProjectionOperator(np.zeros((n, 0)))
    return ProjectionOperator(np.column_stack(out))


@dataclass(frozen=True)
class ProjectionOperator:
    """Orthogonal projection onto the span of an orthonormal basis.

    ``basis`` is (n, d) with orthonormal columns; d = 0 (zero map) and
    d = n (identity) are both allowed. The basis array is frozen.
    """

    basis: np.ndarray

    def __post_init__(self):
        B = as_matrix(self.basis, "basis")
        n, d = B.shape
        if d > n:
            raise ValueError(f"basis has more columns ({d}) than rows ({n})")
        if d > 0:
            gram = B.T @ B
            err = np.max(np.abs(gram - np.eye(d)))
            if err > GRAM_TOL * 100:
                raise ValueError(f"basis columns not orthonormal, gram error {err:.3e}")
        B = B.copy()
        B.setflags(write=False)
        object.__setattr__(self, "basis", B)

    @classmethod
    def identity(cls, n):
        return cls(np.eye(int(n)))

    @classmethod
    def empty(cls, n):
        return cls(np.zeros((int(n), 0)))

    @property
    def n(self):
        return self.basis.shape[0]

    @property
    def dim(self):
        return self.basis.shape[1]

    def matrix(self):
        return self.basis @ self.basis.T

    def apply(self, v):
        """Project v; v may be a vector or a matrix of stacked column vectors."""
        B = self.basis
        if B.shape[1] == 0:
            return np.zeros_like(np.asarray(v, dtype=float))
        return B @ (B.T @ np.asarray(v, dtype=float))


def apply(P, v):
    return P.apply(v)


def complement(P):
    """Projection onto the orthogonal complement of P's range."""
    n, d = P.basis.shape
    if d == 0:
        return ProjectionOperator.identity(n)
    if d == n:
        return ProjectionOperator.empty(n)
    # full SVD of the basis: trailing left singular vectors span the complement
    U, _, _ = np.linalg.svd(P.basis, full_matrices=True)
    return ProjectionOperator(U[:, d:])


def eig_sym(M):
    """Eigendecomposition of a symmetric matrix.

    Returns (w, V) with eigenvalues sorted in decreasing order and V's columns
    the matching eigenvectors, each sign-normalized so its largest-magnitude
    component is positive. Raises on visibly asymmetric input.
    """
    M = as_matrix(M, "matrix")
    if M.shape[0] != M.shape[1]:
        raise ValueError(f"matrix must be square, got {M.shape}")
    scale = max(1.0, float(np.max(np.abs(M))) if M.size else 1.0)
    if np.max(np.abs(M - M.T)) > SYM_TOL * scale:
        raise ValueError("matrix is not symmetric")
    Ms = 0.5 * (M + M.T)
    w, V = np.linalg.eigh(Ms)
    w = w[::-1].copy()
    V = V[:, ::-1].copy()
    for j in range(V.shape[1]):
        i = int(np.argmax(np.abs(V[:, j])))
        if V[i, j] < 0:
            V[:, j] = -V[:, j]
    return w, V
