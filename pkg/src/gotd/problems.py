"""The three benchmark problems: spherical data fitting, low-rank
approximation of hyperbolic embeddings (synthetic), and compressed modes.

Each experiment comes as a data container, a  deterministic generator,
objective/gradient functions, an initializer, and a ``make_*_problem``
wiring function that assembles a :class:`~gotd.algorithm.Problem`.
"""

from dataclasses import dataclass

import numpy as np

from .algorithm import Problem
from .constraints import HyperboloidConstraint, ObliqueConstraint, StiefelConstraint
from .errors import DomainViolation, InfeasibleSampling
from .fastproj import build_workspace, project_hyperboloid_lowrank
from .manifolds import (
    FactoredPoint,
    FixedRankManifold,
    SparsityManifold,
    SupportPoint,
    as_dense,
)

ARCCOSH_SERIES_CUT = 1e-8
LORENTZ_SLACK = 1e-9


# ---------------------------------------------------------------------------
# spherical data fitting: unit-norm rows meet fixed rank
# ---------------------------------------------------------------------------

@dataclass
class SphereFitProblem:
    target: np.ndarray          # ground truth on the oblique set
    omega: tuple                # (rows, cols) of observed entries
    gamma: tuple                # (rows, cols) of held-out test entries
    m: int
    n: int
    r: int
    oversampling: float
    seed: int


def gen_sphere_data(m: int, n: int, r: int, oversampling: float, seed: int) -> SphereFitProblem:
    """Random rank-r ground truth with unit rows and disjoint train/test
    entry sets of equal size |Omega| = round(OS * r * (m + n - r))."""
    nobs = round(oversampling * r * (m + n - r))
    if 2 * nobs > m * n:
        raise InfeasibleSampling(
            f"need {2 * nobs} distinct entries but the matrix has {m * n}"
        )
    rng = np.random.default_rng(seed)
    U = np.linalg.qr(rng.standard_normal((m, r)))[0]
    V = np.linalg.qr(rng.standard_normal((n, r)))[0]
    sig = rng.uniform(0.0, 1.0, r)
    A = (U * sig) @ V.T
    A /= np.linalg.norm(A, axis=1, keepdims=True)
    flat = rng.choice(m * n, size=2 * nobs, replace=False)
    omega = np.unravel_index(np.sort(flat[:nobs]), (m, n))
    gamma = np.unravel_index(np.sort(flat[nobs:]), (m, n))
    return SphereFitProblem(A, omega, gamma, m, n, r, oversampling, seed)


def sphere_objective(prob: SphereFitProblem, X) -> float:
    X = as_dense(X)
    return 0.5 * float(np.linalg.norm(X[prob.omega] - prob.target[prob.omega]) ** 2)


def sphere_grad(prob: SphereFitProblem, X) -> np.ndarray:
    X = as_dense(X)
    g = np.zeros_like(X)
    g[prob.omega] = X[prob.omega] - prob.target[prob.omega]
    return g


def sphere_test_error(prob: SphereFitProblem, X) -> float:
    """Relative error on the held-out entries."""
    X = as_dense(X)
    num = np.linalg.norm(X[prob.gamma] - prob.target[prob.gamma])
    return float(num / np.linalg.norm(prob.target[prob.gamma]))


def init_sphere(prob: SphereFitProblem, seed: int) -> FactoredPoint:
    """Product of a unit-row random factor and a random orthonormal
    factor, projected to rank r."""
    rng = np.random.default_rng(seed)
    H0 = rng.standard_normal((prob.m, prob.r))
    H0 /= np.linalg.norm(H0, axis=1, keepdims=True)
    V0 = np.linalg.qr(rng.standard_normal((prob.n, prob.r)))[0]
    return FixedRankManifold(prob.m, prob.n, prob.r).project(H0 @ V0.T)


def make_sphere_problem(prob: SphereFitProblem) -> Problem:
    manifold = FixedRankManifold(prob.m, prob.n, prob.r)
    constraint = ObliqueConstraint(prob.m, prob.n)

    def projector(point, xi):
        # rows of a rank-r factored point lie in span(V), so the adjoint
        # image 2 Diag(lam) X is already tangent and the intersection
        # projection collapses to a single diagonal Gram solve
        X = point.dense()
        eta = manifold.tangent_project(point, xi)
        lam = constraint.gram_solve(X, constraint.dh(X, eta))
        return eta - constraint.dh_adjoint(X, lam)

    return Problem(
        manifold=manifold,
        constraint=constraint,
        f=lambda X: sphere_objective(prob, X),
        grad_f=lambda X: sphere_grad(prob, X),
        fast_projector=projector,
        extra_metric=lambda X: sphere_test_error(prob, X),
        name="sphere",
    )


# ---------------------------------------------------------------------------
# hyperbolic embedding approximation: hyperboloid columns meet fixed rank
# ---------------------------------------------------------------------------

@dataclass
class HyperbolicFitProblem:
    targets: np.ndarray         # (n+1, m), columns on the hyperboloid
    n: int
    m: int
    r_true: int
    seed: int
    tail_scale: float


def gen_hyperbolic_data(
    n: int, m: int, r_true: int, seed: int, tail_scale: float = 0.3
) -> HyperbolicFitProblem:
    """Synthetic embeddings: a rank-r_true spatial signal (scale 0.5)
    plus an isotropic spatial tail, each column lifted exactly onto the
    hyperboloid.

    With tail_scale = 0 the spatial part has rank exactly r_true and the
    matrix rank r_true + 1; a positive tail makes the data full rank so
    that a rank-(r+1) approximation is a genuine compression task.
    """
    rng = np.random.default_rng(seed)
    Z = 0.5 * rng.standard_normal((r_true, m))
    W = np.linalg.qr(rng.standard_normal((n, r_true)))[0]
    spatial = W @ Z
    if tail_scale > 0.0:
        spatial = spatial + tail_scale * rng.standard_normal((n, m))
    top = np.sqrt(1.0 + np.einsum("ij,ij->j", spatial, spatial))
    return HyperbolicFitProblem(np.vstack([top, spatial]), n, m, r_true, seed, tail_scale)


def _lorentz_gaps(prob: HyperbolicFitProblem, X: np.ndarray) -> np.ndarray:
    """u_i = -<x_i, target_i>_J, clamped at 1 from below."""
    j = np.ones(prob.n + 1)
    j[0] = -1.0
    u = -np.einsum("ij,ij->j", X, j[:, None] * prob.targets)
    if np.any(u < 1.0 - LORENTZ_SLACK):
        raise DomainViolation(
            f"Lorentz product {u.min():.6e} below 1; columns left the sheet"
        )
    return np.maximum(u, 1.0)


def hyperbolic_objective(prob: HyperbolicFitProblem, X) -> float:
    """Sum of squared hyperbolic distances to the target columns."""
    u = _lorentz_gaps(prob, as_dense(X))
    return float(np.sum(np.arccosh(u) ** 2))


def hyperbolic_grad(prob: HyperbolicFitProblem, X) -> np.ndarray:
    """Column i is -2 g(u_i) J target_i with g(u) = arccosh(u)/sqrt(u^2-1),
    continued by its series value 1 - (u - 1)/3 near u = 1."""
    X = as_dense(X)
    u = _lorentz_gaps(prob, X)
    safe = u > 1.0 + ARCCOSH_SERIES_CUT
    us = np.where(safe, u, 2.0)
    g = np.where(
        safe,
        np.arccosh(us) / np.sqrt(us * us - 1.0),
        1.0 - (u - 1.0) / 3.0,
    )
    j = np.ones(prob.n + 1)
    j[0] = -1.0
    return -2.0 * (j[:, None] * prob.targets) * g[None, :]


def init_hyperbolic(prob: HyperbolicFitProblem, r: int) -> FactoredPoint:
    """Lift initialization: project the spatial block onto its top-r
    left singular subspace, re-lift each column, and truncate to rank r+1."""
    spatial = prob.targets[1:, :]
    U, _, Vt = np.linalg.svd(spatial, full_matrices=False)
    Ur = U[:, :r]
    Zr = Ur.T @ spatial
    top = np.sqrt(1.0 + np.einsum("ij,ij->j", Zr, Zr))
    X0 = np.vstack([top, Ur @ Zr])
    return FixedRankManifold(prob.n + 1, prob.m, r + 1).project(X0)


def make_hyperbolic_problem(prob: HyperbolicFitProblem, r: int) -> Problem:
    manifold = FixedRankManifold(prob.n + 1, prob.m, r + 1)
    constraint = HyperboloidConstraint(prob.n, prob.m)

    def projector(point, xi):
        ws = build_workspace(point, constraint.j_diag)
        return project_hyperboloid_lowrank(point, ws, xi)

    return Problem(
        manifold=manifold,
        constraint=constraint,
        f=lambda X: hyperbolic_objective(prob, X),
        grad_f=lambda X: hyperbolic_grad(prob, X),
        fast_projector=projector,
        name="hyperbolic",
    )


# ---------------------------------------------------------------------------
# compressed modes: sparsity set meets orthonormal columns
# ---------------------------------------------------------------------------

@dataclass
class CompressedModesProblem:
    hamiltonian: np.ndarray     # (n, n) discretized -0.5 d^2/dx^2
    n: int
    p: int
    length: float
    rho: float
    s: int
    beta_default: float


def gen_modes_problem(n: int, p: int, length: float, rho: float) -> CompressedModesProblem:
    """Free-electron Hamiltonian on [0, length] with n interior grid
    points; sparsity budget s = round(rho * n * p)."""
    h = length / (n + 1)
    A = (
        np.diag(np.full(n, 2.0))
        + np.diag(np.full(n - 1, -1.0), 1)
        + np.diag(np.full(n - 1, -1.0), -1)
    ) / (2.0 * h * h)
    s = round(rho * n * p)
    return CompressedModesProblem(A, n, p, length, rho, s, length**2 / (4.0 * n**2))


def modes_objective(prob: CompressedModesProblem, X) -> float:
    X = as_dense(X)
    return float(np.sum(X * (prob.hamiltonian @ X)))


def modes_grad(prob: CompressedModesProblem, X) -> np.ndarray:
    return 2.0 * prob.hamiltonian @ as_dense(X)


def sparsity_ratio(X) -> float:
    """Fraction of exactly-zero entries."""
    X = as_dense(X)
    return (X.size - np.count_nonzero(X)) / X.size


def init_modes(prob: CompressedModesProblem, seed: int) -> SupportPoint:
    """Random orthonormal wave functions hard-thresholded onto the
    sparsity set."""
    rng = np.random.default_rng(seed)
    Q = np.linalg.qr(rng.standard_normal((prob.n, prob.p)))[0]
    return SparsityManifold(prob.n, prob.p, prob.s).project(Q)


def make_modes_problem(prob: CompressedModesProblem) -> Problem:
    return Problem(
        manifold=SparsityManifold(prob.n, prob.p, prob.s),
        constraint=StiefelConstraint(prob.n, prob.p),
        f=lambda X: modes_objective(prob, X),
        grad_f=lambda X: modes_grad(prob, X),
        extra_metric=sparsity_ratio,
        name="modes",
    )
