"""Core iteration: feasibility and optimality directions, the tangent
intersection projection, and the retraction-based update loop.

One step moves a point X on the inner manifold M along

    alpha * G_h(X) + beta * G_f(X),

followed by a retraction back onto M.  G_h is the Gauss--Newton direction
for ``h(X) = 0`` projected onto the tangent space of M; G_f is the
negative objective gradient projected onto the subspace
S(X) = ker(Dh_X) within T_M(X).  The two directions are orthogonal by
construction, so feasibility and objective progress do not fight each
other.
"""

import csv
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

import numpy as np

from .errors import DimensionGuard, GotdError
from .manifolds import as_dense
from .solvers import pinv_apply

GENERIC_Q_LIMIT = 4096


@dataclass
class Problem:
    """Objective + constraint pair defining one run.

    ``f`` and ``grad_f`` act on dense ambient matrices.  When
    ``fast_projector`` is set it replaces the generic dense projection
    onto S(X); ``extra_metric`` is evaluated on traced iterates
    (test error, sparsity, cost ratio, ...).
    """

    manifold: object
    constraint: object
    f: Callable[[np.ndarray], float]
    grad_f: Callable[[np.ndarray], np.ndarray]
    fast_projector: Optional[Callable[[object, np.ndarray], np.ndarray]] = None
    extra_metric: Optional[Callable[[np.ndarray], float]] = None
    name: str = ""


@dataclass
class GotdConfig:
    alpha: float = 1.0
    beta: float = 1.0
    max_iter: int = 2000
    tol: float = 1e-10
    trace_every: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("step sizes must be positive")
        if self.tol < 0:
            raise ValueError("tolerance must be nonnegative")
        if self.max_iter < 0 or self.trace_every < 1:
            raise ValueError("invalid iteration budget")


@dataclass
class TraceRecord:
    iteration: int
    wall_seconds: float
    f_value: float
    feas_norm: float
    gh_norm: float
    gf_norm: float
    extra_metric: Optional[float] = None


class RunStatus(Enum):
    CONVERGED = "converged"
    MAX_ITER = "max_iter"
    ABORTED = "aborted"


@dataclass
class GotdResult:
    point: object
    trace: list
    status: RunStatus
    reason: str = ""

    @property
    def iterations(self) -> int:
        return self.trace[-1].iteration if self.trace else 0


def gauss_newton_direction(constraint, X: np.ndarray) -> np.ndarray:
    """d = -Dh* (Dh Dh*)^{-1} h(X): the least-squares step toward {h = 0}
    within the normal space of the level set through X."""
    hv = constraint.value(X)
    lam = constraint.gram_solve(X, hv)
    return -constraint.dh_adjoint(X, lam)


def feasibility_direction(manifold, constraint, point, X: Optional[np.ndarray] = None):
    """Gauss--Newton direction projected onto the tangent space of M."""
    if X is None:
        X = as_dense(point)
    return manifold.tangent_project(point, gauss_newton_direction(constraint, X))


def tangent_intersection_project(
    manifold,
    constraint,
    point,
    xi: np.ndarray,
    X: Optional[np.ndarray] = None,
    rel_tol: float = 1e-12,
):
    """Orthogonal projection of xi onto S(X), the part of the tangent
    space of M annihilated by Dh_X.

    Materializes Phi = P_T . Dh* columnwise, forms the q x q reduced
    matrix B = Dh . Phi and applies its pseudo-inverse:

        P_S(xi) = xi_bar - Phi( B^+ Dh(xi_bar) ),   xi_bar = P_T(xi).

    The dense path is refused for q > 4096; problems that large carry a
    specialized ``fast_projector``.
    """
    q = constraint.q
    if q > GENERIC_Q_LIMIT:
        raise DimensionGuard(
            f"constraint dimension {q} exceeds the dense-path limit "
            f"{GENERIC_Q_LIMIT}; use a specialized projector"
        )
    if X is None:
        X = as_dense(point)
    xi_bar = manifold.tangent_project(point, xi)
    rhs = constraint.dh(X, xi_bar)

    basis = np.eye(q)
    B = np.empty((q, q))
    for j in range(q):
        col = manifold.tangent_project(point, constraint.dh_adjoint(X, basis[j]))
        B[:, j] = constraint.dh(X, col)
    B = 0.5 * (B + B.T)
    lam = pinv_apply(B, rhs, rel_tol=rel_tol)
    return xi_bar - manifold.tangent_project(point, constraint.dh_adjoint(X, lam))


def optimality_direction(problem: Problem, point, X: Optional[np.ndarray] = None):
    """Projection of -grad f onto S(X), through the fast projector when
    the problem provides one."""
    if X is None:
        X = as_dense(point)
    xi = -problem.grad_f(X)
    if problem.fast_projector is not None:
        return problem.fast_projector(point, xi)
    return tangent_intersection_project(
        problem.manifold, problem.constraint, point, xi, X=X
    )


def gotd_step(problem: Problem, point, alpha: float, beta: float):
    """One update: returns (next point, ||G_h||, ||G_f||)."""
    X = as_dense(point)
    gh = feasibility_direction(problem.manifold, problem.constraint, point, X=X)
    gf = optimality_direction(problem, point, X=X)
    new_point = problem.manifold.retract(point, alpha * gh + beta * gf)
    return new_point, float(np.linalg.norm(gh)), float(np.linalg.norm(gf))


def gotd_run(problem: Problem, x0, config: GotdConfig) -> GotdResult:
    """Iterate from x0 on M until max{||G_h||, ||G_f||} <= tol or the
    budget runs out.

    The trace records every ``trace_every``-th iterate plus the final
    one; wall time is measured from the first iteration.  Any numerical
    failure (rank collapse, singular Gram, degenerate retraction,
    non-finite values) aborts the run with the iterate index in the
    reason string.
    """
    point = x0
    trace: list = []
    t_start = time.perf_counter()
    for k in range(config.max_iter + 1):
        try:
            with np.errstate(over="ignore", invalid="ignore"):
                X = as_dense(point)
                f_val = float(problem.f(X))
                feas = float(np.linalg.norm(problem.constraint.value(X)))
                gh_vec = feasibility_direction(problem.manifold, problem.constraint, point, X=X)
                gf_vec = optimality_direction(problem, point, X=X)
        except (GotdError, np.linalg.LinAlgError) as exc:
            return GotdResult(
                point, trace, RunStatus.ABORTED, f"iteration {k}: {exc}"
            )
        gh = float(np.linalg.norm(gh_vec))
        gf = float(np.linalg.norm(gf_vec))
        if not np.isfinite([f_val, feas, gh, gf]).all() or feas > 1e12:
            return GotdResult(
                point, trace, RunStatus.ABORTED,
                f"iteration {k}: diverged (non-finite or huge residual)",
            )
        done = max(gh, gf) <= config.tol or k == config.max_iter
        if k % config.trace_every == 0 or done:
            extra = problem.extra_metric(X) if problem.extra_metric else None
            trace.append(
                TraceRecord(
                    k, time.perf_counter() - t_start, f_val, feas, gh, gf, extra
                )
            )
        if done:
            status = RunStatus.CONVERGED if max(gh, gf) <= config.tol else RunStatus.MAX_ITER
            return GotdResult(point, trace, status)
        try:
            point = problem.manifold.retract(
                point, config.alpha * gh_vec + config.beta * gf_vec
            )
        except (GotdError, np.linalg.LinAlgError) as exc:
            return GotdResult(
                point, trace, RunStatus.ABORTED, f"iteration {k}: {exc}"
            )
    raise AssertionError("unreachable")


def lyapunov_value(f_val: float, feas_norm: float, lam: float, c_h: float = 1.0) -> float:
    """Balance of objective and feasibility: f + lam * (||h|| / c_h)."""
    return f_val + lam * (feas_norm / c_h)


@dataclass
class LyapunovMonitor:
    """Tracks f + lam * ||h|| / c_h along a run."""

    lam: float
    c_h: float = 1.0
    values: list = field(default_factory=list)

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError("balance factor must be positive")

    def update(self, f_val: float, feas_norm: float) -> float:
        v = lyapunov_value(f_val, feas_norm, self.lam, self.c_h)
        self.values.append(v)
        return v

    def is_monotone(self, after: int = 5, slack: float = 1.01,
                    noise_floor: float = 0.0) -> bool:
        """Non-increase up to a multiplicative slack.

        ``noise_floor`` adds an absolute allowance of noise_floor *
        max(values): once the sequence has decayed that far below its
        peak, consecutive differences are rounding residue and cannot
        certify anything.
        """
        v = self.values[after:]
        absolute = noise_floor * max(self.values, default=0.0)
        return all(b <= slack * a + absolute for a, b in zip(v, v[1:]))


def find_monotone_balance(
    f_vals,
    feas_norms,
    max_power: int = 10,
    c_h: float = 1.0,
    after: int = 5,
    slack: float = 1.01,
    noise_floor: float = 0.0,
) -> Optional[float]:
    """Smallest power-of-two balance factor making the Lyapunov sequence
    non-increasing (up to ``slack``) after the warm-up iterations, or
    None if no power up to 2**max_power works."""
    for p in range(max_power + 1):
        mon = LyapunovMonitor(2.0**p, c_h)
        for f_val, feas in zip(f_vals, feas_norms):
            mon.update(f_val, feas)
        if mon.is_monotone(after=after, slack=slack, noise_floor=noise_floor):
            return 2.0**p
    return None


TRACE_HEADER = ["iter", "time_s", "f", "feas_norm", "gh_norm", "gf_norm", "extra"]


def write_trace_csv(trace, path) -> None:
    """Serialize trace records; floats in full-precision scientific
    notation so files round-trip exactly."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_HEADER)
        for rec in trace:
            writer.writerow(
                [
                    rec.iteration,
                    f"{rec.wall_seconds:.17e}",
                    f"{rec.f_value:.17e}",
                    f"{rec.feas_norm:.17e}",
                    f"{rec.gh_norm:.17e}",
                    f"{rec.gf_norm:.17e}",
                    "" if rec.extra_metric is None else f"{rec.extra_metric:.17e}",
                ]
            )


def read_trace_csv(path):
    """Parse a trace file back into records."""
    out = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != TRACE_HEADER:
            raise ValueError(f"unexpected trace header: {header}")
        for row in reader:
            out.append(
                TraceRecord(
                    int(row[0]),
                    float(row[1]),
                    float(row[2]),
                    float(row[3]),
                    float(row[4]),
                    float(row[5]),
                    None if row[6] == "" else float(row[6]),
                )
            )
    return out
