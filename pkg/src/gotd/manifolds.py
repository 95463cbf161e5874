"""Inner manifolds the iterates live on: fixed-rank matrices and the
fixed-cardinality (sparsity) set.

Each manifold implements the same small contract: ``tangent_project``,
``retract`` and ``project`` (metric projection from the ambient space).
Points carry their own structure -- a thin SVD triple for fixed rank, a
value/support pair for sparsity -- and ``dense()`` recovers the ambient
matrix.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateStep, RankDeficient, ShapeMismatch
from .solvers import RANK_RTOL, truncated_svd

TANGENT_CHECK_RTOL = 1e-8


@dataclass(frozen=True)
class FactoredPoint:
    """Rank-r matrix stored as a thin SVD triple (U, sigma, V).

    ``u`` is (m, r) and ``v`` is (n, r), both with orthonormal columns;
    ``sigma`` holds the positive, nonincreasing singular values.
    """

    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        r = self.sigma.shape[0]
        if self.u.ndim != 2 or self.v.ndim != 2 or self.sigma.ndim != 1:
            raise ShapeMismatch("expected u (m,r), sigma (r,), v (n,r)")
        if self.u.shape[1] != r or self.v.shape[1] != r:
            raise ShapeMismatch("factor widths do not match sigma")
        eye = np.eye(r)
        if (
            np.abs(self.u.T @ self.u - eye).max() > 1e-12
            or np.abs(self.v.T @ self.v - eye).max() > 1e-12
        ):
            raise ShapeMismatch("factors are not orthonormal to 1e-12")
        if np.any(self.sigma <= 0.0) or np.any(np.diff(self.sigma) > 0.0):
            raise RankDeficient("sigma must be positive and nonincreasing")

    @property
    def shape(self):
        return (self.u.shape[0], self.v.shape[0])

    @property
    def rank(self) -> int:
        return self.sigma.shape[0]

    def dense(self) -> np.ndarray:
        return (self.u * self.sigma) @ self.v.T


@dataclass(frozen=True)
class SupportPoint:
    """Matrix with exactly s nonzeros, together with its support mask."""

    values: np.ndarray
    support: np.ndarray  # boolean mask, same shape as values

    def __post_init__(self):
        if self.values.shape != self.support.shape:
            raise ShapeMismatch("values and support shapes differ")
        if np.any(self.values[~self.support] != 0.0):
            raise ShapeMismatch("nonzero entry outside the support")
        if np.any(self.values[self.support] == 0.0):
            raise DegenerateStep("zero entry inside the support")

    @property
    def shape(self):
        return self.values.shape

    @property
    def nnz(self) -> int:
        return int(self.support.sum())

    def dense(self) -> np.ndarray:
        return self.values


def as_dense(x) -> np.ndarray:
    """Ambient matrix of a manifold point or a plain array."""
    if isinstance(x, np.ndarray):
        return x
    return x.dense()


class FixedRankManifold:
    """Matrices of rank exactly r in R^{m x n}."""

    def __init__(self, m: int, n: int, r: int):
        if not 1 <= r <= min(m, n):
            raise ShapeMismatch(f"rank {r} out of range for {m} x {n}")
        self.m = m
        self.n = n
        self.r = r

    def _check(self, X: FactoredPoint, Z: np.ndarray):
        if X.shape != (self.m, self.n) or X.rank != self.r:
            raise ShapeMismatch("point does not belong to this manifold")
        if Z.shape != (self.m, self.n):
            raise ShapeMismatch(f"expected ambient shape {(self.m, self.n)}")

    def tangent_project(self, X: FactoredPoint, Z: np.ndarray) -> np.ndarray:
        """Orthogonal projection onto the tangent space at X:
        U U^T Z + Z V V^T - U U^T Z V V^T."""
        self._check(X, Z)
        U, V = X.u, X.v
        UtZ = U.T @ Z
        ZV = Z @ V
        return U @ UtZ + (ZV - U @ (UtZ @ V)) @ V.T

    def retract(self, X: FactoredPoint, eta: np.ndarray) -> FactoredPoint:
        """Metric-projection retraction: best rank-r approximation of X + eta.

        eta must be tangent at X (checked to 1e-8 relative).  The SVD is
        computed on a 2r x 2r core; its singular values are exactly those
        of X + eta, so the result agrees with the dense definition.
        """
        self._check(X, eta)
        U, s, V = X.u, X.sigma, X.v
        r = self.r
        M = U.T @ eta @ V
        Up = eta @ V - U @ M
        Vp = eta.T @ U - V @ M.T

        norm_eta = np.linalg.norm(eta)
        if norm_eta > 0.0:
            tang = U @ (M @ V.T) + Up @ V.T + U @ Vp.T
            defect = np.linalg.norm(eta - tang)
            # the absolute floor tolerates rounding residue in small
            # differences of large tangent vectors near convergence
            if defect > TANGENT_CHECK_RTOL * norm_eta + 1e-12 * float(s[0]):
                raise ValueError(
                    f"eta is not tangent: relative defect {defect / norm_eta:.3e}"
                )

        Qu, Ru = np.linalg.qr(Up)
        Qu = Qu - U @ (U.T @ Qu)  # reinforce against drift in qr
        Qu, R2 = np.linalg.qr(Qu)
        Ru = R2 @ Ru
        Qv, Rv = np.linalg.qr(Vp)
        Qv = Qv - V @ (V.T @ Qv)
        Qv, R2 = np.linalg.qr(Qv)
        Rv = R2 @ Rv

        K = np.zeros((2 * r, 2 * r))
        K[:r, :r] = np.diag(s) + M
        K[:r, r:] = Rv.T
        K[r:, :r] = Ru
        Uk, sk, Vkt = np.linalg.svd(K)
        if sk[r - 1] <= RANK_RTOL * sk[0]:
            raise RankDeficient(
                f"retraction target has numerical rank below {r}"
            )
        Un = np.hstack([U, Qu]) @ Uk[:, :r]
        Vn = np.hstack([V, Qv]) @ Vkt[:r].T
        # one Newton step toward the polar factor keeps the columns
        # orthonormal over long iterations without disturbing sigma
        Un = Un @ (1.5 * np.eye(r) - 0.5 * (Un.T @ Un))
        Vn = Vn @ (1.5 * np.eye(r) - 0.5 * (Vn.T @ Vn))
        return FactoredPoint(Un, sk[:r].copy(), Vn)

    def project(self, Y: np.ndarray) -> FactoredPoint:
        """Metric projection of an ambient matrix: truncated SVD."""
        if Y.shape != (self.m, self.n):
            raise ShapeMismatch(f"expected ambient shape {(self.m, self.n)}")
        U, s, V = truncated_svd(Y, self.r)
        return FactoredPoint(U, s, V)


class SparsityManifold:
    """Matrices in R^{m x n} with exactly s nonzero entries."""

    def __init__(self, m: int, n: int, s: int):
        if not 1 <= s <= m * n:
            raise ShapeMismatch(f"cardinality {s} out of range for {m} x {n}")
        self.m = m
        self.n = n
        self.s = s

    def _check(self, X: SupportPoint, Z: np.ndarray):
        if X.shape != (self.m, self.n) or X.nnz != self.s:
            raise ShapeMismatch("point does not belong to this manifold")
        if Z.shape != (self.m, self.n):
            raise ShapeMismatch(f"expected ambient shape {(self.m, self.n)}")

    def tangent_project(self, X: SupportPoint, Z: np.ndarray) -> np.ndarray:
        """Zero the entries outside the support of X."""
        self._check(X, Z)
        return np.where(X.support, Z, 0.0)

    def retract(self, X: SupportPoint, eta: np.ndarray) -> SupportPoint:
        """Keep the s largest-magnitude entries of X + eta.

        Ties are broken toward the smallest row-major linear index.
        Raises DegenerateStep when X + eta has fewer than s nonzeros.
        """
        self._check(X, eta)
        return self.project(X.values + eta)

    def project(self, Y: np.ndarray) -> SupportPoint:
        """Hard thresholding: keep the s largest entries in magnitude."""
        if Y.shape != (self.m, self.n):
            raise ShapeMismatch(f"expected ambient shape {(self.m, self.n)}")
        if np.count_nonzero(Y) < self.s:
            raise DegenerateStep(
                f"only {np.count_nonzero(Y)} nonzeros available, need {self.s}"
            )
        flat = np.abs(Y).ravel()
        # stable sort on -|Y|: equal magnitudes keep ascending index order
        keep = np.argsort(-flat, kind="stable")[: self.s]
        mask = np.zeros(Y.size, dtype=bool)
        mask[keep] = True
        mask = mask.reshape(Y.shape)
        return SupportPoint(np.where(mask, Y, 0.0), mask)
