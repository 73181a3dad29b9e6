"""
Schatten Linear Algebra
Singular value decompositions, Schatten quasi-norms and the rate formulas
for entropy numbers of the identities S_p^N -> S_q^N.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from config import RANK_TOL, SVD_ORTHO_TOL, SVD_RECON_TOL
from core.errors import InvalidInputError, NumericFailureError
from core.exponents import Exponent, exponent

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SvdFactors:
    """A = u @ diag(sigma) @ v.T with sigma non-increasing."""

    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray

    def reconstruct(self):
        k = self.sigma.shape[0]
        return (self.u[:, :k] * self.sigma) @ self.v[:, :k].T


@dataclass(frozen=True)
class BallSpec:
    """The unit ball B_p^N of S_p^N."""

    n_dim: int
    p: Exponent

    def __post_init__(self):
        if int(self.n_dim) < 1:
            raise InvalidInputError("n_dim must be at least 1", n_dim=self.n_dim)
        object.__setattr__(self, "n_dim", int(self.n_dim))
        object.__setattr__(self, "p", exponent(self.p))


@dataclass(frozen=True)
class RateQuery:
    p: Exponent
    q: Exponent
    entropy_index: int
    n_dim: int

    def __post_init__(self):
        if int(self.entropy_index) < 1 or int(self.n_dim) < 1:
            raise InvalidInputError(
                "entropy_index and n_dim must be at least 1",
                entropy_index=self.entropy_index, n_dim=self.n_dim,
            )
        object.__setattr__(self, "p", exponent(self.p))
        object.__setattr__(self, "q", exponent(self.q))
        object.__setattr__(self, "entropy_index", int(self.entropy_index))
        object.__setattr__(self, "n_dim", int(self.n_dim))


def as_matrix(a):
    """Validate and return ``a`` as a finite 2-D float array."""
    arr = np.asarray(a, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidInputError(f"expected a non-empty matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("matrix has non-finite entries")
    return arr


def _condition_details(a):
    with np.errstate(all="ignore"):
        fro = float(np.linalg.norm(a))
        amax = float(np.max(np.abs(a)))
    return {"shape": list(a.shape), "frobenius": fro, "max_abs": amax}


def svd(a):
    """
    Full singular value decomposition of a real matrix.

    Falls back from the divide-and-conquer driver to the QR driver when
    LAPACK fails to converge.

    Returns:
        SvdFactors with orthogonal u (rows x rows), v (cols x cols)
    """
    a = as_matrix(a)
    try:
        u, s, vt = scipy.linalg.svd(a, full_matrices=True, lapack_driver="gesdd")
    except (np.linalg.LinAlgError, ValueError):
        logger.warning("gesdd did not converge on %s matrix, retrying with gesvd", a.shape)
        try:
            u, s, vt = scipy.linalg.svd(a, full_matrices=True, lapack_driver="gesvd")
        except (np.linalg.LinAlgError, ValueError) as e:
            raise NumericFailureError("SVD did not converge", **_condition_details(a)) from e
    return SvdFactors(u=u, sigma=s, v=vt.T)


def check_svd(a, factors):
    """True when ``factors`` meets the reconstruction and orthogonality tolerances."""
    a = as_matrix(a)
    scale = max(np.linalg.norm(a), 1.0)
    recon = np.linalg.norm(a - factors.reconstruct()) / scale
    ortho_u = np.linalg.norm(factors.u.T @ factors.u - np.eye(factors.u.shape[1]))
    ortho_v = np.linalg.norm(factors.v.T @ factors.v - np.eye(factors.v.shape[1]))
    return recon <= SVD_RECON_TOL and ortho_u <= SVD_ORTHO_TOL and ortho_v <= SVD_ORTHO_TOL


def singular_values(a):
    a = as_matrix(a)
    try:
        return scipy.linalg.svdvals(a)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise NumericFailureError("SVD did not converge", **_condition_details(a)) from e


def lq_norm(x, q):
    """
    The l_q (quasi-)norm of the last axis of ``x``.

    Works on a single vector or a stack of vectors.
    """
    q = exponent(q)
    x = np.abs(np.asarray(x, dtype=float))
    if q.is_inf:
        return np.max(x, axis=-1) if x.shape[-1] else np.zeros(x.shape[:-1])
    if q.value == 1.0:
        return np.sum(x, axis=-1)
    if q.value == 2.0:
        return np.sqrt(np.sum(x * x, axis=-1))
    # Factor out the maximum so small exponents do not underflow.
    top = np.max(x, axis=-1, keepdims=True) if x.shape[-1] else np.zeros(x.shape[:-1] + (1,))
    safe = np.where(top > 0, top, 1.0)
    total = np.sum((x / safe) ** q.value, axis=-1)
    return np.squeeze(safe, axis=-1) * total ** (1.0 / q.value)


def schatten_norm(a, p):
    """(sum_j sigma_j^p)^(1/p); p = inf gives sigma_1."""
    return float(lq_norm(singular_values(a), p))


def schatten_norms(batch, p):
    """Schatten norms of a stack of matrices with shape (B, rows, cols)."""
    batch = np.asarray(batch, dtype=float)
    sigma = np.linalg.svd(batch, compute_uv=False)
    return lq_norm(sigma, p)


def operator_norm(a):
    return schatten_norm(a, math.inf)


def in_ball(a, spec, tol=0.0):
    """Membership in B_p^N up to ``tol``."""
    return schatten_norm(a, spec.p) <= 1.0 + tol


def numerical_rank(a, tol=RANK_TOL):
    """Number of singular values above ``tol * sigma_1``."""
    s = singular_values(a)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol * s[0]))


def truncate_rank(a, rank, subspaces=False):
    """
    Best rank-``rank`` approximation of ``a`` in every unitarily invariant norm.

    With ``subspaces=True`` also returns the kept left and right singular vectors.
    """
    if rank < 1:
        raise InvalidInputError("rank must be at least 1", rank=rank)
    f = svd(a)
    r = min(rank, f.sigma.shape[0])
    u, v = f.u[:, :r], f.v[:, :r]
    approx = (u * f.sigma[:r]) @ v.T
    return (approx, u, v) if subspaces else approx


def embedding_norm(p, q, n_dim):
    """Norm of the identity S_p^N -> S_q^N, N^max(0, 1/q - 1/p)."""
    p, q = exponent(p), exponent(q)
    return float(n_dim) ** max(0.0, q.inv - p.inv)


def theory_rate(query):
    """
    Order of e_n(S_p^N -> S_q^N) with all constants set to 1.

    Args:
        query: RateQuery with p, q, n (entropy_index) and N (n_dim)

    Returns:
        The piecewise rate. On the closed interval N <= n <= N^2 the
        middle branch (N/n)^(1/p-1/q) is used when p < q.
    """
    p, q = query.p, query.q
    n, big_n = query.entropy_index, query.n_dim
    tail = 2.0 ** (-n / big_n**2) * float(big_n) ** (q.inv - p.inv)
    if q.value <= p.value:
        return tail
    if n <= big_n:
        return 1.0
    if n <= big_n**2:
        return (big_n / n) ** (p.inv - q.inv)
    return tail


def factorization_upper(p, q, entropy_index, n_dim):
    """
    Upper estimate for q <= p through S_p -> S_p -> S_q.

    2 * 4^(1/pbar) * 2^(-n/N^2) * ||id: S_p -> S_q||.
    """
    p = exponent(p)
    c_p = 4.0 ** (1.0 / p.bar)
    return 2.0 * c_p * 2.0 ** (-entropy_index / n_dim**2) * embedding_norm(p, q, n_dim)
