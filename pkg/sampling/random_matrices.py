"""
Random Matrices
Gaussian matrices, Haar-distributed Stiefel frames and Grassmann
projections, and points of Schatten unit balls.
"""
import logging
from dataclasses import dataclass

import numpy as np

from config import BALL_TOL, BATCH_SIZE, PROJECTION_TOL, REJECTION_BUDGET, REJECTION_MAX_DIM, STIEFEL_ORTHO_TOL
from core.errors import BudgetExhaustedError, InvalidInputError
from core.schatten import BallSpec, lq_norm, schatten_norms
from sampling.parallel import parallel_map

logger = logging.getLogger(__name__)

SAMPLING_MODES = ("rejection", "spectral", "low_rank")


@dataclass(frozen=True)
class StiefelPoint:
    """An N x K matrix with orthonormal columns."""

    u: np.ndarray

    @property
    def n_dim(self):
        return self.u.shape[0]

    @property
    def k(self):
        return self.u.shape[1]

    @property
    def manifold_dim(self):
        """d_{N,K} = K(N - (K+1)/2)."""
        return stiefel_dimension(self.n_dim, self.k)

    def is_valid(self, tol=STIEFEL_ORTHO_TOL):
        return bool(np.max(np.abs(self.u.T @ self.u - np.eye(self.k))) <= tol)


@dataclass(frozen=True)
class GrassmannPoint:
    """A k-dimensional subspace of R^N stored as its orthogonal projection."""

    projection: np.ndarray

    @property
    def rank(self):
        return int(round(float(np.trace(self.projection))))

    def is_valid(self, tol=PROJECTION_TOL):
        p = self.projection
        symmetric = np.max(np.abs(p - p.T)) <= 1e-12
        idempotent = np.max(np.abs(p @ p - p)) <= tol
        integral = abs(np.trace(p) - self.rank) <= tol
        return bool(symmetric and idempotent and integral)


def stiefel_dimension(n_dim, k):
    return k * (n_dim - (k + 1) / 2)


def _check_frame_dims(n_dim, k):
    if not 1 <= k <= n_dim:
        raise InvalidInputError(f"need 1 <= k <= n_dim, got k={k}, n_dim={n_dim}", n_dim=n_dim, k=k)


def gaussian_matrix(n_rows, n_cols, stream):
    """i.i.d. standard normal n_rows x n_cols matrix drawn from ``stream``."""
    if n_rows < 1 or n_cols < 1:
        raise InvalidInputError("matrix dimensions must be at least 1", n_rows=n_rows, n_cols=n_cols)
    return stream.generator().standard_normal((n_rows, n_cols))


def _sign_fixed_qr(g):
    """Q factor of a (stack of) Gaussian matrices with R's diagonal forced positive."""
    q, r = np.linalg.qr(g)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    signs = np.where(d < 0, -1.0, 1.0)
    return q * signs[..., None, :]


def haar_stiefel_batch(n_dim, k, count, rng):
    """``count`` Haar frames of shape (count, n_dim, k) from a numpy Generator."""
    _check_frame_dims(n_dim, k)
    if k == 1:
        g = rng.standard_normal((count, n_dim, 1))
        return g / np.linalg.norm(g, axis=1, keepdims=True)
    return _sign_fixed_qr(rng.standard_normal((count, n_dim, k)))


def haar_stiefel(n_dim, k, stream):
    """Haar-distributed point of V_K^N (QR of a Gaussian matrix, sign fixed)."""
    _check_frame_dims(n_dim, k)
    g = stream.generator().standard_normal((n_dim, k))
    return StiefelPoint(u=_sign_fixed_qr(g))


def haar_orthogonal(n_dim, stream):
    return haar_stiefel(n_dim, n_dim, stream).u


def haar_grassmann(n_dim, k, stream):
    """Haar-distributed k-dimensional subspace as the projection u u^T."""
    u = haar_stiefel(n_dim, k, stream).u
    p = u @ u.T
    return GrassmannPoint(projection=(p + p.T) / 2)


def enclosing_radius(spec):
    """Frobenius radius of a ball containing B_p^N."""
    return float(spec.n_dim) ** max(0.0, 0.5 - spec.p.inv)


def frobenius_ball_batch(n_dim, radius, count, rng):
    """Uniform points of the Frobenius ball of ``radius`` in R^(N x N)."""
    d = n_dim * n_dim
    g = rng.standard_normal((count, d))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    r = radius * rng.random(count) ** (1.0 / d)
    return (g * r[:, None]).reshape(count, n_dim, n_dim)


def rejection_batch(spec, count, rng):
    """
    One batch of rejection proposals for B_p^N.

    Returns:
        (accepted matrices, number of proposals)
    """
    proposals = frobenius_ball_batch(spec.n_dim, enclosing_radius(spec), count, rng)
    if spec.p.value == 2.0:
        norms = np.linalg.norm(proposals.reshape(count, -1), axis=1)
    else:
        norms = schatten_norms(proposals, spec.p)
    return proposals[norms <= 1.0 + BALL_TOL], count


def _spectral_sample(spec, rng, rank=None):
    n = spec.n_dim
    rank = n if rank is None else rank
    g = np.abs(rng.standard_normal(rank))
    norm = float(lq_norm(g, spec.p))
    sigma = np.zeros(n)
    sigma[:rank] = np.sort(g / norm)[::-1] if norm > 0 else 0.0
    radius = rng.random() ** (1.0 / (n * n))
    u = _sign_fixed_qr(rng.standard_normal((n, n)))
    v = _sign_fixed_qr(rng.standard_normal((n, n)))
    return (u * (radius * sigma)) @ v.T


def sample_schatten_ball(spec, mode, stream, budget=REJECTION_BUDGET):
    """
    Draw one point of B_p^N.

    Args:
        spec: BallSpec (N, p)
        mode: "rejection" (uniform), "spectral" or "low_rank" (stress distributions)
        stream: StreamKey
        budget: proposal budget for rejection mode

    Returns:
        N x N matrix with ||X||_p <= 1 + 1e-10
    """
    if not isinstance(spec, BallSpec):
        spec = BallSpec(*spec)
    if mode not in SAMPLING_MODES:
        raise InvalidInputError(f"unknown sampling mode {mode!r}", modes=list(SAMPLING_MODES))
    rng = stream.generator()
    if mode == "spectral":
        return _spectral_sample(spec, rng)
    if mode == "low_rank":
        rank = int(rng.integers(1, spec.n_dim + 1))
        return _spectral_sample(spec, rng, rank=rank)

    if spec.n_dim > REJECTION_MAX_DIM:
        raise InvalidInputError(
            f"rejection sampling is limited to n_dim <= {REJECTION_MAX_DIM}", n_dim=spec.n_dim
        )
    proposed = 0
    while proposed < budget:
        count = min(BATCH_SIZE, budget - proposed)
        accepted, n = rejection_batch(spec, count, rng)
        proposed += n
        if len(accepted):
            return accepted[0]
    raise BudgetExhaustedError(
        "rejection sampling found no point of the ball",
        proposals=proposed, accepted=0, acceptance_rate=0.0, n_dim=spec.n_dim, p=str(spec.p),
    )


def sample_ball_points(spec, mode, stream, count):
    """``count`` independent ball points, trial i drawn from ``stream.child(mode, i)``."""
    return [sample_schatten_ball(spec, mode, stream.child(mode, i)) for i in range(count)]


def acceptance_rate(spec, n_proposals, stream, threads=None):
    """
    Fraction of Frobenius-ball proposals that land in B_p^N.

    Proposals are cut into fixed batches of BATCH_SIZE, batch b drawn from
    ``stream.child("proposals", b)``, so counts do not depend on ``threads``.

    Returns:
        (accepted, proposals)
    """
    if spec.n_dim > REJECTION_MAX_DIM:
        raise InvalidInputError(
            f"rejection sampling is limited to n_dim <= {REJECTION_MAX_DIM}", n_dim=spec.n_dim
        )
    n_batches = -(-n_proposals // BATCH_SIZE)

    def count_hits(b):
        count = min(BATCH_SIZE, n_proposals - b * BATCH_SIZE)
        hits, _ = rejection_batch(spec, count, stream.child("proposals", b).generator())
        return len(hits)

    accepted = sum(parallel_map(count_hits, range(n_batches), threads))
    logger.debug("B_%s^%d: %d of %d proposals accepted", spec.p, spec.n_dim, accepted, n_proposals)
    return accepted, n_proposals
