"""
Grassmann Ball Measures
Haar measure of S_q-balls B(F, delta) = {E : ||P_E - P_F||_q < delta} in
G_{N,k}, estimated by Monte Carlo.

For k <= N/2 the nonzero singular values of P_E - P_F are the sines of the
principal angles between E and F, each appearing twice, so the distance
needs only a (N-k) x k SVD per sample.
"""
import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.stats

from config import BATCH_SIZE, MIN_GRASSMANN_HITS
from core.errors import DegenerateEstimateError, InvalidInputError
from core.exponents import exponent
from core.schatten import lq_norm
from sampling.parallel import parallel_map
from sampling.random_matrices import haar_stiefel_batch

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MeasurePoint:
    delta: float
    probability: float
    std_error: float
    hits: int
    ci_low: float
    ci_high: float
    widened_ci: bool

    def to_json(self):
        return dict(self.__dict__)


def grassmann_diameter_bounds(k, q):
    """
    (actual, triangle) bounds on the S_q diameter of G_{N,k}, k <= N/2.

    Two subspaces with all principal angles at 90 degrees are (2k)^(1/q)
    apart; the triangle inequality alone gives 2 k^(1/q).
    """
    q = exponent(q)
    return (2 * k) ** q.inv, 2 * k**q.inv


def principal_sines(frames, complement):
    """
    Sines of the principal angles between span(frames[i]) and the reference.

    Args:
        frames: (B, N, k) stack of orthonormal frames
        complement: N x (N-k) orthonormal basis of the reference's complement

    Returns:
        (B, k) array of sines, descending
    """
    return np.linalg.svd(complement.T @ frames, compute_uv=False)


def projection_distances(sines, q):
    """||P_E - P_F||_q from the principal sines: (2 sum sin^q)^(1/q)."""
    q = exponent(q)
    return 2.0**q.inv * lq_norm(sines, q)


def _reference_complement(n_dim, k, reference):
    if reference is None:
        return np.eye(n_dim)[:, k:]
    reference = np.asarray(reference, dtype=float)
    if reference.shape != (n_dim, k):
        raise InvalidInputError("reference frame has the wrong shape", shape=list(reference.shape))
    return scipy.linalg.null_space(reference.T)


def grassmann_ball_measure_mc(n_dim, k, q, deltas, n_samples, stream, reference=None, threads=None):
    """
    Estimate mu_{N,k}(B(F, delta)) for every delta.

    Args:
        n_dim: N
        k: subspace dimension, 1 <= k <= N/2
        q: exponent >= 1
        deltas: radii, each below k^(1/q)
        n_samples: Haar samples of E
        stream: StreamKey
        reference: N x k frame of F; default spans the first k coordinates
        threads: worker threads for the sample batches

    Returns:
        list of MeasurePoint sorted by delta; points with fewer than
        MIN_GRASSMANN_HITS hits carry widened_ci = True
    """
    q = exponent(q)
    if not 1 <= k <= n_dim / 2:
        raise InvalidInputError("need 1 <= k <= n_dim/2", n_dim=n_dim, k=k)
    if q.value < 1:
        raise InvalidInputError("Grassmann measures need q >= 1", q=str(q))
    deltas = np.sort(np.asarray(deltas, dtype=float))
    # sine-vector radius: half the triangle diameter, k^(1/q)
    limit = grassmann_diameter_bounds(k, q)[1] / 2
    if deltas.size == 0 or deltas[0] <= 0 or deltas[-1] >= limit:
        raise InvalidInputError(f"deltas must lie in (0, k^(1/q)) = (0, {limit:g})", deltas=deltas.tolist())
    if n_samples < 1:
        raise InvalidInputError("n_samples must be at least 1", n_samples=n_samples)

    complement = _reference_complement(n_dim, k, reference)
    n_batches = -(-n_samples // BATCH_SIZE)

    def count_hits(b):
        count = min(BATCH_SIZE, n_samples - b * BATCH_SIZE)
        frames = haar_stiefel_batch(n_dim, k, count, stream.child("grassmann", b).generator())
        dist = projection_distances(principal_sines(frames, complement), q)
        return np.count_nonzero(dist[:, None] < deltas[None, :], axis=0)

    hits = np.sum(parallel_map(count_hits, range(n_batches), threads), axis=0)

    points = []
    for delta, h in zip(deltas, hits):
        h = int(h)
        prob = h / n_samples
        ci = scipy.stats.binomtest(h, n_samples).proportion_ci(confidence_level=0.95, method="wilson")
        widened = h < MIN_GRASSMANN_HITS
        if widened:
            logger.warning(
                "only %d hits at delta=%g (N=%d, k=%d, q=%s); use the Wilson interval", h, delta, n_dim, k, q
            )
        points.append(MeasurePoint(
            delta=float(delta),
            probability=prob,
            std_error=float(np.sqrt(prob * (1.0 - prob) / n_samples)),
            hits=h,
            ci_low=float(ci.low),
            ci_high=float(ci.high),
            widened_ci=widened,
        ))
    return points


def fit_measure_exponent(points):
    """
    Slope of log probability against log delta.

    Small balls have measure ~ delta^(k(N-k)), so the slope estimates k(N-k).
    """
    usable = [pt for pt in points if pt.hits > 0]
    if len(usable) < 2:
        raise DegenerateEstimateError("need two deltas with hits to fit an exponent", usable=len(usable))
    fit = scipy.stats.linregress(np.log([pt.delta for pt in usable]), np.log([pt.probability for pt in usable]))
    return float(fit.slope)
