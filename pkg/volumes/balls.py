"""
Schatten Ball Volumes
Normalized volumes vol(B_p^N)^(1/N^2), exactly for p = 2 and by rejection
from the enclosing Frobenius ball otherwise.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.special
import scipy.stats

from core.errors import DegenerateEstimateError, InvalidInputError
from core.schatten import BallSpec
from sampling.random_matrices import enclosing_radius, acceptance_rate

logger = logging.getLogger(__name__)

VOLUME_METHODS = ("exact", "rejection")


@dataclass(frozen=True)
class VolumeEstimate:
    """The normalized root vol(B)^(1/dim) with its standard error."""

    value: float
    std_error: float
    n_samples: int
    method: str

    def __post_init__(self):
        if self.method not in VOLUME_METHODS:
            raise InvalidInputError(f"unknown volume method {self.method!r}")
        if self.std_error < 0 or (self.method == "exact" and self.std_error != 0):
            raise InvalidInputError("bad standard error for method", method=self.method, std_error=self.std_error)

    def to_json(self):
        return {"value": self.value, "std_error": self.std_error, "n_samples": self.n_samples, "method": self.method}


def log_euclidean_ball_volume(dim, radius=1.0):
    return 0.5 * dim * math.log(math.pi) + dim * math.log(radius) - scipy.special.gammaln(dim / 2 + 1)


def euclidean_ball_volume(dim, radius=1.0):
    """pi^(d/2) r^d / Gamma(d/2 + 1), evaluated in log-space."""
    if dim < 1:
        raise InvalidInputError("dim must be at least 1", dim=dim)
    if radius <= 0:
        raise InvalidInputError("radius must be positive", radius=radius)
    return math.exp(log_euclidean_ball_volume(dim, radius))


def schatten_ball_volume_mc(spec, n_samples, stream, threads=None):
    """
    Estimate vol(B_p^N)^(1/N^2).

    Args:
        spec: BallSpec (N, p); N <= 6 unless p = 2
        n_samples: number of Frobenius-ball proposals
        stream: StreamKey
        threads: worker threads for the proposal batches

    Returns:
        VolumeEstimate; the binomial error of the acceptance rate is carried
        through the 1/N^2 root by the delta method
    """
    if not isinstance(spec, BallSpec):
        spec = BallSpec(*spec)
    n, d = spec.n_dim, spec.n_dim**2
    if spec.p.value == 2.0 or n == 1:
        # B_2^N is the Euclidean ball of R^(N^2); B_p^1 = [-1, 1] for every p
        value = math.exp(log_euclidean_ball_volume(d) / d)
        return VolumeEstimate(value=value, std_error=0.0, n_samples=0, method="exact")
    if n_samples < 1:
        raise InvalidInputError("n_samples must be at least 1", n_samples=n_samples)

    accepted, proposals = acceptance_rate(spec, n_samples, stream, threads=threads)
    if accepted == 0:
        raise DegenerateEstimateError(
            "no proposal landed in the ball; increase n_samples",
            n_samples=proposals, n_dim=n, p=str(spec.p),
        )
    rate = accepted / proposals
    rate_se = math.sqrt(rate * (1.0 - rate) / proposals)
    log_enclosing = log_euclidean_ball_volume(d, enclosing_radius(spec))
    value = math.exp((math.log(rate) + log_enclosing) / d)
    std_error = value * rate_se / (d * rate)
    logger.info("vol(B_%s^%d)^(1/%d) = %.6f +- %.2g (rate %.3g)", spec.p, n, d, value, std_error, rate)
    return VolumeEstimate(value=value, std_error=std_error, n_samples=proposals, method="rejection")


def volume_scaling_fit(p, n_dims, n_samples, stream, threads=None):
    """
    Least-squares slope of log vol(B_p^N)^(1/N^2) against log N.

    The asymptotic slope is -(1/2 + 1/p).

    Returns:
        (slope, intercept, estimates) with one VolumeEstimate per N
    """
    n_dims = sorted(set(int(n) for n in n_dims))
    if len(n_dims) < 3:
        raise InvalidInputError("need at least three values of N", n_dims=n_dims)
    estimates = [
        schatten_ball_volume_mc(BallSpec(n, p), n_samples, stream.child("volume", n), threads=threads)
        for n in n_dims
    ]
    fit = scipy.stats.linregress(np.log(n_dims), np.log([e.value for e in estimates]))
    return float(fit.slope), float(fit.intercept), estimates
