"""
Low-Rank Ball Nets
Nets of R^N_{K,q} = {X : rank X <= K, ||X||_q <= 1} of the form
U~ diag(sigma~) V~^T with U~, V~ from a Stiefel net and sigma~ from an l_q
grid, all at resolution eps / 3^(1/qbar).

Nearest points are found factor by factor. With X = U S V^T,
    ||X - U~ S~ V~^T||^qbar <= ||(U - U~) S V^T||^qbar
                             + ||U~ S (V - V~)^T||^qbar
                             + ||U~ (S - S~) V~^T||^qbar
and each term is at most (eps / 3^(1/qbar))^qbar.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from core.errors import InvalidInputError
from core.exponents import Exponent, exponent
from core.schatten import svd
from nets.base import Net, ZeroNet
from nets.grids import lq_ball_net
from nets.metrics import schatten_metric
from nets.stiefel import stiefel_net

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LowRankBallSpec:
    n_dim: int
    k: int
    q: Exponent

    def __post_init__(self):
        if not 1 <= int(self.k) <= int(self.n_dim):
            raise InvalidInputError("need 1 <= k <= n_dim", n_dim=self.n_dim, k=self.k)
        object.__setattr__(self, "n_dim", int(self.n_dim))
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "q", exponent(self.q))

    @property
    def dimension(self):
        """K(2N - K), the exponent in the covering estimate."""
        return self.k * (2 * self.n_dim - self.k)


class LowRankNet(Net):
    """The factored net {U~ diag(sigma~) V~^T}."""

    def __init__(self, spec, eps, frame_net, sigma_net):
        self.spec = spec
        self.radius = float(eps)
        self.metric = schatten_metric(spec.q)
        self.frame_net = frame_net
        self.sigma_net = sigma_net
        self.saturated = frame_net.saturated and sigma_net.saturated

    @property
    def log2_cardinality(self):
        return 2.0 * self.frame_net.log2_cardinality + self.sigma_net.log2_cardinality

    def nearest_factored(self, u, sigma, v):
        """Nearest net point to u diag(sigma) v^T given its thin factors."""
        k = self.spec.k
        x = (u * sigma) @ v.T
        if not np.any(sigma):
            zero = np.zeros_like(x)
            return zero, 0.0
        u_t, _ = self.frame_net.nearest(u[:, :k])
        v_t, _ = self.frame_net.nearest(v[:, :k])
        s_t, _ = self.sigma_net.nearest(sigma[:k])
        point = (u_t * s_t) @ v_t.T
        return point, self.metric.distance(x, point)

    def nearest(self, x):
        f = svd(x)
        k = self.spec.k
        return self.nearest_factored(f.u[:, :k], f.sigma[:k], f.v[:, :k])

    def to_json(self):
        return {
            "type": "low_rank_net",
            "n_dim": self.spec.n_dim,
            "k": self.spec.k,
            "q": self.spec.q.to_json(),
            "eps": self.radius,
            "frame_net": self.frame_net.to_json(),
            "sigma_net": self.sigma_net.to_json(),
        }


def component_radius(eps, q):
    """eps / 3^(1/qbar): the resolution of each factor net."""
    return eps / 3.0 ** (1.0 / exponent(q).bar)


def low_rank_ball_net(spec, eps, stream, stiefel_mode="lattice"):
    """
    Net of R^N_{K,q} in S_q at radius eps.

    Args:
        spec: LowRankBallSpec (N, K, q)
        eps: covering radius; eps >= 1 returns the one-point net {0}
        stream: StreamKey used by the greedy Stiefel modes
        stiefel_mode: "lattice", "direct" or "composite"

    Returns:
        LowRankNet, or ZeroNet when eps >= 1
    """
    if eps <= 0:
        raise InvalidInputError("eps must be positive", eps=eps)
    if eps >= 1.0:
        return ZeroNet((spec.n_dim, spec.n_dim), eps, schatten_metric(spec.q))
    delta = component_radius(eps, spec.q)
    frame_stream = stream.child("frames") if stream is not None else None
    if stiefel_mode == "composite":
        # the composite net covers at three times its component radius
        frames = stiefel_net(spec.n_dim, spec.k, delta / 3.0, "composite", frame_stream)
    else:
        frames = stiefel_net(spec.n_dim, spec.k, delta, stiefel_mode, frame_stream)
    sigmas = lq_ball_net(spec.k, spec.q, delta)
    net = LowRankNet(spec, eps, frames, sigmas)
    logger.debug(
        "low-rank net N=%d K=%d q=%s eps=%g: log2|net| = %.2f",
        spec.n_dim, spec.k, spec.q, eps, net.log2_cardinality,
    )
    return net


def cardinality_exponent_ratio(net, eps):
    """log2|net| / (K(2N-K) log2(1/eps)), the constant in the covering estimate shape."""
    return net.log2_cardinality / (net.spec.dimension * math.log2(1.0 / eps))
