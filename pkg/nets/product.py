"""
Dyadic Product Net
Covering of B_p^N in S_q (p <= q) built from low-rank nets.

A matrix in B_p^N is split along its singular values into blocks
[2^(j-1), 2^j) for j = 1..l plus a tail. Block j has rank at most 2^(j-1)
and, after scaling by 2^((j-1)(1/p-1/q)), lies in R^N_{2^(j-1),q}; each
scaled block is rounded to a level net at radius
    eps_j = c_q * 2^((j-l)(1/p-1/q+alpha)).
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from config import BALL_TOL, DEFAULT_ALPHA, DEFAULT_C_Q
from core.errors import InvalidInputError, LabError
from core.exponents import exponent, rate_gap
from core.schatten import as_matrix, lq_norm, schatten_norm, svd
from nets.low_rank import LowRankBallSpec, low_rank_ball_net

logger = logging.getLogger(__name__)


@dataclass
class DyadicDecomposition:
    """A = sum(pieces) + remainder; ``factors`` keeps the thin SVD blocks of each piece."""

    pieces: list
    remainder: np.ndarray
    levels: int
    factors: list = field(default_factory=list)

    def total(self):
        return sum(self.pieces, np.zeros_like(self.remainder)) + self.remainder


def block_bounds(j):
    """Zero-based singular value indices [2^(j-1) - 1, 2^j - 1) of level j."""
    return 2 ** (j - 1) - 1, 2**j - 1


def dyadic_decompose(a, levels, p, q):
    """
    Split ``a`` into dyadic singular value blocks.

    Args:
        a: N x N matrix with ||a||_p <= 1
        levels: l, with 2^l <= N
        p, q: exponents of the identity S_p -> S_q

    Returns:
        DyadicDecomposition with rank(A_j) <= 2^(j-1),
        ||A_j||_q <= 2^((j-1)(1/q-1/p)) and ||A^c||_q <= 2^(l(1/q-1/p))
    """
    a = as_matrix(a)
    p, q = exponent(p), exponent(q)
    n = a.shape[0]
    if a.shape[0] != a.shape[1]:
        raise InvalidInputError("dyadic decomposition needs a square matrix", shape=list(a.shape))
    if levels < 0 or 2**levels > n:
        raise InvalidInputError(f"need 2^levels <= N, got levels={levels}, N={n}", levels=levels, n_dim=n)
    f = svd(a)
    norm = float(lq_norm(f.sigma, p))
    if norm > 1.0 + BALL_TOL:
        raise InvalidInputError("matrix is outside the unit ball of S_p", norm=norm, p=str(p))

    pieces, factors = [], []
    for j in range(1, levels + 1):
        lo, hi = block_bounds(j)
        u, s, v = f.u[:, lo:hi], f.sigma[lo:hi], f.v[:, lo:hi]
        factors.append((u, s, v))
        pieces.append((u * s) @ v.T)
    tail = 2**levels - 1
    remainder = (f.u[:, tail:] * f.sigma[tail:]) @ f.v[:, tail:].T
    return DyadicDecomposition(pieces=pieces, remainder=remainder, levels=levels, factors=factors)


def level_scale(j, p, q):
    """2^(-(j-1)(1/p-1/q)): the weight of level j in the product net."""
    return 2.0 ** (-(j - 1) * rate_gap(p, q))


def level_radius(j, levels, p, q, alpha, c_q):
    return c_q * 2.0 ** ((j - levels) * (rate_gap(p, q) + alpha))


def error_budget(levels, p, q, alpha=DEFAULT_ALPHA, c_q=DEFAULT_C_Q):
    """
    Covering radius of the product net.

    eps^qbar = sum_j [scale_j * eps_j]^qbar + 2^(l qbar (1/q-1/p))
    """
    p, q = exponent(p), exponent(q)
    qbar = q.bar
    total = math.fsum(
        (level_scale(j, p, q) * level_radius(j, levels, p, q, alpha, c_q)) ** qbar
        for j in range(1, levels + 1)
    )
    total += 2.0 ** (-levels * qbar * rate_gap(p, q))
    return total ** (1.0 / qbar)


def cardinality_budget_bits(levels, n_dim, p, q, alpha=DEFAULT_ALPHA):
    """2(1/p-1/q+alpha) n with n = 2^l N: the log2 cardinality allowance of the construction."""
    return 2.0 * (rate_gap(p, q) + alpha) * (2**levels) * n_dim


def est_up10_identity(levels):
    """sum_{j=1}^l 2^j (l-j) <= 2^(l+1), checked in integer arithmetic."""
    lhs = sum(2**j * (levels - j) for j in range(1, levels + 1))
    return lhs <= 2 ** (levels + 1)


def gamma_inflation(p, q, alpha=DEFAULT_ALPHA):
    """Smallest integer gamma >= 1 + 2(1/p-1/q+alpha)."""
    return math.ceil(1.0 + 2.0 * (rate_gap(p, q) + alpha) - 1e-12)


@dataclass
class ProductNet:
    level_nets: list
    level_scales: list
    level_radii: list
    params: dict
    error_budget: float
    log2_cardinality: float

    @property
    def levels(self):
        return self.params["levels"]

    @property
    def entropy_index(self):
        """n = 2^l N, the index the construction targets."""
        return (2**self.levels) * self.params["n_dim"]

    @property
    def certified_index(self):
        """Smallest n with 2^(n-1) >= |net|; e_n <= error_budget is certified there."""
        return math.ceil(self.log2_cardinality - 1e-9) + 1

    def summary(self):
        p, q = self.params["p"], self.params["q"]
        return {
            "params": {k: (str(v) if k in ("p", "q") else v) for k, v in self.params.items()},
            "error_budget": self.error_budget,
            "log2_cardinality": self.log2_cardinality,
            "level_log2_cardinality": [net.log2_cardinality for net in self.level_nets],
            "level_radii": list(self.level_radii),
            "level_scales": list(self.level_scales),
            "entropy_index": self.entropy_index,
            "certified_index": self.certified_index,
            "cardinality_budget_bits": cardinality_budget_bits(
                self.levels, self.params["n_dim"], p, q, self.params["alpha"]
            ),
            "gamma": gamma_inflation(p, q, self.params["alpha"]),
        }


def schatten_net_build(n_dim, p, q, levels, alpha=DEFAULT_ALPHA, c_q=DEFAULT_C_Q, stream=None,
                       stiefel_mode="lattice"):
    """
    Build the dyadic product net of B_p^N in S_q.

    Args:
        n_dim: N
        p, q: exponents with p <= q
        levels: l, with 2^l <= N
        alpha: decay parameter of the level radii (> 0)
        c_q: radius constant (>= 1)
        stream: StreamKey for greedy component nets
        stiefel_mode: "lattice" (provable), "direct" or "composite"

    Returns:
        ProductNet
    """
    p, q = exponent(p), exponent(q)
    if p.value > q.value:
        raise InvalidInputError("the product net needs p <= q", p=str(p), q=str(q))
    if levels < 0 or 2**levels > n_dim:
        raise InvalidInputError(f"need 2^levels <= N, got levels={levels}, N={n_dim}", levels=levels, n_dim=n_dim)
    if alpha <= 0:
        raise InvalidInputError("alpha must be positive", alpha=alpha)
    if c_q < 1:
        raise InvalidInputError("c_q must be at least 1", c_q=c_q)

    nets, scales, radii = [], [], []
    for j in range(1, levels + 1):
        eps_j = level_radius(j, levels, p, q, alpha, c_q)
        spec = LowRankBallSpec(n_dim, 2 ** (j - 1), q)
        level_stream = stream.child("level", j) if stream is not None else None
        try:
            net = low_rank_ball_net(spec, eps_j, level_stream, stiefel_mode=stiefel_mode)
        except LabError as e:
            e.details["level"] = j
            raise
        nets.append(net)
        scales.append(level_scale(j, p, q))
        radii.append(eps_j)

    params = {"n_dim": n_dim, "p": p, "q": q, "levels": levels, "alpha": alpha, "c_q": c_q,
              "stiefel_mode": stiefel_mode}
    log2_card = math.fsum(net.log2_cardinality for net in nets)
    product = ProductNet(
        level_nets=nets,
        level_scales=scales,
        level_radii=radii,
        params=params,
        error_budget=error_budget(levels, p, q, alpha, c_q),
        log2_cardinality=log2_card,
    )
    logger.info(
        "product net N=%d p=%s q=%s l=%d: budget %.5f, log2|net| %.1f",
        n_dim, p, q, levels, product.error_budget, log2_card,
    )
    return product


def quantize(net, a):
    """
    Round ``a`` to the product net.

    Returns:
        (representative, achieved_error) with achieved_error = ||a - rep||_q
    """
    a = as_matrix(a)
    p, q = net.params["p"], net.params["q"]
    parts = dyadic_decompose(a, net.levels, p, q)
    representative = np.zeros_like(a)
    for j, (level_net, scale) in enumerate(zip(net.level_nets, net.level_scales), start=1):
        u, s, v = parts.factors[j - 1]
        if hasattr(level_net, "nearest_factored"):
            z, _ = level_net.nearest_factored(u, s / scale, v)
        else:
            z, _ = level_net.nearest(parts.pieces[j - 1] / scale)
        representative += scale * z
    return representative, schatten_norm(a - representative, q)


def audit_quantizer(net, samples):
    """
    Quantize every sample and compare with the error budget.

    Returns:
        dict with sample count, worst error, violations and the budget
    """
    errors = np.array([quantize(net, a)[1] for a in samples])
    budget = net.error_budget
    violations = int(np.count_nonzero(errors > budget * (1.0 + 1e-9)))
    return {
        "samples": int(errors.size),
        "worst_error": float(errors.max()) if errors.size else 0.0,
        "mean_error": float(errors.mean()) if errors.size else 0.0,
        "violations": violations,
        "error_budget": budget,
    }
