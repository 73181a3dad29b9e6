"""
Stiefel Nets
Nets of V_K^N (N x K matrices with orthonormal columns) in the operator norm.

Three constructions are available:
    direct     greedy packing of Haar samples
    composite  a Grassmann net {U_E} times a net of O(K); U ~ U_E Z with
               ||U - U_E Z||_op < 3 eps
    lattice    entrywise rounding to a grid of spacing eps/sqrt(NK) followed
               by the polar factor; a provable eps-net whose nearest point is
               computed without enumeration
"""
import logging
import math

import numpy as np

from config import GREEDY_BUDGET
from core.errors import InvalidInputError
from nets.base import Net
from nets.greedy import greedy_separated_set
from nets.metrics import OPERATOR
from sampling.random_matrices import haar_stiefel_batch

logger = logging.getLogger(__name__)

STIEFEL_MODES = ("direct", "composite", "lattice")


def polar_factor(g):
    """Closest matrix with orthonormal columns to ``g`` (W Z^T from the thin SVD)."""
    w, _, zt = np.linalg.svd(g, full_matrices=False)
    return w @ zt


class LatticeStiefelNet(Net):
    """
    Polar factors of the grid points h*Z^(N x K) inside [-1, 1]^(N x K).

    For U in V_K^N, rounding moves U by at most (h/2)sqrt(NK) in Frobenius
    norm, and the polar factor moves the rounded matrix by no more than that
    again, so ||U - polar(round(U))||_op <= h*sqrt(NK) = eps.
    """

    def __init__(self, n_dim, k, eps):
        if not 1 <= k <= n_dim:
            raise InvalidInputError("need 1 <= k <= n_dim", n_dim=n_dim, k=k)
        if eps <= 0:
            raise InvalidInputError("eps must be positive", eps=eps)
        self.n_dim = int(n_dim)
        self.k = int(k)
        self.radius = float(eps)
        self.metric = OPERATOR
        self.spacing = self.radius / math.sqrt(self.n_dim * self.k)
        self.levels = math.ceil(1.0 / self.spacing)

    @property
    def log2_cardinality(self):
        return self.n_dim * self.k * math.log2(2 * self.levels + 1)

    def nearest(self, x):
        u = np.asarray(x, dtype=float)
        g = self.spacing * np.clip(np.rint(u / self.spacing), -self.levels, self.levels)
        point = polar_factor(g)
        return point, self.metric.distance(u, point)

    def to_json(self):
        return {"type": "stiefel_lattice", "n_dim": self.n_dim, "k": self.k, "eps": self.radius}


class CompositeStiefelNet(Net):
    """
    Products U_E Z of Grassmann-net bases and an O(K) net.

    ``bases`` holds one orthonormal basis per net subspace and ``rotations``
    the O(K) net; the covering radius is three times the component radius.
    """

    def __init__(self, bases, rotations, eps, saturated=True):
        self.bases = np.asarray(bases, dtype=float)
        self.rotations = np.asarray(rotations, dtype=float)
        self.eps = float(eps)
        self.radius = 3.0 * self.eps
        self.metric = OPERATOR
        self.saturated = bool(saturated)
        self.projections = self.bases @ np.swapaxes(self.bases, 1, 2)

    @property
    def log2_cardinality(self):
        return math.log2(len(self.bases)) + math.log2(len(self.rotations))

    @property
    def points(self):
        return np.einsum("eij,zjk->ezik", self.bases, self.rotations).reshape(
            -1, self.bases.shape[1], self.bases.shape[2]
        )

    def nearest(self, x):
        u = np.asarray(x, dtype=float)
        p = u @ u.T
        e = int(np.argmin(OPERATOR.distances(p, self.projections)))
        u_e = self.bases[e]
        z = int(np.argmin(OPERATOR.distances(u_e.T @ u, self.rotations)))
        point = u_e @ self.rotations[z]
        return point, self.metric.distance(u, point)

    def to_json(self):
        return {
            "type": "stiefel_composite",
            "eps": self.eps,
            "bases": self.bases.tolist(),
            "rotations": self.rotations.tolist(),
            "saturated": self.saturated,
        }


def _haar_sampler(n_dim, k, stream, label, batch_size=256):
    def sample(index):
        return haar_stiefel_batch(n_dim, k, batch_size, stream.child(label, index).generator())

    return sample


def _projection_basis(projection, k):
    _, vecs = np.linalg.eigh(projection)
    return vecs[:, -k:]


def stiefel_net(n_dim, k, eps, mode, stream, budget=GREEDY_BUDGET):
    """
    Net of V_K^N in the operator norm.

    Args:
        n_dim: N
        k: K, with 1 <= K <= N
        eps: radius, 0 < eps < 2
        mode: "direct", "composite" or "lattice"
        stream: StreamKey for the greedy modes
        budget: saturation budget for the greedy modes

    Returns:
        NetExplicit (direct), CompositeStiefelNet or LatticeStiefelNet
    """
    if not 1 <= k <= n_dim:
        raise InvalidInputError("need 1 <= k <= n_dim", n_dim=n_dim, k=k)
    if not 0 < eps < 2:
        raise InvalidInputError("eps must lie in (0, 2)", eps=eps)
    if mode not in STIEFEL_MODES:
        raise InvalidInputError(f"unknown Stiefel net mode {mode!r}", modes=list(STIEFEL_MODES))

    if mode == "lattice":
        return LatticeStiefelNet(n_dim, k, eps)
    if stream is None:
        raise InvalidInputError(f"Stiefel net mode {mode!r} needs a stream", mode=mode)

    if mode == "direct":
        return greedy_separated_set(_haar_sampler(n_dim, k, stream, "stiefel"), OPERATOR, eps, budget=budget)

    frames = _haar_sampler(n_dim, k, stream, "grassmann")

    def projections(index):
        u = frames(index)
        return u @ np.swapaxes(u, 1, 2)

    grassmann = greedy_separated_set(projections, OPERATOR, eps, budget=budget)
    rotations = greedy_separated_set(_haar_sampler(k, k, stream, "orthogonal"), OPERATOR, eps, budget=budget)
    bases = np.stack([_projection_basis(p, k) for p in grassmann.points])
    logger.debug("composite Stiefel net: %d subspaces x %d rotations", len(bases), len(rotations))
    return CompositeStiefelNet(bases, rotations.points, eps, saturated=grassmann.saturated and rotations.saturated)
