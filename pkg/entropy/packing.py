"""
Grassmann Packings
Lower bounds for e_n from separated sets of scaled projections
k^(-1/p) P_E, which lie in B_p^N because ||P_E||_p = k^(1/p).
"""
import itertools
import logging
import math

import numpy as np

from config import GRASSMANN_PACKING_PROPOSALS, PACKING_SEPARATION_C
from core.errors import DegeneratePackingError, InvalidInputError
from core.exponents import exponent
from entropy.bounds import lower_from_packing
from nets.greedy import greedy_separated_set
from nets.metrics import schatten_metric
from sampling.random_matrices import haar_stiefel_batch

logger = logging.getLogger(__name__)


def packing_separation(k, p, q, c=PACKING_SEPARATION_C):
    """Separation target c * k^(1/q - 1/p) for the scaled projections."""
    p, q = exponent(p), exponent(q)
    return c * k ** (q.inv - p.inv)


def grassmann_packing(n_dim, k, p, q, stream, c=PACKING_SEPARATION_C, proposal_cap=GRASSMANN_PACKING_PROPOSALS):
    """
    Greedy separated set of {k^(-1/p) P_E} in the S_q metric.

    Returns:
        NetExplicit whose points are the scaled projections
    """
    p, q = exponent(p), exponent(q)
    if not 1 <= k <= n_dim / 2:
        raise InvalidInputError("need 1 <= k <= n_dim/2", n_dim=n_dim, k=k)
    if q.value < 1:
        raise InvalidInputError("Grassmann packings need q >= 1", q=str(q))
    scale = k ** (-p.inv)
    delta = packing_separation(k, p, q, c)

    def projections(index):
        u = haar_stiefel_batch(n_dim, k, 256, stream.child("packing", index).generator())
        return scale * (u @ np.swapaxes(u, 1, 2))

    return greedy_separated_set(
        projections, schatten_metric(q), delta, proposal_cap=proposal_cap, require_saturation=False
    )


def grassmann_packing_lower(n_dim, k, p, q, stream, c=PACKING_SEPARATION_C,
                            proposal_cap=GRASSMANN_PACKING_PROPOSALS):
    """
    Packing lower bound on e_n(S_p^N -> S_q^N) from a Grassmann packing.

    Returns:
        (EntropyBound, packing size)
    """
    packing = grassmann_packing(n_dim, k, p, q, stream, c=c, proposal_cap=proposal_cap)
    if len(packing) < 2:
        raise DegeneratePackingError(
            "Grassmann packing has fewer than two points", n_dim=n_dim, k=k, separation=packing.radius
        )
    bound = lower_from_packing(len(packing), packing.radius, q, method="grassmann-packing")
    logger.info(
        "Grassmann packing N=%d k=%d: %d points at separation %.4g, e_%d >= %.4g",
        n_dim, k, len(packing), packing.radius, bound.entropy_index, bound.lower,
    )
    return bound, len(packing)


def line_packing_bruteforce(n_points=3, grid_degrees=1.0):
    """
    Best packing of ``n_points`` lines in R^2 over an angle grid.

    The first line is fixed at angle 0 (rotations preserve distances); the
    distance between lines at angles a and b is ||P_a - P_b||_op = |sin(a - b)|.

    Returns:
        (angles in degrees, minimal pairwise distance)
    """
    if n_points < 2:
        raise InvalidInputError("need at least two lines", n_points=n_points)
    grid = np.arange(grid_degrees, 180.0, grid_degrees)
    best_angles, best_sep = None, -1.0
    for rest in itertools.combinations(grid, n_points - 1):
        angles = np.radians(np.concatenate([[0.0], rest]))
        sep = min(abs(math.sin(a - b)) for a, b in itertools.combinations(angles, 2))
        if sep > best_sep:
            best_angles, best_sep = np.degrees(angles), sep
    return best_angles.tolist(), best_sep
