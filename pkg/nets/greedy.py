"""
Greedy Packings
Maximal separated sets built by scanning samples: a candidate is kept when
it is farther than ``delta`` from every kept point. A saturated set is a
delta-covering of the sampler's support.
"""
import logging
import math

import numpy as np

from config import GREEDY_BUDGET, GREEDY_PROPOSAL_CAP
from core.errors import EmptySupportError, InvalidInputError, NumericFailureError
from nets.base import Net

logger = logging.getLogger(__name__)


class NetExplicit(Net):
    """
    An explicit delta-separated point set.

    The separation ``d(x, y) > radius`` for every pair of distinct points is
    checked at construction with no tolerance.
    """

    def __init__(self, points, radius, metric, saturated, proposals=0, check=True):
        self.points = np.asarray(points, dtype=float)
        self.radius = float(radius)
        self.metric = metric
        self.saturated = bool(saturated)
        self.proposals = int(proposals)
        if self.points.shape[0] < 1:
            raise EmptySupportError("net has no points")
        if not np.all(np.isfinite(self.points)):
            raise InvalidInputError("net points must be finite")
        if check:
            self._check_separation()

    def _check_separation(self):
        for i in range(1, len(self.points)):
            d = self.metric.distances(self.points[i], self.points[:i])
            if not np.all(d > self.radius):
                j = int(np.argmin(d))
                raise NumericFailureError(
                    "net points are not separated", pair=[j, i], distance=float(d[j]), radius=self.radius
                )

    def __len__(self):
        return len(self.points)

    @property
    def log2_cardinality(self):
        return math.log2(len(self.points))

    @property
    def cardinality(self):
        return len(self.points)

    def nearest(self, x):
        d = self.metric.distances(x, self.points)
        i = int(np.argmin(d))
        return self.points[i], float(d[i])

    def to_json(self):
        return {
            "type": "net",
            "metric": self.metric.to_json(),
            "radius": self.radius,
            "shape": list(self.points.shape[1:]),
            "points": self.points.reshape(len(self.points), -1).tolist(),
            "saturated": self.saturated,
        }


def greedy_separated_set(sampler, metric, delta, budget=GREEDY_BUDGET, proposal_cap=GREEDY_PROPOSAL_CAP,
                         seed_points=(), require_saturation=True):
    """
    Build a maximal delta-separated set from a stream of candidates.

    Args:
        sampler: callable taking a batch index and returning a stack of
            candidates; an empty stack (or None) means the support is exhausted
        metric: MetricSpec
        delta: separation radius
        budget: consecutive rejections after which the set is declared saturated
        proposal_cap: total proposals after which construction stops unsaturated
        seed_points: points to keep unconditionally first (e.g. zero)
        require_saturation: warn when the set stops unsaturated; packings
            used only for their separation pass False

    Returns:
        NetExplicit
    """
    if delta <= 0:
        raise InvalidInputError("delta must be positive", delta=delta)
    if budget < 1:
        raise InvalidInputError("budget must be at least 1", budget=budget)

    kept = np.stack([np.asarray(p, dtype=float) for p in seed_points]) if len(seed_points) else None
    rejections = 0
    proposals = 0
    saturated = False
    batch_index = 0
    while proposals < proposal_cap:
        batch = sampler(batch_index)
        batch_index += 1
        if batch is None or len(batch) == 0:
            saturated = True
            break
        for candidate in np.asarray(batch, dtype=float):
            proposals += 1
            if kept is None:
                kept = candidate[None, ...]
                rejections = 0
            elif np.all(metric.distances(candidate, kept) > delta):
                kept = np.concatenate([kept, candidate[None, ...]])
                rejections = 0
            else:
                rejections += 1
            if rejections >= budget or proposals >= proposal_cap:
                break
        if rejections >= budget:
            saturated = True
            break

    if kept is None:
        raise EmptySupportError("sampler produced no candidates", proposals=proposals)
    if require_saturation and not saturated:
        logger.warning(
            "greedy net stopped unsaturated at %d points after %d proposals (delta=%g)",
            len(kept), proposals, delta,
        )
    return NetExplicit(kept, delta, metric, saturated, proposals=proposals)


def sequence_sampler(values, batch_size=256):
    """Sampler that walks through a fixed sequence once, then reports exhaustion."""
    values = np.asarray(values, dtype=float)

    def sample(index):
        return values[index * batch_size:(index + 1) * batch_size]

    return sample


def audit_covering(net, points, radius=None):
    """
    Empirical covering check.

    Args:
        net: any Net
        points: iterable of points of the covered set
        radius: radius to test against (defaults to net.radius)

    Returns:
        dict with sample count, violations, violation rate and worst distance
    """
    radius = net.radius if radius is None else radius
    worst = 0.0
    violations = 0
    count = 0
    for x in points:
        _, d = net.nearest(x)
        worst = max(worst, d)
        violations += d > radius
        count += 1
    return {
        "samples": count,
        "violations": int(violations),
        "violation_rate": violations / count if count else 0.0,
        "worst_distance": worst,
        "radius": radius,
    }
