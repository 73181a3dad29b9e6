"""
Metrics
Distances used by nets: Schatten q (quasi-)norms of differences, the
operator norm, and l_q distances between vectors.
"""
from dataclasses import dataclass

import numpy as np

from core.errors import InvalidInputError
from core.exponents import INF, Exponent, exponent
from core.schatten import lq_norm, schatten_norms

METRIC_KINDS = ("schatten", "operator", "euclidean_vector")


@dataclass(frozen=True)
class MetricSpec:
    """
    A (quasi-)metric d(x, y) = ||x - y||.

    The q-bar triangle inequality d(x,z)^qbar <= d(x,y)^qbar + d(y,z)^qbar
    holds for the declared exponent.
    """

    kind: str
    q: Exponent = INF

    def __post_init__(self):
        if self.kind not in METRIC_KINDS:
            raise InvalidInputError(f"unknown metric kind {self.kind!r}", kinds=list(METRIC_KINDS))
        q = INF if self.kind == "operator" else exponent(self.q)
        object.__setattr__(self, "q", q)

    def distance(self, x, y):
        return float(self.distances(x, np.asarray(y)[None, ...])[0])

    def distances(self, x, points):
        """Distances from ``x`` to every element of the stack ``points``."""
        diff = np.asarray(points, dtype=float) - np.asarray(x, dtype=float)
        if self.kind == "euclidean_vector":
            return lq_norm(diff.reshape(diff.shape[0], -1), self.q)
        if diff.ndim != 3:
            raise InvalidInputError("matrix metrics need a stack of matrices", shape=list(diff.shape))
        return schatten_norms(diff, self.q)

    def to_json(self):
        return {"kind": self.kind, "q": self.q.to_json()}

    @classmethod
    def from_json(cls, data):
        return cls(kind=data["kind"], q=exponent(data["q"]))


def schatten_metric(q):
    return MetricSpec("schatten", exponent(q))


OPERATOR = MetricSpec("operator")
