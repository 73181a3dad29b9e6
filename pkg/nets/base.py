"""
Net Protocol
Every net exposes its covering radius, metric, cardinality (as log2) and a
nearest-point query. Explicit nets also hold their points.
"""
import numpy as np


class Net:
    """Base class for finite coverings of a set."""

    radius = 0.0
    metric = None
    saturated = True

    @property
    def log2_cardinality(self):
        raise NotImplementedError

    @property
    def cardinality(self):
        """Exact size when it fits in a float without overflow, else None."""
        bits = self.log2_cardinality
        return int(round(2.0**bits)) if bits < 60 else None

    def nearest(self, x):
        """
        Closest net point to ``x``.

        Returns:
            (point, distance) with the distance measured in ``self.metric``
        """
        raise NotImplementedError

    def to_json(self):
        raise NotImplementedError


class ZeroNet(Net):
    """The one-point net {0}; covers any set inside the ball of ``radius`` about 0."""

    def __init__(self, shape, radius, metric):
        self.shape = tuple(shape)
        self.radius = float(radius)
        self.metric = metric

    @property
    def log2_cardinality(self):
        return 0.0

    @property
    def points(self):
        return np.zeros((1,) + self.shape)

    def nearest(self, x):
        zero = np.zeros(self.shape)
        return zero, self.metric.distance(x, zero)

    def to_json(self):
        return {
            "type": "zero_net",
            "shape": list(self.shape),
            "radius": self.radius,
            "metric": self.metric.to_json(),
        }
