"""
Grid Nets
Axis-aligned nets of the l_q^K unit ball (0 < q <= inf).

The cube [-1, 1]^K is cut into cells of side h and every cell meeting the
ball contributes its midpoint; zero is always added. Rounding to the cell
midpoint moves each coordinate by at most h/2, so with h = 2 eps / K^(1/q)
every point of the ball is within eps in the l_q quasi-norm.
"""
import itertools
import math

import numpy as np

from config import GRID_CAPACITY, GRID_MATERIALIZE_CAP
from core.errors import CapacityError, InvalidInputError
from core.exponents import exponent
from core.schatten import lq_norm
from nets.base import Net
from nets.metrics import MetricSpec


class GridNet(Net):
    """Midpoint grid net of B_{l_q^K} plus the origin."""

    def __init__(self, k, q, eps):
        self.k = int(k)
        self.q = exponent(q)
        self.radius = float(eps)
        self.metric = MetricSpec("euclidean_vector", self.q)
        self.spacing = 2.0 * self.radius * self.k ** (-self.q.inv)
        self.half_cells = math.ceil(1.0 / self.spacing - 1e-12)
        self._points = None

    @property
    def box_size(self):
        return (2 * self.half_cells) ** self.k

    def _cell_kept(self, index):
        # Closest point of cell [i h, (i+1) h] to the origin, per coordinate.
        near = np.where(index >= 0, index, -index - 1) * self.spacing
        return lq_norm(near, self.q) <= 1.0

    @property
    def points(self):
        if self._points is None:
            if self.box_size > GRID_MATERIALIZE_CAP:
                raise CapacityError(
                    "grid too large to materialize", box_size=self.box_size, cap=GRID_MATERIALIZE_CAP
                )
            axis = np.arange(-self.half_cells, self.half_cells)
            cells = np.array(list(itertools.product(axis, repeat=self.k)), dtype=float).reshape(-1, self.k)
            kept = cells[self._cell_kept(cells)]
            mids = (kept + 0.5) * self.spacing
            self._points = np.vstack([np.zeros((1, self.k)), mids])
        return self._points

    @property
    def log2_cardinality(self):
        if self.box_size <= GRID_MATERIALIZE_CAP:
            return math.log2(len(self.points))
        return math.log2(self.box_size + 1)

    def nearest(self, x):
        x = np.asarray(x, dtype=float)
        index = np.clip(np.floor(x / self.spacing), -self.half_cells, self.half_cells - 1)
        if bool(self._cell_kept(index)):
            mid = (index + 0.5) * self.spacing
        else:
            mid = self.points[int(np.argmin(self.metric.distances(x, self.points)))]
        d_mid = float(lq_norm(x - mid, self.q))
        d_zero = float(lq_norm(x, self.q))
        if d_zero <= d_mid:
            return np.zeros(self.k), d_zero
        return mid, d_mid

    def to_json(self):
        return {"type": "lq_grid", "k": self.k, "q": self.q.to_json(), "eps": self.radius}


def lq_ball_net(k, q, eps):
    """
    Deterministic grid net of the unit ball of l_q^k.

    Args:
        k: dimension
        q: Exponent
        eps: covering radius in (0, 1]

    Returns:
        GridNet; raises CapacityError when it would exceed GRID_CAPACITY points
    """
    if k < 1:
        raise InvalidInputError("k must be at least 1", k=k)
    if not 0 < eps <= 1:
        raise InvalidInputError("eps must lie in (0, 1]", eps=eps)
    net = GridNet(k, q, eps)
    if net.box_size + 1 > GRID_CAPACITY:
        raise CapacityError(
            "grid net would exceed capacity; use a coarser eps",
            k=k, q=str(net.q), eps=eps, box_size=net.box_size, capacity=GRID_CAPACITY,
        )
    return net
