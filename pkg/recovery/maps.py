"""
Information Maps
Linear measurements A(X) = (<A_1, X>, ..., <A_m, X>) of N x N matrices
under the Frobenius pairing.
"""
from dataclasses import dataclass

import numpy as np

from core.errors import InvalidInputError


@dataclass(frozen=True)
class InformationMap:
    """m sensor matrices stacked as an (m, N, N) array."""

    sensors: np.ndarray

    def __post_init__(self):
        sensors = np.asarray(self.sensors, dtype=float)
        if sensors.ndim != 3 or sensors.shape[1] != sensors.shape[2] or sensors.shape[0] < 1:
            raise InvalidInputError("sensors must have shape (m, N, N) with m >= 1", shape=list(sensors.shape))
        object.__setattr__(self, "sensors", sensors)

    @property
    def m(self):
        return self.sensors.shape[0]

    @property
    def n_dim(self):
        return self.sensors.shape[1]

    @property
    def matrix(self):
        """The m x N^2 matrix of the map on row-major vectorizations."""
        return self.sensors.reshape(self.m, -1)

    def apply(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n_dim, self.n_dim):
            raise InvalidInputError("matrix does not match the map", shape=list(x.shape), n_dim=self.n_dim)
        return self.matrix @ x.reshape(-1)

    def adjoint(self, y):
        """A*(y) = sum_i y_i A_i."""
        y = np.asarray(y, dtype=float)
        if y.shape != (self.m,):
            raise InvalidInputError("measurement vector does not match the map", shape=list(y.shape), m=self.m)
        return (self.matrix.T @ y).reshape(self.n_dim, self.n_dim)

    def condition_number(self):
        return float(np.linalg.cond(self.matrix))


def make_information_map(n_dim, m, stream):
    """Gaussian sensors with i.i.d. N(0, 1/m) entries drawn from ``stream``."""
    if m < 1:
        raise InvalidInputError("m must be at least 1", m=m)
    if n_dim < 1:
        raise InvalidInputError("n_dim must be at least 1", n_dim=n_dim)
    g = stream.generator().standard_normal((m, n_dim, n_dim))
    return InformationMap(sensors=g / np.sqrt(m))


def basis_information_map(n_dim):
    """The N^2 standard basis sensors E_ij; A* A is the identity."""
    d = n_dim * n_dim
    return InformationMap(sensors=np.eye(d).reshape(d, n_dim, n_dim))
