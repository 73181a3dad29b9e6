"""
Entropy Bounds
Turns coverings, packings and volume ratios into bounds on the dyadic
entropy numbers e_n(id: S_p^N -> S_q^N).

e_n is the least eps such that B_p^N is covered by 2^(n-1) eps-balls of
S_q^N, so a net with M points certifies e_n for every n with 2^(n-1) >= M.
"""
import math
from dataclasses import dataclass
from typing import Optional

from core.errors import InvalidInputError
from core.exponents import exponent
from core.schatten import embedding_norm


@dataclass(frozen=True)
class EntropyBound:
    entropy_index: int
    lower: float = 0.0
    upper: Optional[float] = None
    method_lower: str = "none"
    method_upper: str = "none"

    def __post_init__(self):
        if self.entropy_index < 1:
            raise InvalidInputError("entropy_index must be at least 1", entropy_index=self.entropy_index)
        if self.lower < 0:
            raise InvalidInputError("lower bound must be non-negative", lower=self.lower)
        if self.upper is not None and self.lower > self.upper + 1e-12:
            raise InvalidInputError(
                "lower bound exceeds upper bound",
                entropy_index=self.entropy_index, lower=self.lower, upper=self.upper,
            )

    def to_json(self):
        return dict(self.__dict__)


def oracle_dim1(entropy_index):
    """e_n of [-1, 1] in itself: exactly 2^(1-n)."""
    if entropy_index < 1:
        raise InvalidInputError("entropy_index must be at least 1", entropy_index=entropy_index)
    return 2.0 ** (1 - entropy_index)


def index_for_cardinality(cardinality):
    """Smallest n with 2^(n-1) >= cardinality."""
    return (int(cardinality) - 1).bit_length() + 1


def certified_index(log2_cardinality):
    """index_for_cardinality from log2 M, for nets too large to count exactly."""
    return math.ceil(log2_cardinality - 1e-9) + 1


def upper_from_net(net_cardinality, covering_radius):
    """
    e_n <= covering_radius at the smallest n with 2^(n-1) >= M.

    The index is the certified one, ceil(log2 M) + 1, so a net never
    claims e_n one step early.

    A cardinality of 8 lands on e_4, one of 5 on e_4 as well.
    """
    m = int(net_cardinality)
    if m < 1:
        raise InvalidInputError("net cardinality must be at least 1", cardinality=m)
    return EntropyBound(entropy_index=index_for_cardinality(m), upper=float(covering_radius), method_upper="net")


def upper_from_log2(log2_cardinality, covering_radius, method="net"):
    """upper_from_net for nets too large to count exactly."""
    if log2_cardinality < 0:
        raise InvalidInputError("log2 cardinality must be non-negative", log2_cardinality=log2_cardinality)
    n = certified_index(log2_cardinality)
    return EntropyBound(entropy_index=n, upper=float(covering_radius), method_upper=method)


def lower_from_volume(p, q, entropy_index, n_dim, vol_ratio_root, method="volume"):
    """
    e_n >= (vol B_p / vol B_q)^(1/N^2) * 2^(-(n-1)/N^2).

    Covering B_p by 2^(n-1) balls of radius eps in S_q forces
    vol(B_p) <= 2^(n-1) eps^(N^2) vol(B_q).
    """
    if vol_ratio_root <= 0:
        raise InvalidInputError("volume ratio must be positive", vol_ratio_root=vol_ratio_root)
    lower = vol_ratio_root * 2.0 ** (-(entropy_index - 1) / n_dim**2)
    return EntropyBound(entropy_index=entropy_index, lower=lower, method_lower=method)


def lower_from_packing(packing_size, separation, q, method="packing"):
    """
    Pigeonhole bound from a separated set of the source ball.

    If 2^(n-1) < M, two of the M points share a covering ball, and the
    qbar-triangle inequality gives separation^qbar <= 2 eps^qbar.
    """
    m = int(packing_size)
    if m < 2:
        raise InvalidInputError("a packing needs at least two points", packing_size=m)
    qbar = exponent(q).bar
    n = (m - 1).bit_length()
    return EntropyBound(entropy_index=n, lower=separation / 2.0 ** (1.0 / qbar), method_lower=method)


def volume_ratio_bound(p, q, n_dim):
    """
    Lower bound on (vol B_p / vol B_q)^(1/N^2) from ball inclusions.

    N^(1/q-1/p) B_q is inside B_p when p <= q, and B_q is inside B_p when q <= p.
    """
    p, q = exponent(p), exponent(q)
    if p.value <= q.value:
        return float(n_dim) ** (q.inv - p.inv)
    return 1.0


def trivial_upper(p, q, entropy_index, n_dim):
    """The one-point net {0}: e_n <= e_1 <= ||id: S_p -> S_q||."""
    return EntropyBound(
        entropy_index=entropy_index, upper=embedding_norm(p, q, n_dim), method_upper="zero-net"
    )


def lattice_cells(entropy_index, n_dim):
    """Largest c with c^(N^2) <= 2^(n-1), in integer arithmetic."""
    d = n_dim * n_dim
    budget = 2 ** (entropy_index - 1)
    c = max(1, int(2.0 ** ((entropy_index - 1) / d)))
    while c > 1 and c**d > budget:
        c -= 1
    while (c + 1) ** d <= budget:
        c += 1
    return c


def lattice_upper(p, q, entropy_index, n_dim):
    """
    Entrywise midpoint lattice on [-1, 1]^(N x N), valid when q <= p.

    Entries of A in B_p^N are bounded by sigma_1 <= 1. With c cells per axis
    each entry moves by at most 1/c, so ||A - A~||_2 <= N/c and
    ||A - A~||_q <= N^max(0, 1/q-1/2) * N / c.

    Returns:
        EntropyBound at ``entropy_index``, or the zero-net bound when it is smaller
    """
    p, q = exponent(p), exponent(q)
    if q.value > p.value:
        raise InvalidInputError("the lattice route needs q <= p", p=str(p), q=str(q))
    c = lattice_cells(entropy_index, n_dim)
    radius = float(n_dim) ** max(0.0, q.inv - 0.5) * n_dim / c
    trivial = trivial_upper(p, q, entropy_index, n_dim)
    if radius >= trivial.upper:
        return trivial
    return EntropyBound(entropy_index=entropy_index, upper=radius, method_upper="lattice")
