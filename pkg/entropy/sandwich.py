"""
Sandwich Reports
Upper and lower bounds on e_n(id: S_p^N -> S_q^N) side by side with the
theoretical rate, at the indices n = 2^l N.

Upper bounds come from the dyadic product net when p < q and from the
entrywise lattice (plus greedy nets for tiny N) when q <= p. Lower bounds
are the best of the volume comparison and the available packings. Since
e_n is non-increasing in n, every upper bound is carried forward to larger
n and every lower bound back to smaller n before the rows are checked.
"""
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.stats

from config import (
    DEFAULT_ALPHA,
    DEFAULT_C_Q,
    GREEDY_UPPER_MAX_DIM,
    SANDWICH_AUDIT_SAMPLES,
    SANDWICH_MC_MAX_DIM,
    SANDWICH_VOLUME_SAMPLES,
)
from core.errors import BudgetExhaustedError, DegenerateEstimateError, DegeneratePackingError, NumericFailureError
from core.exponents import exponent
from core.schatten import BallSpec, RateQuery, embedding_norm, factorization_upper, theory_rate
from entropy.bounds import (
    EntropyBound,
    index_for_cardinality,
    lattice_upper,
    lower_from_packing,
    lower_from_volume,
    volume_ratio_bound,
)
from entropy.packing import grassmann_packing_lower
from nets.greedy import greedy_separated_set
from nets.metrics import schatten_metric
from nets.product import audit_quantizer, schatten_net_build
from sampling.random_matrices import rejection_batch, sample_ball_points
from volumes.balls import schatten_ball_volume_mc

logger = logging.getLogger(__name__)

GREEDY_UPPER_MAX_POINTS = 256


@dataclass
class SandwichRow:
    entropy_index: int
    level: int
    lower: float
    upper: Optional[float]
    theory: float
    method_lower: str
    method_upper: str
    certified_n: Optional[int] = None
    extras: dict = field(default_factory=dict)

    @property
    def ratio(self):
        if self.upper is None or self.lower <= 0:
            return None
        return self.upper / self.lower

    def to_json(self):
        return {
            "n": self.entropy_index,
            "level": self.level,
            "lower": self.lower,
            "upper": self.upper,
            "theory": self.theory,
            "ratio": self.ratio,
            "certified_n": self.certified_n,
            "method_lower": self.method_lower,
            "method_upper": self.method_upper,
            **self.extras,
        }


@dataclass
class SandwichReport:
    p: object
    q: object
    n_dim: int
    rows: list
    provenance: dict = field(default_factory=dict)

    def middle_slope(self):
        """Slope of log upper against log n over N <= n <= N^2, or None with fewer than two rows."""
        pts = [
            (r.entropy_index, r.upper) for r in self.rows
            if r.upper is not None and self.n_dim <= r.entropy_index <= self.n_dim**2
        ]
        if len(pts) < 2:
            return None
        n, upper = zip(*pts)
        return float(scipy.stats.linregress(np.log(n), np.log(upper)).slope)

    def to_json(self):
        return {
            "p": str(self.p),
            "q": str(self.q),
            "n_dim": self.n_dim,
            "rows": [r.to_json() for r in self.rows],
            "middle_slope": self.middle_slope(),
            "provenance": self.provenance,
        }

    def csv_rows(self):
        header = ["n", "lower", "upper", "theory", "ratio"]
        return header, [[r.entropy_index, r.lower, r.upper, r.theory, r.ratio] for r in self.rows]


def volume_ratio_root(p, q, n_dim, stream, n_samples=SANDWICH_VOLUME_SAMPLES, threads=None):
    """
    (vol B_p / vol B_q)^(1/N^2) and the method used.

    Monte Carlo up to SANDWICH_MC_MAX_DIM, never below the inclusion bound.
    """
    p, q = exponent(p), exponent(q)
    bound = volume_ratio_bound(p, q, n_dim)
    if p == q:
        return 1.0, "volume-exact"
    if n_dim > SANDWICH_MC_MAX_DIM:
        return bound, "volume-inclusion"
    try:
        vol_p = schatten_ball_volume_mc(BallSpec(n_dim, p), n_samples, stream.child("volume", str(p)), threads)
        vol_q = schatten_ball_volume_mc(BallSpec(n_dim, q), n_samples, stream.child("volume", str(q)), threads)
    except DegenerateEstimateError as e:
        logger.warning("volume Monte Carlo failed (%s); using the inclusion bound", e)
        return bound, "volume-inclusion"
    ratio = vol_p.value / vol_q.value
    if ratio <= bound:
        return bound, "volume-inclusion"
    return ratio, "volume-mc"


def _ball_sampler(spec, stream, batch_size=256, max_tries=1000):
    def sample(index):
        for attempt in range(max_tries):
            rng = stream.child("greedy-upper", index, attempt).generator()
            accepted, _ = rejection_batch(spec, batch_size, rng)
            if len(accepted):
                return accepted
        raise BudgetExhaustedError("no ball samples for the greedy net", n_dim=spec.n_dim, p=str(spec.p))

    return sample


def greedy_upper_ladder(p, q, n_dim, stream, max_points=GREEDY_UPPER_MAX_POINTS):
    """
    Greedy S_q nets of B_p^N at radii emb * 2^(-i/2) until they grow past ``max_points``.

    Each net is both a covering (upper bound at its index) and a packing
    (lower bound at its packing index).

    Returns:
        (upper bounds, lower bounds)
    """
    spec = BallSpec(n_dim, p)
    emb = embedding_norm(p, q, n_dim)
    uppers, lowers = [], []
    i = 1
    while True:
        delta = emb * 2.0 ** (-i / 2)
        net = greedy_separated_set(_ball_sampler(spec, stream.child("ladder", i)), schatten_metric(q), delta)
        if len(net) > max_points:
            break
        uppers.append(EntropyBound(
            entropy_index=index_for_cardinality(len(net)), upper=delta, method_upper="greedy-net"
        ))
        if len(net) >= 2:
            lowers.append(lower_from_packing(len(net), delta, q, method="greedy-packing"))
        i += 1
    return uppers, lowers


def _audit_samples(p, n_dim, stream, count):
    spec = BallSpec(n_dim, p)
    half = max(1, count // 2)
    return (
        sample_ball_points(spec, "spectral", stream, half)
        + sample_ball_points(spec, "low_rank", stream, count - half)
    )


def sandwich_report(p, q, n_dim, levels, stream, alpha=DEFAULT_ALPHA, c_q=DEFAULT_C_Q, packing_k=1,
                    volume_samples=SANDWICH_VOLUME_SAMPLES, audit_samples=SANDWICH_AUDIT_SAMPLES, threads=None):
    """
    Bounds on e_n(S_p^N -> S_q^N) at n = 2^l N for every l in ``levels``.

    Args:
        p, q: exponents
        n_dim: N
        levels: dyadic levels l (2^l <= N when p < q)
        stream: StreamKey
        alpha, c_q: product net parameters
        packing_k: subspace dimension of the Grassmann packing
        volume_samples: proposals per Monte Carlo volume
        audit_samples: quantizer audit size per level (p < q)
        threads: worker threads

    Returns:
        SandwichReport with rows sorted by n
    """
    p, q = exponent(p), exponent(q)
    levels = sorted(set(int(level) for level in levels))
    ratio, volume_method = volume_ratio_root(p, q, n_dim, stream, volume_samples, threads)
    provenance = {
        "master_seed": stream.master_seed,
        "stream_index": stream.stream_index,
        "volume_ratio_root": ratio,
        "volume_method": volume_method,
        "levels": levels,
    }

    packing_bounds = []
    if q.value >= 1 and 2 * packing_k <= n_dim:
        try:
            bound, size = grassmann_packing_lower(n_dim, packing_k, p, q, stream.child("packing"))
            packing_bounds.append(bound)
            provenance["grassmann_packing"] = {"k": packing_k, "size": size, "n": bound.entropy_index}
        except DegeneratePackingError as e:
            logger.warning("no Grassmann packing: %s", e)

    greedy_uppers = []
    if p.value >= q.value and n_dim <= GREEDY_UPPER_MAX_DIM:
        greedy_uppers, greedy_lowers = greedy_upper_ladder(p, q, n_dim, stream.child("greedy"))
        packing_bounds.extend(greedy_lowers)
        provenance["greedy_nets"] = [b.to_json() for b in greedy_uppers]

    rows = []
    for level in levels:
        n = 2**level * n_dim
        extras = {}
        certified = None
        if p.value < q.value:
            net = schatten_net_build(n_dim, p, q, level, alpha, c_q, stream.child("net", level))
            audit = audit_quantizer(net, _audit_samples(p, n_dim, stream.child("audit", level), audit_samples))
            if audit["violations"]:
                raise NumericFailureError("quantizer exceeded its error budget", level=level, **audit)
            upper, method_upper = net.error_budget, "product-net"
            certified = net.certified_index
            extras = {
                "log2_cardinality": net.log2_cardinality,
                "gamma": net.summary()["gamma"],
                "audit_worst_error": audit["worst_error"],
            }
        else:
            bound = lattice_upper(p, q, n, n_dim)
            upper, method_upper = bound.upper, bound.method_upper
            for g in greedy_uppers:
                if g.entropy_index <= n and g.upper < upper:
                    upper, method_upper = g.upper, g.method_upper
            extras = {"factorization_upper": factorization_upper(p, q, n, n_dim)}

        lower_bound = lower_from_volume(p, q, n, n_dim, ratio, method=volume_method)
        lower, method_lower = lower_bound.lower, lower_bound.method_lower
        for b in packing_bounds:
            if n <= b.entropy_index and b.lower > lower:
                lower, method_lower = b.lower, b.method_lower

        rows.append(SandwichRow(
            entropy_index=n,
            level=level,
            lower=lower,
            upper=upper,
            theory=theory_rate(RateQuery(p, q, n, n_dim)),
            method_lower=method_lower,
            method_upper=method_upper,
            certified_n=certified,
            extras=extras,
        ))

    _tighten(rows)
    for row in rows:
        if row.upper is None:
            logger.warning("row n=%d has no upper bound", row.entropy_index)
        elif row.lower > row.upper + 1e-12:
            raise NumericFailureError(
                "lower bound exceeds upper bound", n=row.entropy_index, lower=row.lower, upper=row.upper
            )
    return SandwichReport(p=p, q=q, n_dim=n_dim, rows=rows, provenance=provenance)


def _tighten(rows):
    """Carry upper bounds forward and lower bounds backward in n."""
    rows.sort(key=lambda r: r.entropy_index)
    best = None
    for row in rows:
        if best is not None and (row.upper is None or best.upper < row.upper):
            row.upper, row.method_upper = best.upper, best.method_upper
        if row.upper is not None:
            best = row
    best = None
    for row in reversed(rows):
        if best is not None and best.lower > row.lower:
            row.lower, row.method_lower = best.lower, best.method_lower
        best = row if best is None or row.lower >= best.lower else best

