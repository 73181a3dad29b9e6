"""
Recovery Experiment
Worst observed S_q error of one (information map, IHT) pair over a pool of
B_p^N instances, against the lower bound min(1, N/m)^(1/p-1/q) that holds
for every pair. Only one-sided consistency can be checked: the observed
worst case must not fall far below the bound.
"""
import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.stats

from config import IHT_ITERS, RECOVERY_POOL_RANKS
from core.errors import InvalidInputError
from core.exponents import exponent, rate_gap
from core.schatten import lq_norm, schatten_norm
from recovery.iht import iht_with_backtracking
from recovery.maps import basis_information_map, make_information_map
from sampling.parallel import parallel_map
from sampling.random_matrices import haar_orthogonal

logger = logging.getLogger(__name__)

DEFAULT_RECOVERY_RANK = 4


def theory_lower(n_dim, m, p, q):
    """min(1, N/m)^(1/p - 1/q)."""
    return min(1.0, n_dim / m) ** rate_gap(p, q)


def adversarial_instance(n_dim, p, stream, index):
    """
    Instance ``index`` of the pool: rank-r spectra for r in RECOVERY_POOL_RANKS,
    then a flat spectrum, cycling; every instance has ||X||_p = 1.
    """
    p = exponent(p)
    rng = stream.generator()
    kinds = [r for r in RECOVERY_POOL_RANKS if r <= n_dim] + ["flat"]
    kind = kinds[index % len(kinds)]
    sigma = np.zeros(n_dim)
    if kind == "flat":
        sigma[:] = 1.0
    else:
        sigma[:kind] = np.sort(np.abs(rng.standard_normal(kind)) + 1e-3)[::-1]
    sigma /= float(lq_norm(sigma, p))
    u = haar_orthogonal(n_dim, stream.child("u"))
    v = haar_orthogonal(n_dim, stream.child("v"))
    return (u * sigma) @ v.T


@dataclass
class RecoveryReport:
    n_dim: int
    m_grid: list
    p: object
    q: object
    worst_errors: list
    median_errors: list
    theory_lower: list
    rank: int
    trials: int
    step: object
    basis_override: bool = False
    extras: dict = field(default_factory=dict)

    def _gaussian_rows(self):
        """(m, worst, lower) rows measured with Gaussian maps; the basis override row is excluded."""
        rows = zip(self.m_grid, self.worst_errors, self.theory_lower)
        if not self.basis_override:
            return list(rows)
        return [row for row in rows if row[0] != self.n_dim**2]

    def exact_recovery_error(self):
        """Worst error at m = N^2 with standard basis sensors, or None without the override."""
        if not self.basis_override or self.m_grid[-1] != self.n_dim**2:
            return None
        return self.worst_errors[-1]

    def spearman(self):
        """Rank correlation of (m, worst error); None when it is undefined."""
        rows = self._gaussian_rows()
        if len(rows) < 2:
            return None
        rho = scipy.stats.spearmanr([r[0] for r in rows], [r[1] for r in rows])[0]
        return None if np.isnan(rho) else float(rho)

    def consistency_margin(self):
        """min over Gaussian-map rows of worst_error / theory_lower; at least 0.1 expected."""
        rows = self._gaussian_rows()
        if not rows:
            return None
        return min(w / t for _, w, t in rows)

    def to_json(self):
        return {
            "n_dim": self.n_dim,
            "p": str(self.p),
            "q": str(self.q),
            "rank": self.rank,
            "trials": self.trials,
            "step": self.step,
            "basis_override": self.basis_override,
            "rows": [
                {"m": m, "worst_error": w, "median_error": med, "theory_lower": t}
                for m, w, med, t in zip(self.m_grid, self.worst_errors, self.median_errors, self.theory_lower)
            ],
            "spearman": self.spearman(),
            "consistency_margin": self.consistency_margin(),
            "exact_recovery_error": self.exact_recovery_error(),
            "note": "worst error of one (map, recovery) pair; checks consistency with the lower bound, not tightness",
            **self.extras,
        }

    def csv_rows(self):
        header = ["m", "worst_error", "theory_lower"]
        return header, [[m, w, t] for m, w, t in zip(self.m_grid, self.worst_errors, self.theory_lower)]


def em_experiment(n_dim, m_grid, p, q, trials, stream, rank=DEFAULT_RECOVERY_RANK, iters=IHT_ITERS, step="auto",
                  basis_override=False, threads=None):
    """
    Worst-case S_q recovery error for each m in ``m_grid``.

    Args:
        n_dim: N
        m_grid: measurement counts within [1, N^2]
        p, q: exponents with p <= q
        trials: instances per m
        stream: StreamKey
        rank: rank of the IHT recovery map
        iters: IHT iterations
        step: IHT step (a number or "auto")
        basis_override: use the standard basis map at m = N^2
        threads: worker threads for the trials

    Returns:
        RecoveryReport
    """
    p, q = exponent(p), exponent(q)
    if p.value > q.value:
        raise InvalidInputError("the recovery experiment needs p <= q", p=str(p), q=str(q))
    m_grid = sorted(set(int(m) for m in m_grid))
    if not m_grid or m_grid[0] < 1 or m_grid[-1] > n_dim**2:
        raise InvalidInputError("m_grid must lie in [1, N^2]", m_grid=m_grid, n_dim=n_dim)
    if trials < 1:
        raise InvalidInputError("trials must be at least 1", trials=trials)
    rank = min(rank, n_dim)

    worst, median, lower = [], [], []
    for m in m_grid:
        if basis_override and m == n_dim**2:
            info_map = basis_information_map(n_dim)
            recovery_rank = n_dim
        else:
            info_map = make_information_map(n_dim, m, stream.child("map", m))
            recovery_rank = rank

        def trial_error(t, info_map=info_map, recovery_rank=recovery_rank, m=m):
            x = adversarial_instance(n_dim, p, stream.child("instance", m, t), t)
            x_hat = iht_with_backtracking(info_map.apply(x), info_map, recovery_rank, iters=iters, step=step)
            return schatten_norm(x - x_hat, q)

        errors = parallel_map(trial_error, range(trials), threads)
        worst.append(float(np.max(errors)))
        median.append(float(np.median(errors)))
        lower.append(theory_lower(n_dim, m, p, q))
        logger.info("m=%d: worst S_%s error %.4g, bound %.4g", m, q, worst[-1], lower[-1])

    return RecoveryReport(
        n_dim=n_dim, m_grid=m_grid, p=p, q=q, worst_errors=worst, median_errors=median,
        theory_lower=lower, rank=rank, trials=trials, step=step, basis_override=basis_override,
        extras={"master_seed": stream.master_seed},
    )
