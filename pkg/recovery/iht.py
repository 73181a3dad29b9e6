"""
Iterative Hard Thresholding
X <- H_r(X + mu A*(y - A(X))) from X = 0, where H_r keeps the r largest
singular values.
"""
import logging

import numpy as np

from config import IHT_DIVERGENCE_WINDOW, IHT_ITERS, IHT_MAX_HALVINGS, IHT_STEP
from core.errors import DivergedError, InvalidInputError
from core.schatten import truncate_rank

logger = logging.getLogger(__name__)


def hard_threshold(x, rank):
    """Best rank-``rank`` approximation and its singular subspaces."""
    return truncate_rank(x, rank, subspaces=True)


def _auto_step(gradient, info_map, u, v):
    """Exact line search along the gradient projected onto the current row and column spaces."""
    pu = u @ (u.T @ gradient)
    projected = pu + (gradient @ v) @ v.T - (pu @ v) @ v.T
    num = float(np.sum(projected * projected))
    den = float(np.sum(info_map.apply(projected) ** 2))
    if num == 0.0 or den == 0.0:
        return IHT_STEP
    return num / den


def iht_recover(y, info_map, rank, iters=IHT_ITERS, step=IHT_STEP, tol=1e-12):
    """
    Recover a rank-``rank`` matrix from y = A(X).

    Args:
        y: measurement vector of length m
        info_map: InformationMap
        rank: target rank r >= 1
        iters: iteration cap
        step: fixed step mu, or "auto" for the normalized step
        tol: stop once ||y - A(X)|| <= tol * ||y||

    Returns:
        final iterate; raises DivergedError (with the residual trace) when the
        residual grows for IHT_DIVERGENCE_WINDOW iterations in a row
    """
    if rank < 1:
        raise InvalidInputError("rank must be at least 1", rank=rank)
    if iters < 1:
        raise InvalidInputError("iters must be at least 1", iters=iters)
    if step != "auto" and not step > 0:
        raise InvalidInputError("step must be positive or 'auto'", step=step)
    y = np.asarray(y, dtype=float)
    n = info_map.n_dim
    x = np.zeros((n, n))
    y_norm = float(np.linalg.norm(y))
    if y_norm == 0.0:
        return x

    residual = y.copy()
    trace = [y_norm]
    growth = 0
    u = v = None
    for _ in range(iters):
        gradient = info_map.adjoint(residual)
        if step == "auto":
            if u is None:
                _, u, v = hard_threshold(gradient, rank)
            mu = _auto_step(gradient, info_map, u, v)
        else:
            mu = step
        x, u, v = hard_threshold(x + mu * gradient, rank)
        residual = y - info_map.apply(x)
        r = float(np.linalg.norm(residual))
        if not np.isfinite(r):
            raise DivergedError("IHT produced a non-finite residual", trace=trace, step=step)
        # growth at round-off level is noise
        growth = growth + 1 if r > trace[-1] and r > 1e-10 * y_norm else 0
        trace.append(r)
        if growth >= IHT_DIVERGENCE_WINDOW:
            raise DivergedError(
                f"IHT residual grew for {growth} consecutive iterations", trace=trace, step=step
            )
        if r <= tol * y_norm:
            break
    return x


def iht_with_backtracking(y, info_map, rank, iters=IHT_ITERS, step=IHT_STEP):
    """
    iht_recover, halving the step on divergence.

    A divergent "auto" run falls back to IHT_STEP and halves from there.
    """
    current = step
    for attempt in range(IHT_MAX_HALVINGS + 1):
        try:
            return iht_recover(y, info_map, rank, iters=iters, step=current)
        except DivergedError as e:
            if attempt == IHT_MAX_HALVINGS:
                raise
            next_step = IHT_STEP if current == "auto" else current / 2
            logger.warning("IHT diverged at step %s, retrying with %s (%s)", current, next_step, e)
            current = next_step
