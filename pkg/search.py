"""
Least order m with beta_m(t) <= lin_upper(t, 1).

beta_m(t) decreases in m toward L(t, 1), so the predicate is monotone in m
and bisection over [1, m_max] finds the first success. min_order_scan walks
m = 1, 2, ... with the same predicate and serves as its oracle.
"""
import logging
import math
from typing import Iterable

from scalar_means import beta_m, lin_upper, log_mean

logger = logging.getLogger(__name__)

DEFAULT_M_MAX = 10 ** 6


def _validate(t: float, m_max: int) -> tuple[float, int]:
    if not (math.isfinite(t) and t > 0):
        raise ValueError(f"t must be a positive finite real, got {t!r}")
    if isinstance(m_max, bool) or not isinstance(m_max, int) or m_max < 2:
        raise ValueError(f"m_max must be an integer >= 2, got {m_max!r}")
    return float(t), m_max


def beats_lin(t: float, m: int) -> bool:
    """beta_m(t) <= ((t^{1/3} + 1)/2)^3."""
    return beta_m(t, m) <= lin_upper((t, 1.0))


def min_order_binary(t: float, m_max: int = DEFAULT_M_MAX) -> int | None:
    """
    Bisection for the least m in [1, m_max] with beats_lin(t, m).

    Returns:
        The minimal order, or None when even m_max does not beat Lin.
    """
    t, m_max = _validate(t, m_max)
    if not beats_lin(t, m_max):
        logger.info("No order up to %d beats Lin at t=%r", m_max, t)
        return None
    lo, hi = 1, m_max
    while lo < hi:
        mid = (lo + hi) // 2
        if beats_lin(t, mid):
            hi = mid
        else:
            lo = mid + 1
        logger.debug("t=%r bisection window [%d, %d]", t, lo, hi)
    return lo


def min_order_scan(t: float, m_max: int = DEFAULT_M_MAX) -> int | None:
    """Linear scan m = 1, 2, ...; stops at the first success."""
    t, m_max = _validate(t, m_max)
    for m in range(1, m_max + 1):
        if beats_lin(t, m):
            return m
    return None


def search_grid(t_grid: Iterable[float], m_max: int = DEFAULT_M_MAX) -> tuple[list[dict], dict]:
    """
    Minimal order for each t of a grid, with a summary of how it varies.

    Returns:
        (rows, summary). Each row holds t, min_m (None means NOT_FOUND),
        beta at the minimal order, lin_upper and the log mean. The summary
        holds the grid maximum, the t where it occurs and whether the
        minimum is non-increasing as t moves away from 1 on either side.

    Example:
        >>> rows, summary = search_grid([0.25, 1.0, 4.0], m_max=100)
        >>> [row["min_m"] for row in rows]
        [18, 1, 18]
    """
    grid = [float(t) for t in t_grid]
    if not grid:
        raise ValueError("t grid must not be empty")
    rows = []
    for t in grid:
        m = min_order_binary(t, m_max)
        rows.append({
            "t": t,
            "min_m": m,
            "beta_at_min": beta_m(t, m) if m is not None else None,
            "lin_upper": lin_upper((t, 1.0)),
            "log_mean": log_mean((t, 1.0)),
        })

    def rank(row):
        return math.inf if row["min_m"] is None else row["min_m"]

    worst = max(rows, key=rank)
    above = sorted((r for r in rows if r["t"] > 1.0), key=lambda r: r["t"])
    below = sorted((r for r in rows if r["t"] < 1.0), key=lambda r: -r["t"])
    monotone = all(rank(b) <= rank(a) for side in (above, below) for a, b in zip(side, side[1:]))
    summary = {
        "m_max": m_max,
        "grid_max": worst["min_m"],
        "grid_max_t": worst["t"],
        "not_found": sum(r["min_m"] is None for r in rows),
        "decreasing_away_from_one": monotone,
    }
    logger.info("Minimal-order search over %d points: grid max %s at t=%r",
                len(rows), summary["grid_max"], summary["grid_max_t"])
    return rows, summary
