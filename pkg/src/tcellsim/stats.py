"""Rank-sum comparison of paradigm outputs.

Implements the two-sided Wilcoxon rank-sum (Mann-Whitney) test with
midranks for ties. Small tie-free samples are tested against the exact
null distribution of the U statistic; larger or tied samples use the
normal approximation with tie and continuity corrections.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .trajectory import QUANTITIES, Trajectory, same_grid

EXACT_METHOD = "exact-enumeration"
NORMAL_METHOD = "normal-approximation"

# Exact enumeration is used for pooled sizes up to this bound (tie-free).
_EXACT_LIMIT = 20


@dataclass(frozen=True)
class RankSumResult:
    """U statistic of the first sample, two-sided p and the method used."""

    u_statistic: float
    p_value: float
    method: str


@dataclass(frozen=True)
class TrajectoryComparison:
    """Rank-sum result plus pointwise error summaries for one quantity."""

    quantity: str
    result: RankSumResult
    rms_difference: float
    max_difference: float


def _midranks(pooled: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Ranks 1..n with tied values sharing their average rank."""
    n = len(pooled)
    order = np.argsort(pooled, kind="stable")
    svals = pooled[order]
    ranks = np.empty(n)
    tie_counts = []
    i = 0
    while i < n:
        j = i + 1
        while j < n and svals[j] == svals[i]:
            j += 1
        ranks[order[i:j]] = 0.5 * (i + j + 1)
        tie_counts.append(j - i)
        i = j
    return ranks, tie_counts


def _exact_u_counts(n1: int, n2: int) -> np.ndarray:
    """Null distribution of U as subset counts indexed by U in 0..n1*n2."""
    n = n1 + n2
    max_sum = n1 * n
    dp = np.zeros((n1 + 1, max_sum + 1), dtype=np.int64)
    dp[0, 0] = 1
    for r in range(1, n + 1):
        for k in range(min(r, n1), 0, -1):
            dp[k, r:] += dp[k - 1, : max_sum + 1 - r]
    min_sum = n1 * (n1 + 1) // 2
    return dp[n1, min_sum : min_sum + n1 * n2 + 1]


def _exact_two_sided_p(n1: int, n2: int, u1: float) -> float:
    counts = _exact_u_counts(n1, n2)
    total = int(counts.sum())
    u = int(round(u1))
    u_lo = min(u, n1 * n2 - u)
    support = np.arange(n1 * n2 + 1)
    tail = (support <= u_lo) | (support >= n1 * n2 - u_lo)
    return float(int(counts[tail].sum()) / total)


def _normal_two_sided_p(n1: int, n2: int, u1: float, tie_counts: list[int]) -> float:
    n = n1 + n2
    correction = 1.0 - sum(t**3 - t for t in tie_counts) / float(n**3 - n)
    if correction <= 0.0:
        # Every pooled value identical: no evidence of any difference.
        return 1.0
    sd = math.sqrt(correction * n1 * n2 * (n + 1) / 12.0)
    z = (abs(u1 - n1 * n2 / 2.0) - 0.5) / sd
    if z < 0.0:
        z = 0.0
    return min(1.0, math.erfc(z / math.sqrt(2.0)))


def wilcoxon_rank_sum(x, y) -> RankSumResult:
    """Two-sided rank-sum test of whether x and y share a distribution."""
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    n1, n2 = len(x), len(y)
    if n1 == 0 or n2 == 0:
        raise ValueError("both samples must be non-empty")
    ranks, tie_counts = _midranks(np.concatenate([x, y]))
    u1 = float(ranks[:n1].sum() - n1 * (n1 + 1) / 2.0)
    has_ties = any(t > 1 for t in tie_counts)
    if not has_ties and n1 + n2 <= _EXACT_LIMIT:
        return RankSumResult(
            u_statistic=u1,
            p_value=_exact_two_sided_p(n1, n2, u1),
            method=EXACT_METHOD,
        )
    return RankSumResult(
        u_statistic=u1,
        p_value=_normal_two_sided_p(n1, n2, u1, tie_counts),
        method=NORMAL_METHOD,
    )


def compare_trajectories(a: Trajectory, b: Trajectory, quantity: str) -> TrajectoryComparison:
    """Rank-sum test plus RMS/max pointwise differences of one quantity."""
    if quantity not in QUANTITIES:
        raise ValueError(f"unknown quantity {quantity!r}; expected one of {QUANTITIES}")
    if not same_grid(a, b):
        raise ValueError("trajectories must share an identical time grid")
    sa = a.series(quantity)
    sb = b.series(quantity)
    diff = sa - sb
    return TrajectoryComparison(
        quantity=quantity,
        result=wilcoxon_rank_sum(sa, sb),
        rms_difference=float(np.sqrt(np.mean(diff**2))),
        max_difference=float(np.max(np.abs(diff))),
    )
