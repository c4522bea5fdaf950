"""Shared helpers for the test suite."""

import itertools

from tcellsim.model import ActiveCellTable, ModelParams, Scenario

_BASE = dict(
    s0=0.0,
    lambda_t=0.0,
    lambda_n=0.0,
    mu_n=0.0,
    mu_np=0.0,
    c=0.0,
    lambda_mn=0.0,
    mu_m=0.0,
    lambda_a=0.0,
    n_bar_p=1.0,
    s_bar=0.0,
    b=0.0,
)


def make_params(**overrides) -> ModelParams:
    """All-zero parameter set (n_bar_p=1) with selected overrides."""
    values = dict(_BASE)
    values.update(overrides)
    return ModelParams(**values)


def make_scenario(params: ModelParams, description: str = "synthetic") -> Scenario:
    return Scenario(id=1, description=description, params=params)


def flat_actives(count: float = 0.0) -> ActiveCellTable:
    return ActiveCellTable(points=((0.0, count),))


def brute_force_two_sided_p(x, y) -> float:
    """Permutation-null two-sided p via pairwise-comparison U.

    Independent oracle for the exact rank-sum path: enumerates every
    regrouping of the pooled values and computes U by direct pairwise
    comparison rather than via rank sums.
    """
    pooled = list(x) + list(y)
    n1 = len(x)
    idx = range(len(pooled))

    def u_of(group):
        rest = [i for i in idx if i not in group]
        u = 0.0
        for i in group:
            for j in rest:
                if pooled[i] > pooled[j]:
                    u += 1.0
                elif pooled[i] == pooled[j]:
                    u += 0.5
        return u

    u_obs = u_of(tuple(range(n1)))
    n1n2 = n1 * (len(pooled) - n1)
    u_lo = min(u_obs, n1n2 - u_obs)
    hits = 0
    total = 0
    for group in itertools.combinations(idx, n1):
        u = u_of(group)
        total += 1
        if u <= u_lo or u >= n1n2 - u_lo:
            hits += 1
    return hits / total
