"""Core population model: parameters, state, scenarios and rate functions.

Quantities are blood densities (cells per mm^3) and rates are per year
unless stated otherwise. Four populations interact: naive T cells of
thymic origin (n), naive T cells produced by peripheral proliferation
(np), memory cells (m), and activated cells, which are not integrated but
read from a measured lookup table.

Everything in this module is a pure function of immutable values, so all
types are safe to share between threads or processes.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, fields

# Constants shared by every scenario: thymic output magnitude
# (cells/mm^3/year), thymic decay (output halves every 15.7 years), the
# thymic-naive and memory death rates, and the active-to-memory reversion
# rate (all per year).
THYMIC_OUTPUT_S0 = 56615.0
THYMIC_HALVING_YEARS = 15.7
THYMIC_DECAY_RATE = math.log(2) / THYMIC_HALVING_YEARS
THYMIC_NAIVE_DEATH_RATE = 4.4
MEMORY_DEATH_RATE = 0.05
ACTIVE_REVERSION_RATE = 1.0

# Total naive density (n + np) at which peripheral proliferation exactly
# balances proliferating-naive death under the derived proliferation rate.
PROLIFERATION_BALANCE_TOTAL = 300.0

# Naive cells of thymic origin present at birth, cells/mm^3.
INITIAL_THYMIC_NAIVE = 3673.0


@dataclass(frozen=True)
class ModelParams:
    """The full rate/constant set of the population model.

    Attributes:
        s0: thymic output magnitude, cells/mm^3/year.
        lambda_t: thymic decay rate, 1/year.
        lambda_n: thymic-naive to proliferating-naive conversion, 1/year.
        mu_n: thymic-naive death rate, 1/year.
        mu_np: proliferating-naive death rate, 1/year.
        c: peripheral proliferation rate, 1/year (0 disables proliferation).
        lambda_mn: memory to proliferating-naive reversion, 1/year.
        mu_m: memory death rate, 1/year.
        lambda_a: active to memory reversion, 1/year.
        n_bar_p: equilibrium proliferating-naive density, cells/mm^3.
        s_bar: thymic-export scaling value, dimensionless.
        b: death-rate asymmetry constant, dimensionless.
    """

    s0: float
    lambda_t: float
    lambda_n: float
    mu_n: float
    mu_np: float
    c: float
    lambda_mn: float
    mu_m: float
    lambda_a: float
    n_bar_p: float
    s_bar: float
    b: float

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"{f.name} must be finite and >= 0, got {value!r}")
        # n_bar_p appears in denominators of the homeostatic modifiers.
        if self.n_bar_p <= 0:
            raise ValueError(f"n_bar_p must be > 0, got {self.n_bar_p!r}")


@dataclass(frozen=True)
class StateVector:
    """Instantaneous population densities at time t (years)."""

    t: float
    n: float
    np: float
    m: float

    def __post_init__(self):
        if self.t < 0:
            raise ValueError(f"t must be >= 0, got {self.t!r}")
        for name in ("n", "np", "m"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)!r}")


@dataclass(frozen=True)
class Scenario:
    """One published parameterisation of the model."""

    id: int
    description: str
    params: ModelParams

    def __post_init__(self):
        if self.id not in SCENARIO_IDS:
            raise ValueError(f"scenario id must be in {sorted(SCENARIO_IDS)}, got {self.id!r}")


@dataclass(frozen=True)
class ActiveCellTable:
    """Lookup table of activated-cell density by age.

    Points are (age_years, cells/mm^3) pairs with strictly increasing ages.
    Between points the density is linearly interpolated; outside the covered
    range the nearest endpoint value is held constant.
    """

    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if len(self.points) == 0:
            raise ValueError("active cell table must contain at least one point")
        ages = [age for age, _ in self.points]
        for i, (age, count) in enumerate(self.points):
            if not (math.isfinite(age) and math.isfinite(count)):
                raise ValueError(f"point {i}: values must be finite")
            if count < 0:
                raise ValueError(f"point {i}: count must be >= 0, got {count!r}")
        if any(b <= a for a, b in zip(ages, ages[1:])):
            raise ValueError("ages must be strictly increasing")
        object.__setattr__(self, "_ages", tuple(ages))
        object.__setattr__(self, "_counts", tuple(c for _, c in self.points))


def lookup_active(t: float, actives: ActiveCellTable) -> float:
    """Activated-cell density at age t, by piecewise-linear interpolation."""
    ages = actives._ages
    counts = actives._counts
    if t <= ages[0]:
        return counts[0]
    if t >= ages[-1]:
        return counts[-1]
    i = bisect_right(ages, t)
    t0, t1 = ages[i - 1], ages[i]
    w = (t - t0) / (t1 - t0)
    return counts[i - 1] * (1.0 - w) + counts[i] * w


def export_modifier(np_density: float, params: ModelParams) -> float:
    """Homeostatic throttle on thymic export, in (0, 1].

    Equals 1 when s_bar is zero or the proliferating-naive pool is empty
    and falls towards 0 as that pool grows.
    """
    return 1.0 / (1.0 + params.s_bar * np_density / params.n_bar_p)


def death_modifier(np_density: float, params: ModelParams) -> float:
    """Density-dependent multiplier on the thymic-naive death rate.

    Rises monotonically from 1 towards 1 + b as the proliferating-naive
    pool grows; identically 1 when b is zero.
    """
    x = np_density / params.n_bar_p
    return 1.0 + params.b * x / (1.0 + x)


def dilution(n_density: float, np_density: float, params: ModelParams) -> float:
    """Crowding factor on peripheral proliferation, in (0, 1].

    Decreases monotonically as the total naive pool grows; halves when the
    total naive density reaches n_bar_p.
    """
    return 1.0 / (1.0 + (n_density + np_density) / params.n_bar_p)


def thymic_output(t: float, np_density: float, params: ModelParams) -> float:
    """Thymic production of new naive cells, cells/mm^3/year.

    An exponentially involuting source further throttled by the export
    modifier; strictly decreasing in t for a fixed proliferating pool.
    """
    return params.s0 * math.exp(-params.lambda_t * t) * export_modifier(np_density, params)


def peripheral_proliferation_rate(mu_n: float, n_bar_p: float) -> float:
    """Derived proliferation rate used by scenarios with active proliferation.

    Calibrated so that proliferation balances proliferating-naive death
    when the total naive pool sits at PROLIFERATION_BALANCE_TOTAL.
    """
    if n_bar_p <= 0:
        raise ValueError(f"n_bar_p must be > 0, got {n_bar_p!r}")
    return mu_n * (1.0 + PROLIFERATION_BALANCE_TOTAL / n_bar_p)


def derivatives(
    state: StateVector, params: ModelParams, actives: ActiveCellTable
) -> tuple[float, float, float]:
    """Instantaneous rates of change (dn/dt, dnp/dt, dm/dt), cells/mm^3/year.

    The thymic-naive pool gains thymic output and loses conversion and
    modified death; the proliferating pool gains conversion, net diluted
    proliferation and memory reversion; the memory pool gains reversion of
    activated cells and loses death and reversion to the naive phenotype.
    """
    p = params
    dn = thymic_output(state.t, state.np, p) - (
        p.lambda_n + p.mu_n * death_modifier(state.np, p)
    ) * state.n
    dnp = (
        p.lambda_n * state.n
        + (p.c * dilution(state.n, state.np, p) - p.mu_np) * state.np
        + p.lambda_mn * state.m
    )
    dm = p.lambda_a * lookup_active(state.t, actives) - (p.mu_m + p.lambda_mn) * state.m
    return dn, dnp, dm


def default_initial_state() -> StateVector:
    """State at birth: the thymic-naive pool only is populated."""
    return StateVector(t=0.0, n=INITIAL_THYMIC_NAIVE, np=0.0, m=0.0)


# Per-scenario values: lambda_n, lambda_mn, n_bar_p, s_bar, b, mu_np, and
# whether peripheral proliferation is active (c = 0 otherwise).
_SCENARIO_ROWS: dict[int, tuple[str, float, float, float, float, float, float, bool]] = {
    1: ("no peripheral proliferation; memory reversion active",
        0.22, 0.05, 387.0, 0.48, 3.4, 0.13, False),
    2: ("unrestricted thymic export and constant naive death rate",
        2.1, 0.0, 713.0, 0.0, 0.0, 4.4, True),
    3: ("density-dependent naive death rate, unrestricted thymic export",
        0.003, 0.0, 392.0, 0.0, 4.2, 4.4, True),
    4: ("density-restricted thymic export, constant naive death rate",
        0.005, 0.0, 378.0, 2.4, 0.0, 4.4, True),
    5: ("density-restricted thymic export and density-dependent death rate",
        0.005, 0.0, 378.0, 2.2, 0.13, 4.4, True),
}

SCENARIO_IDS = frozenset(_SCENARIO_ROWS)


def scenario_params(scenario_id: int) -> Scenario:
    """Build the full parameter set for one of the five scenarios."""
    try:
        row = _SCENARIO_ROWS[scenario_id]
    except (KeyError, TypeError):
        raise ValueError(
            f"unknown scenario id {scenario_id!r}; expected one of {sorted(SCENARIO_IDS)}"
        ) from None
    description, lambda_n, lambda_mn, n_bar_p, s_bar, b, mu_np, proliferates = row
    c = peripheral_proliferation_rate(THYMIC_NAIVE_DEATH_RATE, n_bar_p) if proliferates else 0.0
    params = ModelParams(
        s0=THYMIC_OUTPUT_S0,
        lambda_t=THYMIC_DECAY_RATE,
        lambda_n=lambda_n,
        mu_n=THYMIC_NAIVE_DEATH_RATE,
        mu_np=mu_np,
        c=c,
        lambda_mn=lambda_mn,
        mu_m=MEMORY_DEATH_RATE,
        lambda_a=ACTIVE_REVERSION_RATE,
        n_bar_p=n_bar_p,
        s_bar=s_bar,
        b=b,
    )
    return Scenario(id=scenario_id, description=description, params=params)
