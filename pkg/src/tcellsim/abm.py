"""Stochastic agent-based counterpart of the deterministic engine.

T cell agents occupy exactly one of three states (naive from thymus,
naive from proliferation, memory) and carry no other attributes, so a
population is fully described by its per-state counts and per-agent event
sampling reduces to binomial draws on those counts. Updating is
synchronous with a fixed time slice:

  1. new agents are spawned from the thymus (naive) and from activated
     cells (memory); expected spawn counts accumulate in real-valued
     reservoirs and whole agents are emitted as the reservoirs cross
     integers, so sub-agent flows carry no systematic rounding bias;
  2. every agent, including the step's newborns, samples death and
     state-dependent events with per-step probabilities derived from the
     continuous rates; death takes precedence within a step. Newborns
     arrive uniformly through the slot, so their first-step events use
     half the slice; exposing them to the full slice instead depresses
     spawn-fed pools by an O(dt) factor that does not average out;
  3. offspring of proliferating agents join at the end of the step.

The densities feeding the homeostatic modifiers are frozen at the start
of the step, and agent counts are divided by the scale factor so both
engines see identical density arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .model import (
    INITIAL_THYMIC_NAIVE,
    ActiveCellTable,
    Scenario,
    death_modifier,
    dilution,
    lookup_active,
    thymic_output,
)
from .trajectory import Trajectory

RNG_ALGORITHM = "numpy PCG64, per-replicate stream SeedSequence(base_seed, spawn_key=(replicate,))"


@dataclass(frozen=True)
class AbmConfig:
    """Time slicing, replication and resolution of an agent-based run.

    scale is the number of agents representing one cell/mm^3; raising it
    shrinks demographic noise at proportional memory/time cost.
    """

    dt: float = 0.01
    t_end: float = 100.0
    replicates: int = 50
    base_seed: int = 0
    scale: float = 1.0
    record_stride: int = 10

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError(f"dt must be positive, got {self.dt!r}")
        if not (self.t_end > 0 and math.isfinite(self.t_end)):
            raise ValueError(f"t_end must be positive, got {self.t_end!r}")
        if self.replicates < 1:
            raise ValueError(f"replicates must be >= 1, got {self.replicates!r}")
        if not self.scale > 0:
            raise ValueError(f"scale must be > 0, got {self.scale!r}")
        if self.record_stride < 1:
            raise ValueError(f"record_stride must be >= 1, got {self.record_stride!r}")


@dataclass(frozen=True)
class AgentPopulation:
    """Per-state agent counts plus the fractional spawn reservoirs."""

    naive: int
    naive_prolif: int
    memory: int
    thymus_reservoir: float = 0.0
    active_reservoir: float = 0.0

    def __post_init__(self):
        for name in ("naive", "naive_prolif", "memory"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)!r}")

    @property
    def total(self) -> int:
        return self.naive + self.naive_prolif + self.memory


@dataclass(frozen=True)
class StepTally:
    """Event counts of one step, for conservation bookkeeping."""

    born_thymus: int
    born_memory: int
    died_naive: int
    converted: int
    died_prolif: int
    born_prolif: int
    died_memory: int
    reverted: int


@dataclass(frozen=True)
class ReplicateSet:
    """All replicate trajectories plus their pointwise mean (cells/mm^3)."""

    trajectories: tuple[Trajectory, ...]
    mean: Trajectory


def hazard_to_prob(rate: float, dt: float) -> float:
    """Probability that an event with constant hazard fires within dt."""
    if rate < 0:
        raise ValueError(f"rate must be >= 0, got {rate!r}")
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt!r}")
    return -math.expm1(-rate * dt)


def _binomial(rng: np.random.Generator, n: int, p: float) -> int:
    if n == 0 or p == 0.0:
        return 0
    return int(rng.binomial(n, p))


def step_detail(
    pop: AgentPopulation,
    t: float,
    scenario: Scenario,
    actives: ActiveCellTable,
    cfg: AbmConfig,
    rng: np.random.Generator,
) -> tuple[AgentPopulation, StepTally]:
    """Advance the population by one time slice, returning event tallies."""
    p = scenario.params
    dt = cfg.dt
    scale = cfg.scale

    # Densities frozen before spawns; both engines feed the homeostatic
    # modifiers with the same arguments.
    n_dens = pop.naive / scale
    np_dens = pop.naive_prolif / scale

    thy_res = pop.thymus_reservoir + thymic_output(t, np_dens, p) * dt * scale
    act_res = pop.active_reservoir + p.lambda_a * lookup_active(t, actives) * dt * scale
    if not (math.isfinite(thy_res) and math.isfinite(act_res)):
        raise NumericalError(f"non-finite spawn flow at t = {t:.6g}")
    born_thymus = int(thy_res)
    thy_res -= born_thymus
    born_memory = int(act_res)
    act_res -= born_memory

    mu_naive = p.mu_n * death_modifier(np_dens, p)
    died_naive = _binomial(rng, pop.naive, hazard_to_prob(mu_naive, dt))
    died_naive_new = _binomial(rng, born_thymus, hazard_to_prob(mu_naive, 0.5 * dt))
    converted = _binomial(rng, pop.naive - died_naive, hazard_to_prob(p.lambda_n, dt))
    converted_new = _binomial(
        rng, born_thymus - died_naive_new, hazard_to_prob(p.lambda_n, 0.5 * dt)
    )

    prolif = pop.naive_prolif
    died_prolif = _binomial(rng, prolif, hazard_to_prob(p.mu_np, dt))
    born_prolif = _binomial(
        rng, prolif - died_prolif, hazard_to_prob(p.c * dilution(n_dens, np_dens, p), dt)
    )

    died_memory = _binomial(rng, pop.memory, hazard_to_prob(p.mu_m, dt))
    died_memory_new = _binomial(rng, born_memory, hazard_to_prob(p.mu_m, 0.5 * dt))
    reverted = _binomial(rng, pop.memory - died_memory, hazard_to_prob(p.lambda_mn, dt))
    reverted_new = _binomial(
        rng, born_memory - died_memory_new, hazard_to_prob(p.lambda_mn, 0.5 * dt)
    )

    died_naive += died_naive_new
    converted += converted_new
    died_memory += died_memory_new
    reverted += reverted_new

    new_pop = AgentPopulation(
        naive=pop.naive + born_thymus - died_naive - converted,
        naive_prolif=prolif - died_prolif + born_prolif + converted + reverted,
        memory=pop.memory + born_memory - died_memory - reverted,
        thymus_reservoir=thy_res,
        active_reservoir=act_res,
    )
    tally = StepTally(
        born_thymus=born_thymus,
        born_memory=born_memory,
        died_naive=died_naive,
        converted=converted,
        died_prolif=died_prolif,
        born_prolif=born_prolif,
        died_memory=died_memory,
        reverted=reverted,
    )
    return new_pop, tally


def step_population(
    pop: AgentPopulation,
    t: float,
    scenario: Scenario,
    actives: ActiveCellTable,
    cfg: AbmConfig,
    rng: np.random.Generator,
) -> AgentPopulation:
    """Advance the population by one time slice."""
    new_pop, _ = step_detail(pop, t, scenario, actives, cfg, rng)
    return new_pop


def replicate_rng(base_seed: int, replicate: int) -> np.random.Generator:
    """The deterministic, independent RNG stream of one replicate."""
    return np.random.default_rng(np.random.SeedSequence(base_seed, spawn_key=(replicate,)))


def _run_one(
    scenario: Scenario,
    actives: ActiveCellTable,
    cfg: AbmConfig,
    initial: tuple[int, int, int],
    rng: np.random.Generator,
) -> Trajectory:
    p = scenario.params
    dt = cfg.dt
    scale = cfg.scale
    stride = cfg.record_stride
    steps = int(round(cfg.t_end / dt))

    # Per-step probabilities of the density-independent events; the _new
    # variants cover the current step's newborns at half exposure.
    half = 0.5 * dt
    p_conv = hazard_to_prob(p.lambda_n, dt)
    p_conv_new = hazard_to_prob(p.lambda_n, half)
    p_die_np = hazard_to_prob(p.mu_np, dt)
    p_die_m = hazard_to_prob(p.mu_m, dt)
    p_die_m_new = hazard_to_prob(p.mu_m, half)
    p_rev = hazard_to_prob(p.lambda_mn, dt)
    p_rev_new = hazard_to_prob(p.lambda_mn, half)
    mu_n, c = p.mu_n, p.c
    lam_a = p.lambda_a

    naive, prolif, memory = initial
    thy_res = 0.0
    act_res = 0.0

    times = [0.0]
    rec_n = [naive / scale]
    rec_np = [prolif / scale]
    rec_m = [memory / scale]

    for k in range(steps):
        t = k * dt
        n_dens = naive / scale
        np_dens = prolif / scale

        thy_res += thymic_output(t, np_dens, p) * dt * scale
        act_res += lam_a * lookup_active(t, actives) * dt * scale
        if not (math.isfinite(thy_res) and math.isfinite(act_res)):
            raise NumericalError(
                f"non-finite spawn flow at step {k + 1} of {steps} (t = {t:.6g})"
            )
        born_thymus = int(thy_res)
        thy_res -= born_thymus
        born_memory = int(act_res)
        act_res -= born_memory

        mu_naive = mu_n * death_modifier(np_dens, p)
        died_naive = _binomial(rng, naive, hazard_to_prob(mu_naive, dt))
        died_naive_new = _binomial(rng, born_thymus, hazard_to_prob(mu_naive, half))
        converted = _binomial(rng, naive - died_naive, p_conv)
        converted_new = _binomial(rng, born_thymus - died_naive_new, p_conv_new)
        died_prolif = _binomial(rng, prolif, p_die_np)
        born_prolif = _binomial(
            rng, prolif - died_prolif, hazard_to_prob(c * dilution(n_dens, np_dens, p), dt)
        )
        died_memory = _binomial(rng, memory, p_die_m)
        died_memory_new = _binomial(rng, born_memory, p_die_m_new)
        reverted = _binomial(rng, memory - died_memory, p_rev)
        reverted_new = _binomial(rng, born_memory - died_memory_new, p_rev_new)

        naive += born_thymus - died_naive - died_naive_new - converted - converted_new
        prolif += (
            converted + converted_new + reverted + reverted_new + born_prolif - died_prolif
        )
        memory += born_memory - died_memory - died_memory_new - reverted - reverted_new

        if (k + 1) % stride == 0:
            times.append((k + 1) * dt)
            rec_n.append(naive / scale)
            rec_np.append(prolif / scale)
            rec_m.append(memory / scale)

    return Trajectory(
        times=np.array(times),
        naive=np.array(rec_n),
        naive_prolif=np.array(rec_np),
        memory=np.array(rec_m),
    )


def run_replicates(
    scenario: Scenario,
    actives: ActiveCellTable,
    cfg: AbmConfig,
    initial: tuple[int, int, int] | None = None,
) -> ReplicateSet:
    """Run the configured number of replicates and average them pointwise.

    Replicate r draws from an independent stream derived deterministically
    from (base_seed, r), so a fixed base seed reproduces the whole set
    bit for bit. Recorded counts are divided by the scale factor, restoring
    cells/mm^3.
    """
    if initial is None:
        initial = (int(round(INITIAL_THYMIC_NAIVE * cfg.scale)), 0, 0)
    trajectories = []
    for r in range(cfg.replicates):
        rng = replicate_rng(cfg.base_seed, r)
        try:
            trajectories.append(_run_one(scenario, actives, cfg, initial, rng))
        except NumericalError as exc:
            raise NumericalError(f"replicate {r}: {exc}") from exc
    mean = Trajectory(
        times=trajectories[0].times.copy(),
        naive=np.mean(np.stack([tr.naive for tr in trajectories]), axis=0),
        naive_prolif=np.mean(np.stack([tr.naive_prolif for tr in trajectories]), axis=0),
        memory=np.mean(np.stack([tr.memory for tr in trajectories]), axis=0),
    )
    return ReplicateSet(trajectories=tuple(trajectories), mean=mean)
