"""Deterministic continuous simulation of the stock-flow model.

Fixed-step explicit integration (forward Euler or classic 4-stage
Runge-Kutta) of the population derivatives over a 100-year horizon by
default. The system is non-stiff at the published rates, so no adaptive
or implicit machinery is provided.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .model import ActiveCellTable, Scenario, StateVector, lookup_active
from .trajectory import Trajectory

METHODS = ("euler", "rk4")


@dataclass(frozen=True)
class IntegrationConfig:
    """Step size, scheme and sampling for one deterministic run."""

    dt: float = 0.01
    method: str = "rk4"
    t_end: float = 100.0
    record_stride: int = 10

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError(f"dt must be positive, got {self.dt!r}")
        if not (self.t_end > 0 and math.isfinite(self.t_end)):
            raise ValueError(f"t_end must be positive, got {self.t_end!r}")
        if self.record_stride < 1:
            raise ValueError(f"record_stride must be >= 1, got {self.record_stride!r}")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")


def integrate(
    scenario: Scenario,
    init: StateVector,
    actives: ActiveCellTable,
    cfg: IntegrationConfig = IntegrationConfig(),
) -> Trajectory:
    """Advance the model from init to t_end and record sampled states.

    States are clamped at zero after each full step (a coarse Euler step
    can momentarily undershoot); a non-finite state aborts the run with a
    NumericalError naming the offending step.
    """
    p = scenario.params
    s0, lam_t, lam_n = p.s0, p.lambda_t, p.lambda_n
    mu_n, mu_np, c = p.mu_n, p.mu_np, p.c
    lam_mn, mu_m, lam_a = p.lambda_mn, p.mu_m, p.lambda_a
    nbar, sbar, b = p.n_bar_p, p.s_bar, p.b
    exp = math.exp

    def deriv(t, n, np_, m):
        x = np_ / nbar
        s = 1.0 / (1.0 + sbar * x)
        g = 1.0 + b * x / (1.0 + x)
        h = 1.0 / (1.0 + (n + np_) / nbar)
        dn = s0 * exp(-lam_t * t) * s - (lam_n + mu_n * g) * n
        dnp = lam_n * n + (c * h - mu_np) * np_ + lam_mn * m
        dm = lam_a * lookup_active(t, actives) - (mu_m + lam_mn) * m
        return dn, dnp, dm

    dt = cfg.dt
    half = 0.5 * dt
    sixth = dt / 6.0
    stride = cfg.record_stride
    steps = int(round(cfg.t_end / dt))
    euler = cfg.method == "euler"

    n, np_, m = init.n, init.np, init.m
    times = [init.t]
    rec_n = [n]
    rec_np = [np_]
    rec_m = [m]

    for k in range(steps):
        t = init.t + k * dt
        if euler:
            dn, dnp, dm = deriv(t, n, np_, m)
            n += dt * dn
            np_ += dt * dnp
            m += dt * dm
        else:
            k1n, k1p, k1m = deriv(t, n, np_, m)
            k2n, k2p, k2m = deriv(t + half, n + half * k1n, np_ + half * k1p, m + half * k1m)
            k3n, k3p, k3m = deriv(t + half, n + half * k2n, np_ + half * k2p, m + half * k2m)
            k4n, k4p, k4m = deriv(t + dt, n + dt * k3n, np_ + dt * k3p, m + dt * k3m)
            n += sixth * (k1n + 2.0 * (k2n + k3n) + k4n)
            np_ += sixth * (k1p + 2.0 * (k2p + k3p) + k4p)
            m += sixth * (k1m + 2.0 * (k2m + k3m) + k4m)
        if not (math.isfinite(n) and math.isfinite(np_) and math.isfinite(m)):
            raise NumericalError(
                f"non-finite state at step {k + 1} of {steps} "
                f"(t = {init.t + (k + 1) * dt:.6g}): n={n!r}, np={np_!r}, m={m!r}"
            )
        if n < 0.0:
            n = 0.0
        if np_ < 0.0:
            np_ = 0.0
        if m < 0.0:
            m = 0.0
        if (k + 1) % stride == 0:
            times.append(init.t + (k + 1) * dt)
            rec_n.append(n)
            rec_np.append(np_)
            rec_m.append(m)

    return Trajectory(
        times=np.array(times),
        naive=np.array(rec_n),
        naive_prolif=np.array(rec_np),
        memory=np.array(rec_m),
    )


def total_naive(traj: Trajectory) -> np.ndarray:
    """Per-sample sum of the two naive pools."""
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    return traj.total_naive
