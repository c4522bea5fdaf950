"""Uniformly sampled population time series shared by both engines."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import StateVector

QUANTITIES = ("N", "Np", "M", "total")


@dataclass(frozen=True)
class Trajectory:
    """Population densities on a uniform time grid (cells/mm^3).

    Immutable once constructed; the arrays are marked read-only.
    """

    times: np.ndarray
    naive: np.ndarray
    naive_prolif: np.ndarray
    memory: np.ndarray

    def __post_init__(self):
        for name in ("times", "naive", "naive_prolif", "memory"):
            arr = np.asarray(getattr(self, name), dtype=float)
            object.__setattr__(self, name, arr)
        k = len(self.times)
        if k == 0:
            raise ValueError("trajectory must contain at least one sample")
        for name in ("naive", "naive_prolif", "memory"):
            if len(getattr(self, name)) != k:
                raise ValueError(f"{name} has length {len(getattr(self, name))}, expected {k}")
        if k > 1:
            spacing = np.diff(self.times)
            if spacing[0] <= 0 or not np.allclose(spacing, spacing[0], rtol=1e-9, atol=1e-12):
                raise ValueError("times must increase with constant spacing")
        for name in ("naive", "naive_prolif", "memory"):
            if np.any(getattr(self, name) < 0):
                raise ValueError(f"{name} contains negative densities")
        for name in ("times", "naive", "naive_prolif", "memory"):
            getattr(self, name).setflags(write=False)

    def __len__(self) -> int:
        return len(self.times)

    @property
    def total_naive(self) -> np.ndarray:
        return self.naive + self.naive_prolif

    @property
    def spacing(self) -> float:
        if len(self.times) < 2:
            return 0.0
        return float(self.times[1] - self.times[0])

    def state_at(self, i: int) -> StateVector:
        return StateVector(
            t=float(self.times[i]),
            n=float(self.naive[i]),
            np=float(self.naive_prolif[i]),
            m=float(self.memory[i]),
        )

    def series(self, quantity: str) -> np.ndarray:
        """One named quantity as an array: N, Np, M or total."""
        if quantity == "N":
            return self.naive
        if quantity == "Np":
            return self.naive_prolif
        if quantity == "M":
            return self.memory
        if quantity == "total":
            return self.total_naive
        raise ValueError(f"unknown quantity {quantity!r}; expected one of {QUANTITIES}")

    def thin(self, stride: int) -> "Trajectory":
        """Keep every stride-th sample (always including the first)."""
        if stride < 1:
            raise ValueError(f"stride must be >= 1, got {stride!r}")
        return Trajectory(
            times=self.times[::stride].copy(),
            naive=self.naive[::stride].copy(),
            naive_prolif=self.naive_prolif[::stride].copy(),
            memory=self.memory[::stride].copy(),
        )


def same_grid(a: Trajectory, b: Trajectory) -> bool:
    return len(a) == len(b) and bool(
        np.allclose(a.times, b.times, rtol=1e-12, atol=1e-12)
    )


def annual_samples(traj: Trajectory) -> Trajectory:
    """Thin a trajectory down to one sample per year.

    The grid spacing must divide one year exactly; raises ValueError
    otherwise.
    """
    if len(traj) < 2:
        return traj
    stride = round(1.0 / traj.spacing)
    if stride < 1 or abs(stride * traj.spacing - 1.0) > 1e-9:
        raise ValueError(
            f"grid spacing {traj.spacing!r} years does not divide one year"
        )
    return traj.thin(stride)
