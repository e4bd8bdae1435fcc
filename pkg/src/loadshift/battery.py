"""Ideal battery: piecewise-constant power gives a piecewise-linear energy
trajectory, so node values bound the whole trajectory."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .timegrid import GlobalGrid

BOUND_TOL = 1e-8


@dataclass(frozen=True)
class BatteryParams:
    """Capacity and rate limits. Positive power discharges (supplies load),
    negative power charges, matching dE/dt = -P."""

    e_max: float
    p_min: float
    p_max: float

    def __post_init__(self):
        if self.e_max <= 0:
            raise ValueError("battery capacity must be positive")
        if not (self.p_min <= 0.0 <= self.p_max):
            raise ValueError(
                f"rate bounds must straddle 0 (charge {self.p_min}, discharge {self.p_max})"
            )


@dataclass(frozen=True)
class BatteryState:
    """Stored energy at a timestamp."""

    energy: float
    time: float


def propagate(e0: float, powers, grid: GlobalGrid) -> np.ndarray:
    """Energy at every grid node for interval-constant ``powers``.

    E(t_{k+1}) = E(t_k) - P_k * (t_{k+1} - t_k). Between nodes the trajectory
    is linear, so these values bound it.
    """
    p = np.asarray(powers, dtype=float)
    if p.size != grid.n_intervals:
        raise ValueError(f"expected {grid.n_intervals} interval powers, got {p.size}")
    energies = np.empty(p.size + 1)
    energies[0] = e0
    energies[1:] = e0 - np.cumsum(p * grid.widths())
    return energies


@dataclass(frozen=True)
class BoundViolation:
    node: int
    quantity: str  # "energy_low" | "energy_high" | "power_low" | "power_high"
    amount: float


def check_bounds(energies, powers, params: BatteryParams) -> list[BoundViolation]:
    """All node-energy and interval-power bound violations beyond tolerance."""
    out: list[BoundViolation] = []
    for k, e in enumerate(np.asarray(energies, dtype=float)):
        if e < -BOUND_TOL:
            out.append(BoundViolation(k, "energy_low", float(-e)))
        if e > params.e_max + BOUND_TOL:
            out.append(BoundViolation(k, "energy_high", float(e - params.e_max)))
    for k, p in enumerate(np.asarray(powers, dtype=float)):
        if p < params.p_min - BOUND_TOL:
            out.append(BoundViolation(k, "power_low", float(params.p_min - p)))
        if p > params.p_max + BOUND_TOL:
            out.append(BoundViolation(k, "power_high", float(p - params.p_max)))
    return out
