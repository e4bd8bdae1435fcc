"""Deterministic load profiles, tasks, subtask chains and loss functions.

A load follows a piecewise-constant nominal power curve once started. Tasks
may be delayed within a bound and curtailed below the nominal curve; chained
subtasks inherit their request time from the predecessor's finish.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

# Intervals are right-open ([b_j, b_{j+1})), the final breakpoint belongs to
# the last interval. This avoids double counting power at breakpoints.


class ChainError(KeyError):
    """A predecessor referenced by a chained task cannot be resolved."""


@dataclass(frozen=True)
class NominalProfile:
    """Piecewise-constant power vs. relative time.

    ``breakpoints`` has one more entry than ``levels``; ``levels[j]`` holds on
    ``[breakpoints[j], breakpoints[j+1])``. Relative time starts at 0 and the
    last breakpoint is the execution span.
    """

    breakpoints: tuple[float, ...]
    levels: tuple[float, ...]

    def __post_init__(self):
        bp = np.asarray(self.breakpoints, dtype=float)
        lv = np.asarray(self.levels, dtype=float)
        if bp.size < 2:
            raise ValueError("profile needs at least two breakpoints")
        if bp[0] != 0.0:
            raise ValueError(f"first breakpoint must be 0, got {bp[0]}")
        if np.any(np.diff(bp) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        if lv.size != bp.size - 1:
            raise ValueError(
                f"need {bp.size - 1} levels for {bp.size} breakpoints, got {lv.size}"
            )
        if np.any(lv < 0):
            raise ValueError("power levels must be non-negative")
        object.__setattr__(self, "breakpoints", tuple(float(b) for b in bp))
        object.__setattr__(self, "levels", tuple(float(v) for v in lv))

    @property
    def duration(self) -> float:
        """Execution span T_e in hours."""
        return self.breakpoints[-1]

    @property
    def peak(self) -> float:
        return max(self.levels)

    def energy(self) -> float:
        """Integral of the profile over its support, in kWh."""
        widths = np.diff(self.breakpoints)
        return float(np.dot(widths, self.levels))

    @staticmethod
    def constant(level: float, duration: float) -> "NominalProfile":
        return NominalProfile((0.0, float(duration)), (float(level),))


def nominal_power(profile: NominalProfile, tau) -> float | np.ndarray:
    """Nominal power at relative time ``tau``.

    Returns the level of the right-open interval containing ``tau``; the final
    instant ``tau == duration`` takes the last level, anything outside
    ``[0, duration]`` is 0. Accepts scalars or arrays.
    """
    bp = np.asarray(profile.breakpoints)
    lv = np.asarray(profile.levels)
    t = np.asarray(tau, dtype=float)
    idx = np.clip(np.searchsorted(bp, t, side="right") - 1, 0, lv.size - 1)
    out = np.where((t >= 0.0) & (t <= profile.duration), lv[idx], 0.0)
    if np.isscalar(tau) or getattr(tau, "ndim", 0) == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class LossSpec:
    """One of the three loss families used for delay and curtailment costs.

    * ``quadratic_deadband``: w * max(x - d0, 0)**2, C1 everywhere.
    * ``quadratic``: w * x**2.
    * ``weighted_abs``: w * |x|, only evaluated on x >= 0 where it is w * x.
    """

    kind: str
    weight: float
    deadband: float = 0.0

    KINDS = ("quadratic_deadband", "quadratic", "weighted_abs")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown loss kind {self.kind!r}, expected one of {self.KINDS}")
        if self.weight < 0:
            raise ValueError("loss weight must be >= 0")
        if self.deadband < 0:
            raise ValueError("deadband must be >= 0")
        if self.deadband > 0 and self.kind != "quadratic_deadband":
            raise ValueError(f"deadband is only meaningful for quadratic_deadband, not {self.kind}")


_ABS_DOMAIN_TOL = 1e-9


def evaluate_loss(spec: LossSpec, x: float) -> tuple[float, float]:
    """Loss value and exact derivative at ``x``.

    The deadband loss has zero one-sided derivative at the deadband edge, so
    the returned derivative is continuous. ``weighted_abs`` is restricted to
    x >= 0 (the curtailment sign constraint guarantees this upstream).
    """
    w = spec.weight
    if spec.kind == "quadratic_deadband":
        excess = x - spec.deadband
        if excess <= 0.0:
            return 0.0, 0.0
        return w * excess * excess, 2.0 * w * excess
    if spec.kind == "quadratic":
        return w * x * x, 2.0 * w * x
    # weighted_abs
    if x < -_ABS_DOMAIN_TOL:
        raise ValueError(f"weighted_abs loss evaluated at x={x} < 0; outside its domain")
    return w * max(x, 0.0), w


@dataclass(frozen=True)
class Task:
    """One uninterruptible load, or a subtask in an interruptible chain.

    Predecessor-free tasks carry an absolute ``request_time``; chained
    subtasks leave it ``None`` and inherit the predecessor's finish time.
    The curtailment bound is piecewise constant in relative time and must
    never exceed the nominal profile.
    """

    id: str
    profile: NominalProfile
    delay_bound: float
    delay_loss: LossSpec
    curtailment_loss: LossSpec
    curtail_bound: NominalProfile
    request_time: Optional[float] = None
    predecessor: Optional[str] = None

    def __post_init__(self):
        if self.delay_bound < 0:
            raise ValueError(f"task {self.id}: delay bound must be >= 0")
        if (self.request_time is None) != (self.predecessor is not None):
            raise ValueError(
                f"task {self.id}: request_time must be given exactly when there is no predecessor"
            )
        if abs(self.curtail_bound.duration - self.profile.duration) > 1e-12:
            raise ValueError(
                f"task {self.id}: curtailment bound spans {self.curtail_bound.duration} h "
                f"but the profile spans {self.profile.duration} h"
            )
        for tau in _merged_midpoints(self.profile, self.curtail_bound):
            c = nominal_power(self.curtail_bound, tau)
            u = nominal_power(self.profile, tau)
            if c > u + 1e-12:
                raise ValueError(
                    f"task {self.id}: curtailment bound {c} exceeds nominal power {u} "
                    f"near relative time {tau:.6g} h"
                )

    @property
    def duration(self) -> float:
        return self.profile.duration


def _merged_midpoints(a: NominalProfile, b: NominalProfile) -> np.ndarray:
    """Midpoints of the union of both profiles' breakpoint partitions.

    Both curves are piecewise constant, so comparing them at these points
    decides every interval.
    """
    cuts = np.unique(np.concatenate([a.breakpoints, b.breakpoints]))
    return 0.5 * (cuts[:-1] + cuts[1:])


def chain_tasks(tasks: dict[str, Task]) -> None:
    """Validate predecessor links: every link resolves and no cycles exist."""
    for task in tasks.values():
        seen = {task.id}
        cur = task
        while cur.predecessor is not None:
            if cur.predecessor not in tasks:
                raise ChainError(
                    f"task {cur.id} names predecessor {cur.predecessor!r} which does not exist"
                )
            cur = tasks[cur.predecessor]
            if cur.id in seen:
                raise ValueError(f"predecessor links contain a cycle through {cur.id!r}")
            seen.add(cur.id)


def chain_request_time(task: Task, plan: "SchedulePlan") -> float:
    """Effective request time of ``task`` under ``plan``.

    Predecessor-free tasks return their stored request time; chained subtasks
    return the predecessor's planned finish (start + duration).
    """
    if task.predecessor is None:
        assert task.request_time is not None
        return task.request_time
    pred = plan.tasks.get(task.predecessor)
    if pred is None:
        raise ChainError(
            f"task {task.id} needs predecessor {task.predecessor!r} which is not in the plan"
        )
    return pred.finish


@dataclass(frozen=True)
class TaskPlan:
    """Planned execution of one task: start plus input samples on its grid."""

    start: float
    sample_times: tuple[float, ...]
    samples: tuple[float, ...]

    def __post_init__(self):
        if len(self.sample_times) != len(self.samples):
            raise ValueError("sample_times and samples must have equal length")

    @property
    def finish(self) -> float:
        return self.sample_times[-1]


@dataclass(frozen=True)
class SchedulePlan:
    """A full horizon plan: per-task schedules and the battery sequence.

    ``battery_powers[k]`` holds on ``[grid_times[k], grid_times[k+1])``;
    positive battery power discharges (supplies the loads).
    """

    tasks: dict[str, TaskPlan] = field(default_factory=dict)
    grid_times: tuple[float, ...] = ()
    battery_powers: tuple[float, ...] = ()

    def __post_init__(self):
        if self.grid_times and len(self.battery_powers) != len(self.grid_times) - 1:
            raise ValueError("need one battery power per grid interval")
