"""Inhomogeneous time grids: a receding global grid for constraint evaluation
and start-anchored local grids carrying each task's input samples."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

import numpy as np

from .profiles import Task

# Local grids may bracket profile steps with close node pairs (e.g. 0.495/0.5)
# but gaps below this bound would wreck interpolation conditioning.
MIN_LOCAL_GAP = 1e-4


@dataclass(frozen=True)
class GlobalGrid:
    """Strictly increasing absolute times from the current instant to the
    horizon end. Constraints are enforced at these nodes only."""

    nodes: tuple[float, ...]

    def __post_init__(self):
        arr = np.asarray(self.nodes, dtype=float)
        if arr.size < 2:
            raise ValueError("global grid needs at least two nodes")
        if np.any(np.diff(arr) <= 0):
            raise ValueError("global grid nodes must be strictly increasing")
        object.__setattr__(self, "nodes", tuple(float(t) for t in arr))

    @property
    def t0(self) -> float:
        return self.nodes[0]

    @property
    def te(self) -> float:
        return self.nodes[-1]

    @property
    def n_intervals(self) -> int:
        return len(self.nodes) - 1

    def widths(self) -> np.ndarray:
        return np.diff(np.asarray(self.nodes))


def build_global_grid(t0: float, te: float, resolution: float) -> GlobalGrid:
    """Uniform grid from ``t0`` to ``te``; the last interval is shortened when
    the span is not a multiple of ``resolution``."""
    if te <= t0:
        raise ValueError(f"empty horizon: te={te} must exceed t0={t0}")
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    n = int(math.ceil((te - t0) / resolution - 1e-9))
    nodes = [t0 + k * resolution for k in range(n)]
    nodes.append(te)
    return GlobalGrid(tuple(nodes))


@dataclass(frozen=True)
class LocalGridTemplate:
    """Relative-time offsets of a task's input samples.

    Offsets run from 0 to the task's execution span, so instantiating the
    template at a start time only translates it.
    """

    offsets: tuple[float, ...]

    def __post_init__(self):
        arr = np.asarray(self.offsets, dtype=float)
        if arr.size < 2:
            raise ValueError("local grid needs at least two offsets")
        if arr[0] != 0.0:
            raise ValueError(f"first offset must be 0, got {arr[0]}")
        gaps = np.diff(arr)
        if np.any(gaps <= 0):
            raise ValueError("offsets must be strictly increasing")
        tight = np.flatnonzero(gaps < MIN_LOCAL_GAP)
        if tight.size:
            j = int(tight[0])
            raise ValueError(
                f"offsets {arr[j]:.6g} and {arr[j + 1]:.6g} are closer than "
                f"{MIN_LOCAL_GAP} h; merge them"
            )
        object.__setattr__(self, "offsets", tuple(float(o) for o in arr))

    @property
    def span(self) -> float:
        return self.offsets[-1]

    @staticmethod
    def uniform(span: float, resolution: float) -> "LocalGridTemplate":
        grid = build_global_grid(0.0, span, resolution)
        return LocalGridTemplate(grid.nodes)


def instantiate_local_grid(template: LocalGridTemplate, t_s: float) -> np.ndarray:
    """Absolute sample times for a task started at ``t_s``."""
    return t_s + np.asarray(template.offsets)


def horizon_end(
    tasks: Iterable[Task],
    t0: float,
    resolution: float,
    fixed_starts: Optional[Mapping[str, float]] = None,
) -> float:
    """Latest worst-case finish over all pending chains.

    A free task can finish as late as its request time plus delay bound plus
    execution span; chain members accumulate. Tasks with a committed start in
    ``fixed_starts`` contribute exactly start + span. Returns at least
    ``t0 + resolution`` so the grid is never empty.
    """
    fixed_starts = fixed_starts or {}
    by_id = {t.id: t for t in tasks}
    latest = t0
    for task in by_id.values():
        finish = _worst_finish(task, by_id, fixed_starts)
        latest = max(latest, finish)
    return max(latest, t0 + resolution)


def _worst_finish(task: Task, by_id: dict[str, Task], fixed_starts: Mapping[str, float]) -> float:
    if task.id in fixed_starts:
        return fixed_starts[task.id] + task.duration
    if task.predecessor is None:
        assert task.request_time is not None
        return task.request_time + task.delay_bound + task.duration
    if task.predecessor not in by_id:
        raise KeyError(f"task {task.id} references unknown predecessor {task.predecessor!r}")
    pred_finish = _worst_finish(by_id[task.predecessor], by_id, fixed_starts)
    return pred_finish + task.delay_bound + task.duration
