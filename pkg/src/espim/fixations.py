"""Dispersion-based fixation detection and raw event counting.

Detection follows the classic dispersion-threshold scheme: slide a window
forward until it spans at least the minimum duration; if its bounding-box
dispersion (width + height) stays within the threshold, grow it maximally
and emit a fixation, otherwise advance one sample.  Emitted fixations are
time-ordered, non-overlapping, and each spans at least the minimum
duration.  The defaults (60 px, 200 ms) suit ~90 Hz screen-space gaze.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .session import GazeSample, MouseSample, SessionLog

__all__ = [
    "FixationParams",
    "Fixation",
    "detect_fixations",
    "anf",
    "mouse_movement_count",
    "extract_errors",
]


@dataclass(frozen=True)
class FixationParams:
    dispersion_px: float = 60.0
    min_duration_ms: float = 200.0

    def __post_init__(self):
        if not self.dispersion_px > 0:
            raise ValueError(f"dispersion_px must be positive, got {self.dispersion_px}")
        if not self.min_duration_ms > 0:
            raise ValueError(f"min_duration_ms must be positive, got {self.min_duration_ms}")


@dataclass(frozen=True)
class Fixation:
    onset: float  # ms
    duration: float  # ms
    centroid: tuple[float, float]
    sample_count: int


def detect_fixations(
    samples: Sequence[GazeSample],
    params: FixationParams = FixationParams(),
) -> list[Fixation]:
    """Extract fixations from a time-ordered gaze stream.

    Empty input yields an empty list.  Samples must be time-ordered; a
    decreasing timestamp raises ValueError.
    """
    n = len(samples)
    if n == 0:
        return []
    t = np.array([s.t for s in samples], dtype=np.float64)
    if np.any(np.diff(t) < 0):
        raise ValueError("gaze samples must be time-ordered")
    x = np.array([s.x for s in samples], dtype=np.float64)
    y = np.array([s.y for s in samples], dtype=np.float64)

    out: list[Fixation] = []
    i = 0
    while i < n:
        # smallest window starting at i that spans the minimum duration
        j = int(np.searchsorted(t, t[i] + params.min_duration_ms, side="left"))
        if j >= n:
            break
        if _dispersion(x, y, i, j) <= params.dispersion_px:
            while j + 1 < n and _dispersion(x, y, i, j + 1) <= params.dispersion_px:
                j += 1
            out.append(
                Fixation(
                    onset=float(t[i]),
                    duration=float(t[j] - t[i]),
                    centroid=(float(x[i : j + 1].mean()), float(y[i : j + 1].mean())),
                    sample_count=j - i + 1,
                )
            )
            i = j + 1
        else:
            i += 1
    return out


def _dispersion(x: np.ndarray, y: np.ndarray, i: int, j: int) -> float:
    """Bounding-box dispersion (width + height) of samples i..j inclusive."""
    xs = x[i : j + 1]
    ys = y[i : j + 1]
    return float((xs.max() - xs.min()) + (ys.max() - ys.min()))


def anf(fixations: Sequence[Fixation], task_interval: tuple[float, float]) -> float:
    """Number of fixations whose onset lies inside [start_ms, end_ms]."""
    start, end = task_interval
    if end < start:
        raise ValueError(f"task interval end {end} precedes start {start}")
    return float(sum(1 for f in fixations if start <= f.onset <= end))


def mouse_movement_count(
    trail: Sequence[MouseSample],
    epsilon_px: float = 1.0,
) -> int:
    """Count consecutive-sample displacements longer than epsilon_px."""
    if len(trail) < 2:
        return 0
    x = np.array([s.x for s in trail], dtype=np.float64)
    y = np.array([s.y for s in trail], dtype=np.float64)
    steps = np.hypot(np.diff(x), np.diff(y))
    return int(np.count_nonzero(steps > epsilon_px))


def extract_errors(session: SessionLog) -> int:
    """Total stray clicks over all trials of a session."""
    return sum(tr.error_clicks for tr in session.trials)
