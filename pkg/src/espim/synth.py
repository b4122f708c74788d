"""Synthetic session and gaze-trace generation.

Two generators live here:

- ``planted_trace`` builds a bare gaze stream with exactly known fixations
  (centers, onsets, durations) separated by fast sweeps, for exercising
  the detector against ground truth;
- ``make_session_dict`` builds a complete raw session document in the
  version-1 schema -- seeded target sequence, trial timing, gaze stream
  with one planted fixation per trial, pointer trail and questionnaires --
  for pipeline, report and collector tests.

Everything is deterministic in the provided seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .session import GazeSample

__all__ = [
    "PlantedFixation",
    "planted_trace",
    "SynthSessionSpec",
    "make_session_dict",
]

SAMPLE_RATE_HZ = 90.0
PERIOD_MS = 1000.0 / SAMPLE_RATE_HZ


@dataclass(frozen=True)
class PlantedFixation:
    center: tuple[float, float]
    onset: float  # ms
    duration: float  # ms
    sample_count: int


def planted_trace(
    centers: list[tuple[float, float]],
    durations_ms: list[float],
    seed: int = 0,
    jitter_px: float = 5.0,
    sweep_samples: int = 5,
    start_ms: float = 0.0,
) -> tuple[list[GazeSample], list[PlantedFixation]]:
    """Gaze stream with one fixation per center, linked by fast sweeps.

    Jitter within each fixation is drawn from the seed and re-centered so
    the true centroid equals the planted center exactly.  Sweep samples sit
    on the middle half of the inter-center path, far from both endpoints,
    so no detection window mixing sweep and fixation stays compact.
    """
    if len(centers) != len(durations_ms):
        raise ValueError("need one duration per center")
    rng = np.random.default_rng(seed)
    samples: list[GazeSample] = []
    planted: list[PlantedFixation] = []
    k = 0  # global sample index on the 90 Hz grid

    def t_of(index: int) -> float:
        return start_ms + index * PERIOD_MS

    for i, (center, dur) in enumerate(zip(centers, durations_ms)):
        n = int(round(dur / PERIOD_MS)) + 1
        n = max(n, 2)
        jx = rng.uniform(-jitter_px, jitter_px, size=n)
        jy = rng.uniform(-jitter_px, jitter_px, size=n)
        jx -= jx.mean()
        jy -= jy.mean()
        onset = t_of(k)
        for m in range(n):
            samples.append(GazeSample(t=t_of(k), x=center[0] + jx[m], y=center[1] + jy[m]))
            k += 1
        planted.append(
            PlantedFixation(center=center, onset=onset, duration=(n - 1) * PERIOD_MS,
                            sample_count=n)
        )
        if i + 1 < len(centers):
            nxt = centers[i + 1]
            for m in range(sweep_samples):
                u = 0.25 + 0.5 * (m + 1) / (sweep_samples + 1)
                samples.append(
                    GazeSample(
                        t=t_of(k),
                        x=center[0] + (nxt[0] - center[0]) * u,
                        y=center[1] + (nxt[1] - center[1]) * u,
                    )
                )
                k += 1
    return samples, planted


@dataclass
class SynthSessionSpec:
    """Knobs for one synthetic session; defaults give a clean 30-trial run."""

    session_id: str = "synth-001"
    participant_id: str = "p01"
    started_at: str = "2021-03-15T10:30:00+02:00"
    screen: tuple[float, float] = (1920.0, 1080.0)
    n_trials: int = 30
    seed: int = 1
    display_hours: float = 2.0
    strain_rating: int = 2
    symptoms: tuple[str, ...] = ()
    gameplay_rating: int | None = 3
    age: float | None = None
    # trial index -> number of stray clicks before the correct one
    stray_clicks: dict[int, int] = field(default_factory=dict)


def make_session_dict(spec: SynthSessionSpec) -> dict:
    """Raw version-1 session document driven by the spec's seed."""
    rng = np.random.default_rng(spec.seed)
    sx, sy = spec.screen
    scale = sx / 1920.0

    targets = []
    for _ in range(spec.n_trials):
        w = float(rng.uniform(48.0, 160.0) * scale)
        h = float(rng.uniform(40.0, 96.0) * scale)
        cx = float(rng.uniform(w / 2 + 8, sx - w / 2 - 8))
        cy = float(rng.uniform(h / 2 + 8, sy - h / 2 - 8))
        targets.append({"cx": cx, "cy": cy, "w": w, "shape": "rectangle", "h": h})

    # trial timing: appear -> sweep (~100 ms) -> fixation until selection
    trials = []
    gaze: list[list[float]] = []
    mouse: list[list[float]] = []
    t = 500.0  # first target appears after half a second of idle gaze
    idle = (sx / 2, sy / 2)
    _fixate(gaze, idle, 0.0, t, rng)
    prev_gaze_pos = idle
    prev_mouse_pos = idle
    for i, tg in enumerate(targets):
        center = (tg["cx"], tg["cy"])
        appear = t
        move_ms = float(rng.uniform(420.0, 900.0))
        select = appear + move_ms
        sweep_end = appear + 100.0
        _sweep(gaze, prev_gaze_pos, center, appear, sweep_end)
        _fixate(gaze, center, sweep_end, select, rng)
        prev_gaze_pos = center

        _pointer_path(mouse, prev_mouse_pos, center, appear, select, rng)
        prev_mouse_pos = center

        off_x = float(rng.uniform(-tg["w"] / 5, tg["w"] / 5))
        off_y = float(rng.uniform(-tg["h"] / 5, tg["h"] / 5))
        select_pos = [center[0] + off_x, center[1] + off_y]

        n_stray = spec.stray_clicks.get(i, 0)
        error_positions = []
        for _ in range(n_stray):
            error_positions.append(_stray_point(tg, sx, sy, rng))

        trial = {
            "target": tg,
            "appear_t": appear,
            "select_t": select,
            "select_pos": select_pos,
            "error_clicks": n_stray,
        }
        if error_positions:
            trial["error_positions"] = error_positions
        trials.append(trial)
        t = select

    participant: dict = {"id": spec.participant_id}
    if spec.age is not None:
        participant["age"] = spec.age
    if spec.gameplay_rating is not None:
        participant["gameplay_rating"] = spec.gameplay_rating

    return {
        "version": 1,
        "session_id": spec.session_id,
        "participant": participant,
        "screen": {"x": sx, "y": sy},
        "started_at": spec.started_at,
        "pre": {"display_hours": spec.display_hours},
        "trials": trials,
        "gaze": gaze,
        "mouse": mouse,
        "post": {"strain_rating": spec.strain_rating, "symptoms": list(spec.symptoms)},
    }


def _fixate(out: list, center: tuple[float, float], start: float, end: float,
            rng: np.random.Generator, jitter: float = 4.0):
    n = max(int((end - start) / PERIOD_MS), 2)
    jx = rng.uniform(-jitter, jitter, size=n)
    jy = rng.uniform(-jitter, jitter, size=n)
    jx -= jx.mean()
    jy -= jy.mean()
    for m in range(n):
        out.append([start + m * PERIOD_MS, center[0] + jx[m], center[1] + jy[m]])


def _sweep(out: list, a: tuple[float, float], b: tuple[float, float], start: float, end: float):
    n = max(int((end - start) / PERIOD_MS), 1)
    for m in range(n):
        u = 0.2 + 0.6 * (m + 1) / (n + 1)
        out.append([start + m * PERIOD_MS, a[0] + (b[0] - a[0]) * u, a[1] + (b[1] - a[1]) * u])


def _pointer_path(out: list, a: tuple[float, float], b: tuple[float, float],
                  start: float, end: float, rng: np.random.Generator):
    """Pointer trail at ~60 Hz: approach steps well above 1 px, then rest
    with sub-pixel dither so movement counting sees both kinds."""
    period = 1000.0 / 60.0
    n = max(int((end - start) / period), 2)
    n_move = max(n * 2 // 3, 1)
    for m in range(n):
        t = start + m * period
        if m < n_move:
            u = (m + 1) / n_move
            out.append([t, a[0] + (b[0] - a[0]) * u, a[1] + (b[1] - a[1]) * u])
        else:
            out.append([t, b[0] + float(rng.uniform(-0.3, 0.3)),
                        b[1] + float(rng.uniform(-0.3, 0.3))])


def _stray_point(target: dict, sx: float, sy: float, rng: np.random.Generator) -> list[float]:
    """A click position on screen but outside the target."""
    half_w = target["w"] / 2
    half_h = target["h"] / 2
    for _ in range(100):
        x = float(rng.uniform(0, sx))
        y = float(rng.uniform(0, sy))
        if abs(x - target["cx"]) > half_w + 2 or abs(y - target["cy"]) > half_h + 2:
            return [x, y]
    # screen corner farthest from the target center is always outside
    corners = [(1.0, 1.0), (sx - 1, 1.0), (1.0, sy - 1), (sx - 1, sy - 1)]
    return list(max(corners, key=lambda c: math.dist(c, (target["cx"], target["cy"]))))
