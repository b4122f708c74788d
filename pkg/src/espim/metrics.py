"""Per-session behavioral metrics: the bridge from raw logs to the score.

A session contributes one row of metrics: the eye-strain score with its
inputs assembled from session geometry (distance = mean center-to-center
gap between consecutive targets, width/area averaged over targets), task
duration from first appearance to last selection, the fixation count, the
error and pointer-movement tallies and the fixation drift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import fmean

from . import model
from .fixations import Fixation, FixationParams, anf, detect_fixations, extract_errors, mouse_movement_count
from .session import SessionLog

__all__ = ["SessionMetrics", "MetricsError", "session_metrics", "session_metrics_with_fixations"]


class MetricsError(ValueError):
    """Session is schema-valid but cannot yield the full metric set."""


@dataclass(frozen=True)
class SessionMetrics:
    espim: model.EspimScore
    anf: float
    td: float  # seconds
    errors: int
    mouse_moves: int
    fqls: float  # px
    mean_id: float  # bits


def session_metrics(
    session: SessionLog,
    params: FixationParams = FixationParams(),
    epsilon_px: float = 1.0,
) -> SessionMetrics:
    metrics, _ = session_metrics_with_fixations(session, params, epsilon_px)
    return metrics


def session_metrics_with_fixations(
    session: SessionLog,
    params: FixationParams = FixationParams(),
    epsilon_px: float = 1.0,
) -> tuple[SessionMetrics, list[Fixation]]:
    """Compute metrics and return the detected fixations alongside.

    Raises MetricsError for single-trial sessions (consecutive-target
    distance is undefined) and for sessions whose gaze stream yields no
    in-task fixation (the score needs a positive fixation count).
    """
    trials = session.trials
    if len(trials) < 2:
        raise MetricsError(
            "need at least 2 trials: consecutive-target distance is undefined for one trial"
        )

    centers = [tr.target.center for tr in trials]
    gaps = [math.dist(centers[i - 1], centers[i]) for i in range(1, len(centers))]
    d = fmean(gaps)
    if d <= 0:
        raise MetricsError("all consecutive targets coincide; distance would be zero")
    per_trial_ids = [
        model.shannon_id(gap, trials[i + 1].target.w)
        for i, gap in enumerate(gaps)
        if gap > 0
    ]
    mean_id = fmean(per_trial_ids)

    task_start = trials[0].appear_t
    task_end = trials[-1].select_t
    td_s = (task_end - task_start) / 1000.0

    fixations = detect_fixations(session.gaze, params)
    fix_count = anf(fixations, (task_start, task_end))
    if fix_count <= 0:
        raise MetricsError("no fixation onset inside the task interval; cannot score the session")

    inputs = model.EspimInputs.for_screen(
        screen=session.screen,
        targets=[tr.target for tr in trials],
        d=min(d, session.screen.z),
        anf=fix_count,
        td=td_s,
    )
    score = model.espim(inputs)

    stimuli = [(tr.target, (tr.appear_t, tr.select_t)) for tr in trials]
    drift = model.fqls(fixations, stimuli)

    return (
        SessionMetrics(
            espim=score,
            anf=fix_count,
            td=td_s,
            errors=extract_errors(session),
            mouse_moves=mouse_movement_count(session.mouse, epsilon_px),
            fqls=drift.mean_px,
            mean_id=mean_id,
        ),
        fixations,
    )
