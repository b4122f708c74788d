"""Closed-form eye-strain and target-selection metrics.

The central score combines four ingredients of a selection task into one
number (nominal bits):

    score = sqrt(((aos / aot) * log2(1 + d / w) * anf + 1) / (td + 1))

where ``aos``/``aot`` are screen and target areas (px^2), ``d`` and ``w``
the target distance and width (px), ``anf`` the number of fixations over
the task and ``td`` the task duration in seconds.  Both offsets of 1 keep
the score finite and positive for degenerate inputs.

Everything in this module is a pure function of its arguments; geometry is
in screen pixels, durations in seconds unless a name says otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import fmean
from typing import Iterable, Sequence

__all__ = [
    "DomainError",
    "DegenerateRegressionError",
    "NoQualifyingFixationsError",
    "ScreenSpec",
    "TargetSpec",
    "EspimInputs",
    "EspimScore",
    "EspimEstimate",
    "FittsFit",
    "AnfInterval",
    "FqlsResult",
    "FIXATION_DURATION_BOUNDS_S",
    "shannon_id",
    "fitts_mt",
    "fit_fitts",
    "espim",
    "estimate_anf",
    "espim_estimated",
    "fqls",
]

# Typical fixation duration range (seconds); midpoint 0.4 s is the
# arithmetic mean of the bound and drives the point estimate of ANF.
FIXATION_DURATION_BOUNDS_S = (0.2, 0.6)


class DomainError(ValueError):
    """An input lies outside the model's domain; names the offending field."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class DegenerateRegressionError(ValueError):
    """Regression input has no spread on the independent axis."""


class NoQualifyingFixationsError(ValueError):
    """No fixation onset falls inside any active stimulus interval."""


def _require_positive(field: str, value: float) -> float:
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        raise DomainError(field, f"must be a finite positive number, got {value!r}")
    return float(value)


@dataclass(frozen=True)
class ScreenSpec:
    """Screen geometry in pixels; diagonal ``z`` and area ``aos`` are derived."""

    x: float
    y: float

    def __post_init__(self):
        _require_positive("x", self.x)
        _require_positive("y", self.y)

    @property
    def z(self) -> float:
        return math.hypot(self.x, self.y)

    @property
    def aos(self) -> float:
        return self.x * self.y


@dataclass(frozen=True)
class TargetSpec:
    """One selectable target: center, width, and shape (circle or rectangle)."""

    cx: float
    cy: float
    w: float
    shape: str = "circle"
    h: float | None = None

    def __post_init__(self):
        _require_positive("w", self.w)
        for field in ("cx", "cy"):
            v = getattr(self, field)
            if not (isinstance(v, (int, float)) and math.isfinite(v)):
                raise DomainError(field, f"must be a finite number, got {v!r}")
        if self.shape == "circle":
            if self.h is not None:
                raise DomainError("h", "circle targets take no height")
        elif self.shape == "rectangle":
            if self.h is None:
                raise DomainError("h", "rectangle targets need a height")
            _require_positive("h", self.h)
        else:
            raise DomainError("shape", f"must be 'circle' or 'rectangle', got {self.shape!r}")

    @property
    def aot(self) -> float:
        if self.shape == "circle":
            return math.pi * (self.w / 2.0) ** 2
        return self.w * self.h  # type: ignore[operator]

    @property
    def center(self) -> tuple[float, float]:
        return (self.cx, self.cy)

    def contains(self, x: float, y: float) -> bool:
        """Whether a point lies inside the target (boundary inclusive)."""
        if self.shape == "circle":
            return math.hypot(x - self.cx, y - self.cy) <= self.w / 2.0
        return abs(x - self.cx) <= self.w / 2.0 and abs(y - self.cy) <= self.h / 2.0  # type: ignore[operator]


@dataclass(frozen=True)
class EspimInputs:
    """The score's raw parameters.

    When targets vary in size, ``aot`` and ``w`` are the arithmetic means
    over all targets (see :meth:`for_screen`).  ``screen`` is optional; when
    given, the physical bounds d <= diagonal and w <= screen width are
    enforced as well (they are not derivable from ``aos`` alone).
    """

    aos: float
    aot: float
    d: float
    w: float
    anf: float
    td: float
    screen: ScreenSpec | None = None

    def __post_init__(self):
        for field in ("aos", "aot", "d", "w", "anf", "td"):
            _require_positive(field, getattr(self, field))
        if self.aot > self.aos:
            raise DomainError("aot", f"target area {self.aot} exceeds screen area {self.aos}")
        if self.screen is not None:
            if not math.isclose(self.aos, self.screen.aos, rel_tol=1e-9):
                raise DomainError("aos", f"{self.aos} does not match screen area {self.screen.aos}")
            if self.d > self.screen.z * (1 + 1e-12):
                raise DomainError("d", f"distance {self.d} exceeds screen diagonal {self.screen.z}")
            if self.w > self.screen.x:
                raise DomainError("w", f"width {self.w} exceeds screen width {self.screen.x}")

    @classmethod
    def for_screen(
        cls,
        screen: ScreenSpec,
        targets: Sequence[TargetSpec],
        d: float,
        anf: float,
        td: float,
    ) -> "EspimInputs":
        """Build inputs from explicit geometry, averaging over targets."""
        if not targets:
            raise DomainError("targets", "at least one target is required")
        aot = fmean(t.aot for t in targets)
        w = fmean(t.w for t in targets)
        return cls(aos=screen.aos, aot=aot, d=d, w=w, anf=anf, td=td, screen=screen)


@dataclass(frozen=True)
class EspimScore:
    """The eye-strain score in nominal bits (positive by construction)."""

    value: float

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class FittsFit:
    """Empirical movement-time line mt = a + b * id."""

    a: float
    b: float
    r_squared: float


@dataclass(frozen=True)
class AnfInterval:
    """Fixation-count range implied by the 200-600 ms duration bound."""

    low: float
    mid: float
    high: float


@dataclass(frozen=True)
class EspimEstimate:
    """Score interval from an estimated (not measured) fixation count."""

    low: EspimScore
    mid: EspimScore
    high: EspimScore


@dataclass(frozen=True)
class FqlsResult:
    """Mean fixation drift from active stimulus centers, in pixels."""

    mean_px: float
    qualifying: int
    skipped: int


def shannon_id(d: float, w: float) -> float:
    """Index of difficulty log2(1 + d/w) in bits for distance d, width w."""
    _require_positive("d", d)
    _require_positive("w", w)
    return math.log2(1.0 + d / w)


def fitts_mt(fit: FittsFit, id_bits: float) -> float:
    """Predicted movement time (ms) for a given index of difficulty."""
    _require_positive("id", id_bits)
    return fit.a + fit.b * id_bits


def fit_fitts(trials: Iterable[tuple[float, float]]) -> FittsFit:
    """Ordinary least squares of movement time (ms) on index of difficulty.

    Needs at least two trials with two distinct difficulty values; raises
    DegenerateRegressionError otherwise.
    """
    pts = [(float(i), float(m)) for i, m in trials]
    if len(pts) < 2 or len({i for i, _ in pts}) < 2:
        raise DegenerateRegressionError(
            f"need >= 2 trials with >= 2 distinct id values, got {len(pts)} trials"
        )
    n = len(pts)
    mean_id = sum(i for i, _ in pts) / n
    mean_mt = sum(m for _, m in pts) / n
    sxx = sum((i - mean_id) ** 2 for i, _ in pts)
    sxy = sum((i - mean_id) * (m - mean_mt) for i, m in pts)
    b = sxy / sxx
    a = mean_mt - b * mean_id
    ss_res = sum((m - (a + b * i)) ** 2 for i, m in pts)
    ss_tot = sum((m - mean_mt) ** 2 for _, m in pts)
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return FittsFit(a=a, b=b, r_squared=r_squared)


def espim(inputs: EspimInputs) -> EspimScore:
    """Evaluate the eye-strain score for fully specified inputs."""
    spatial = (inputs.aos / inputs.aot) * shannon_id(inputs.d, inputs.w)
    return EspimScore(math.sqrt((spatial * inputs.anf + 1.0) / (inputs.td + 1.0)))


def estimate_anf(td: float) -> AnfInterval:
    """Fixation-count interval for a task of ``td`` seconds.

    Fixations typically last 200-600 ms, so a task of ``td`` seconds holds
    between td/0.6 and td/0.2 of them; the midpoint uses the 400 ms mean.
    """
    _require_positive("td", td)
    lo_s, hi_s = FIXATION_DURATION_BOUNDS_S
    return AnfInterval(low=td / hi_s, mid=td / ((lo_s + hi_s) / 2.0), high=td / lo_s)


def espim_estimated(
    aos: float,
    aot: float,
    d: float,
    w: float,
    td: float,
    screen: ScreenSpec | None = None,
) -> EspimEstimate:
    """Score interval when no fixation record exists, via :func:`estimate_anf`."""
    interval = estimate_anf(td)
    scores = [
        espim(EspimInputs(aos=aos, aot=aot, d=d, w=w, anf=anf, td=td, screen=screen))
        for anf in (interval.low, interval.mid, interval.high)
    ]
    return EspimEstimate(low=scores[0], mid=scores[1], high=scores[2])


def fqls(
    fixations: Sequence,
    stimuli: Sequence[tuple[TargetSpec, tuple[float, float]]],
) -> FqlsResult:
    """Mean drift of fixation centroids from the stimulus active at onset.

    ``fixations`` need ``onset`` (ms) and ``centroid`` (x, y) attributes;
    ``stimuli`` pair a target with its active [start_ms, end_ms) interval.
    A fixation qualifies when some stimulus is active at its onset (the
    earliest-starting one wins if several overlap); the rest are skipped
    and only counted.  Raises NoQualifyingFixationsError when nothing
    qualifies.
    """
    ordered = sorted(stimuli, key=lambda s: s[1][0])
    distances = []
    skipped = 0
    for fx in fixations:
        hit = None
        for target, (start, end) in ordered:
            if start <= fx.onset < end:
                hit = target
                break
        if hit is None:
            skipped += 1
            continue
        cx, cy = fx.centroid
        distances.append(math.hypot(cx - hit.cx, cy - hit.cy))
    if not distances:
        raise NoQualifyingFixationsError(
            f"none of the {len(fixations)} fixations overlap an active stimulus onset"
        )
    return FqlsResult(
        mean_px=sum(distances) / len(distances),
        qualifying=len(distances),
        skipped=skipped,
    )
