"""Session-log schema (version 1): parsing, validation, canonical form.

A session log is one UTF-8 JSON document describing a complete trial
session: screen, participant, pre/post questionnaires, per-trial target
records and raw gaze/mouse streams.  ``parse_session`` validates the whole
document and reports every violation with a JSON-ish path;
``serialize_session`` emits the canonical byte form (sorted keys, compact
separators) such that parse(serialize(log)) == log.

Gaze samples outside the screen are clamped to its edge and counted in
``SessionLog.quality`` rather than rejected.
"""

from __future__ import annotations

import csv
import json
import math
import re
from dataclasses import dataclass, field
from datetime import datetime
from typing import IO, Iterable

from .model import DomainError, ScreenSpec, TargetSpec

__all__ = [
    "SCHEMA_VERSION",
    "SYMPTOM_TAGS",
    "GazeSample",
    "MouseSample",
    "TrialRecord",
    "Participant",
    "PreTest",
    "PostTest",
    "StreamQuality",
    "SessionLog",
    "Violation",
    "SessionParseError",
    "SessionSyntaxError",
    "SessionValidationError",
    "parse_session",
    "serialize_session",
    "load_gaze_csv",
]

SCHEMA_VERSION = 1

# Symptom vocabulary offered by the questionnaire; anything else is a
# validation error so tally keys stay comparable across corpora.
SYMPTOM_TAGS = (
    "tired eyes",
    "dry eyes",
    "blurred vision",
    "headache",
    "eye burn",
    "double vision",
)

_SESSION_ID_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]{0,127}$")


@dataclass(frozen=True)
class GazeSample:
    t: float  # ms since session start
    x: float
    y: float


@dataclass(frozen=True)
class MouseSample:
    t: float  # ms since session start
    x: float
    y: float


@dataclass(frozen=True)
class TrialRecord:
    """One presented target and how it was selected.

    ``error_positions`` is optional in the wire format; when present its
    length must equal ``error_clicks`` (stray-click locations enable the
    spatial error analysis, the count alone does not).
    """

    target: TargetSpec
    appear_t: float
    select_t: float
    select_pos: tuple[float, float]
    error_clicks: int = 0
    error_positions: tuple[tuple[float, float], ...] = ()


@dataclass(frozen=True)
class Participant:
    id: str
    age: float | None = None
    gameplay_rating: int | None = None  # 1 (never) .. 5 (every day)


@dataclass(frozen=True)
class PreTest:
    display_hours: float


@dataclass(frozen=True)
class PostTest:
    strain_rating: int  # 1 (none) .. 5 (a lot)
    symptoms: tuple[str, ...] = ()


@dataclass(frozen=True)
class StreamQuality:
    """Counts of samples clamped to the screen edge at parse time."""

    clamped_gaze: int = 0
    clamped_mouse: int = 0


@dataclass(frozen=True)
class SessionLog:
    session_id: str
    participant: Participant
    screen: ScreenSpec
    started_at: datetime
    pre: PreTest
    trials: tuple[TrialRecord, ...]
    gaze: tuple[GazeSample, ...]
    mouse: tuple[MouseSample, ...]
    post: PostTest
    quality: StreamQuality = field(default=StreamQuality(), compare=False)


@dataclass(frozen=True)
class Violation:
    path: str
    kind: str  # "missing" | "type" | "invariant"
    message: str

    def __str__(self) -> str:
        return f"{self.path}: {self.message}"


class SessionParseError(ValueError):
    """Base class for anything wrong with a session document."""


class SessionSyntaxError(SessionParseError):
    """Input is not decodable UTF-8 JSON at all."""


class SessionValidationError(SessionParseError):
    """Syntactically valid JSON that violates the schema."""

    def __init__(self, violations: list[Violation]):
        self.violations = violations
        summary = "; ".join(str(v) for v in violations[:5])
        more = f" (+{len(violations) - 5} more)" if len(violations) > 5 else ""
        super().__init__(f"{len(violations)} schema violation(s): {summary}{more}")


class _Collector:
    def __init__(self):
        self.violations: list[Violation] = []

    def add(self, path: str, kind: str, message: str):
        self.violations.append(Violation(path, kind, message))

    def require(self, obj: dict, key: str, path: str) -> bool:
        if key not in obj:
            self.add(f"{path}.{key}" if path else key, "missing", "required field is missing")
            return False
        return True

    def number(self, value, path: str, *, minimum=None, maximum=None,
               exclusive_min=None, integer=False) -> float | None:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.add(path, "type", f"expected a number, got {type(value).__name__}")
            return None
        v = float(value)
        if not math.isfinite(v):
            self.add(path, "invariant", f"must be finite, got {value!r}")
            return None
        if integer and v != int(v):
            self.add(path, "type", f"expected an integer, got {value!r}")
            return None
        if exclusive_min is not None and not v > exclusive_min:
            self.add(path, "invariant", f"must be > {exclusive_min}, got {value!r}")
            return None
        if minimum is not None and v < minimum:
            self.add(path, "invariant", f"must be >= {minimum}, got {value!r}")
            return None
        if maximum is not None and v > maximum:
            self.add(path, "invariant", f"must be <= {maximum}, got {value!r}")
            return None
        return v


def _parse_point(raw, path: str, errs: _Collector) -> tuple[float, float] | None:
    if not (isinstance(raw, (list, tuple)) and len(raw) == 2):
        errs.add(path, "type", "expected a [x, y] pair")
        return None
    x = errs.number(raw[0], f"{path}[0]")
    y = errs.number(raw[1], f"{path}[1]")
    if x is None or y is None:
        return None
    return (x, y)


def _parse_target(raw, path: str, screen: ScreenSpec | None, errs: _Collector) -> TargetSpec | None:
    if not isinstance(raw, dict):
        errs.add(path, "type", "expected an object")
        return None
    ok = all(errs.require(raw, k, path) for k in ("cx", "cy", "w", "shape"))
    if not ok:
        return None
    cx = errs.number(raw["cx"], f"{path}.cx")
    cy = errs.number(raw["cy"], f"{path}.cy")
    w = errs.number(raw["w"], f"{path}.w", exclusive_min=0.0)
    shape = raw["shape"]
    if shape not in ("circle", "rectangle"):
        errs.add(f"{path}.shape", "invariant", f"must be 'circle' or 'rectangle', got {shape!r}")
        return None
    h = None
    if shape == "rectangle":
        if not errs.require(raw, "h", path):
            return None
        h = errs.number(raw["h"], f"{path}.h", exclusive_min=0.0)
        if h is None:
            return None
    elif "h" in raw:
        errs.add(f"{path}.h", "invariant", "circle targets take no height")
        return None
    if cx is None or cy is None or w is None:
        return None
    try:
        target = TargetSpec(cx=cx, cy=cy, w=w, shape=shape, h=h)
    except DomainError as exc:
        errs.add(f"{path}.{exc.field}", "invariant", str(exc))
        return None
    if screen is not None:
        if not (0.0 <= cx <= screen.x and 0.0 <= cy <= screen.y):
            errs.add(path, "invariant", "target center lies outside the screen")
        if w > screen.x:
            errs.add(f"{path}.w", "invariant", f"width {w} exceeds screen width {screen.x}")
        if h is not None and h > screen.y:
            errs.add(f"{path}.h", "invariant", f"height {h} exceeds screen height {screen.y}")
        if target.aot > screen.aos * (1 + 1e-12):
            errs.add(path, "invariant", "target area exceeds screen area")
    return target


def _parse_trial(raw, path: str, screen: ScreenSpec | None, errs: _Collector) -> TrialRecord | None:
    if not isinstance(raw, dict):
        errs.add(path, "type", "expected an object")
        return None
    ok = all(errs.require(raw, k, path)
             for k in ("target", "appear_t", "select_t", "select_pos", "error_clicks"))
    if not ok:
        return None
    target = _parse_target(raw["target"], f"{path}.target", screen, errs)
    appear = errs.number(raw["appear_t"], f"{path}.appear_t", minimum=0.0)
    select = errs.number(raw["select_t"], f"{path}.select_t", minimum=0.0)
    pos = _parse_point(raw["select_pos"], f"{path}.select_pos", errs)
    clicks = errs.number(raw["error_clicks"], f"{path}.error_clicks", minimum=0, integer=True)
    if None in (target, appear, select, pos, clicks):
        return None
    if select <= appear:
        errs.add(f"{path}.select_t", "invariant",
                 f"selection at {select} must come after appearance at {appear}")
        return None
    if not target.contains(*pos):
        errs.add(f"{path}.select_pos", "invariant", "selection point lies outside the target")
        return None
    positions: list[tuple[float, float]] = []
    if "error_positions" in raw:
        raw_pos = raw["error_positions"]
        if not isinstance(raw_pos, list):
            errs.add(f"{path}.error_positions", "type", "expected a list of [x, y] pairs")
            return None
        for j, rp in enumerate(raw_pos):
            p = _parse_point(rp, f"{path}.error_positions[{j}]", errs)
            if p is None:
                return None
            positions.append(p)
        if len(positions) != int(clicks):
            errs.add(f"{path}.error_positions", "invariant",
                     f"{len(positions)} positions recorded for {int(clicks)} error clicks")
            return None
    return TrialRecord(
        target=target,
        appear_t=appear,
        select_t=select,
        select_pos=pos,
        error_clicks=int(clicks),
        error_positions=tuple(positions),
    )


def _parse_samples(raw, path: str, screen: ScreenSpec | None, cls, errs: _Collector):
    if not isinstance(raw, list):
        errs.add(path, "type", "expected a list of [t, x, y] triples")
        return (), 0
    samples = []
    clamped = 0
    prev_t = -math.inf
    for i, row in enumerate(raw):
        if not (isinstance(row, (list, tuple)) and len(row) == 3):
            errs.add(f"{path}[{i}]", "type", "expected a [t, x, y] triple")
            return (), 0
        t = errs.number(row[0], f"{path}[{i}][0]", minimum=0.0)
        x = errs.number(row[1], f"{path}[{i}][1]")
        y = errs.number(row[2], f"{path}[{i}][2]")
        if None in (t, x, y):
            return (), 0
        if t < prev_t:
            errs.add(f"{path}[{i}][0]", "invariant",
                     f"timestamps must be non-decreasing ({t} after {prev_t})")
            return (), 0
        prev_t = t
        if screen is not None:
            cx = min(max(x, 0.0), screen.x)
            cy = min(max(y, 0.0), screen.y)
            if cx != x or cy != y:
                clamped += 1
            x, y = cx, cy
        samples.append(cls(t=t, x=x, y=y))
    return tuple(samples), clamped


def _parse_started_at(raw, errs: _Collector) -> datetime | None:
    if not isinstance(raw, str):
        errs.add("started_at", "type", "expected an ISO 8601 string with UTC offset")
        return None
    text = raw[:-1] + "+00:00" if raw.endswith("Z") else raw
    try:
        ts = datetime.fromisoformat(text)
    except ValueError:
        errs.add("started_at", "invariant", f"not an ISO 8601 timestamp: {raw!r}")
        return None
    if ts.tzinfo is None:
        errs.add("started_at", "invariant", "timestamp must carry a UTC offset")
        return None
    return ts


def parse_session(data: bytes | str | dict) -> SessionLog:
    """Parse and fully validate one session document.

    Raises SessionSyntaxError for undecodable input and
    SessionValidationError (with the complete violation list) for schema
    problems; returns the validated SessionLog otherwise.
    """
    if isinstance(data, (bytes, bytearray)):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise SessionSyntaxError(f"not valid UTF-8: {exc}") from exc
    elif isinstance(data, str):
        text = data
    else:
        text = None
    if text is not None:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SessionSyntaxError(f"not valid JSON: {exc}") from exc
    else:
        doc = data

    errs = _Collector()
    if not isinstance(doc, dict):
        errs.add("", "type", "top-level value must be an object")
        raise SessionValidationError(errs.violations)

    if errs.require(doc, "version", ""):
        if doc["version"] != SCHEMA_VERSION:
            errs.add("version", "invariant",
                     f"unsupported schema version {doc['version']!r}, expected {SCHEMA_VERSION}")

    session_id = None
    if errs.require(doc, "session_id", ""):
        sid = doc["session_id"]
        if not isinstance(sid, str):
            errs.add("session_id", "type", "expected a string")
        elif not _SESSION_ID_RE.match(sid):
            errs.add("session_id", "invariant",
                     "must be 1-128 chars of [A-Za-z0-9._-], starting alphanumeric")
        else:
            session_id = sid

    participant = None
    if errs.require(doc, "participant", ""):
        raw = doc["participant"]
        if not isinstance(raw, dict):
            errs.add("participant", "type", "expected an object")
        elif errs.require(raw, "id", "participant"):
            pid = raw["id"]
            age = None
            rating = None
            if not (isinstance(pid, str) and pid):
                errs.add("participant.id", "type", "expected a non-empty string")
                pid = None
            if "age" in raw:
                age = errs.number(raw["age"], "participant.age", minimum=0.0)
            if "gameplay_rating" in raw:
                rating = errs.number(raw["gameplay_rating"], "participant.gameplay_rating",
                                     minimum=1, maximum=5, integer=True)
                rating = int(rating) if rating is not None else None
            if pid is not None:
                participant = Participant(id=pid, age=age, gameplay_rating=rating)

    screen = None
    if errs.require(doc, "screen", ""):
        raw = doc["screen"]
        if not isinstance(raw, dict):
            errs.add("screen", "type", "expected an object")
        else:
            x = errs.number(raw.get("x"), "screen.x", exclusive_min=0.0) if errs.require(raw, "x", "screen") else None
            y = errs.number(raw.get("y"), "screen.y", exclusive_min=0.0) if errs.require(raw, "y", "screen") else None
            if x is not None and y is not None:
                screen = ScreenSpec(x=x, y=y)

    started_at = _parse_started_at(doc["started_at"], errs) if errs.require(doc, "started_at", "") else None

    pre = None
    if errs.require(doc, "pre", ""):
        raw = doc["pre"]
        if not isinstance(raw, dict):
            errs.add("pre", "type", "expected an object")
        elif errs.require(raw, "display_hours", "pre"):
            hours = errs.number(raw["display_hours"], "pre.display_hours", minimum=0.0)
            if hours is not None:
                pre = PreTest(display_hours=hours)

    trials: list[TrialRecord] = []
    if errs.require(doc, "trials", ""):
        raw = doc["trials"]
        if not isinstance(raw, list):
            errs.add("trials", "type", "expected a list")
        elif not raw:
            errs.add("trials", "invariant", "at least one trial is required")
        else:
            prev_appear = -math.inf
            for i, rt in enumerate(raw):
                trial = _parse_trial(rt, f"trials[{i}]", screen, errs)
                if trial is None:
                    trials = []
                    break
                if trial.appear_t < prev_appear:
                    errs.add(f"trials[{i}].appear_t", "invariant",
                             "trials must be ordered by appearance time")
                    trials = []
                    break
                prev_appear = trial.appear_t
                trials.append(trial)

    gaze, clamped_gaze = _parse_samples(doc.get("gaze"), "gaze", screen, GazeSample, errs) \
        if errs.require(doc, "gaze", "") else ((), 0)
    mouse, clamped_mouse = _parse_samples(doc.get("mouse"), "mouse", screen, MouseSample, errs) \
        if errs.require(doc, "mouse", "") else ((), 0)

    post = None
    if errs.require(doc, "post", ""):
        raw = doc["post"]
        if not isinstance(raw, dict):
            errs.add("post", "type", "expected an object")
        elif errs.require(raw, "strain_rating", "post"):
            rating = errs.number(raw["strain_rating"], "post.strain_rating",
                                 minimum=1, maximum=5, integer=True)
            symptoms: list[str] = []
            raw_sym = raw.get("symptoms", [])
            if not isinstance(raw_sym, list):
                errs.add("post.symptoms", "type", "expected a list of symptom tags")
            else:
                seen = set()
                for j, tag in enumerate(raw_sym):
                    if tag not in SYMPTOM_TAGS:
                        errs.add(f"post.symptoms[{j}]", "invariant",
                                 f"unknown symptom tag {tag!r}; known: {', '.join(SYMPTOM_TAGS)}")
                    elif tag in seen:
                        errs.add(f"post.symptoms[{j}]", "invariant", f"duplicate symptom tag {tag!r}")
                    else:
                        seen.add(tag)
                        symptoms.append(tag)
            if rating is not None:
                post = PostTest(strain_rating=int(rating), symptoms=tuple(symptoms))

    if errs.violations:
        raise SessionValidationError(errs.violations)

    return SessionLog(
        session_id=session_id,
        participant=participant,
        screen=screen,
        started_at=started_at,
        pre=pre,
        trials=tuple(trials),
        gaze=gaze,
        mouse=mouse,
        post=post,
        quality=StreamQuality(clamped_gaze=clamped_gaze, clamped_mouse=clamped_mouse),
    )


def _target_dict(t: TargetSpec) -> dict:
    d = {"cx": t.cx, "cy": t.cy, "w": t.w, "shape": t.shape}
    if t.shape == "rectangle":
        d["h"] = t.h
    return d


def session_to_dict(log: SessionLog) -> dict:
    """Plain-JSON view of a SessionLog (the inverse of parse_session)."""
    participant: dict = {"id": log.participant.id}
    if log.participant.age is not None:
        participant["age"] = log.participant.age
    if log.participant.gameplay_rating is not None:
        participant["gameplay_rating"] = log.participant.gameplay_rating
    trials = []
    for tr in log.trials:
        d = {
            "target": _target_dict(tr.target),
            "appear_t": tr.appear_t,
            "select_t": tr.select_t,
            "select_pos": list(tr.select_pos),
            "error_clicks": tr.error_clicks,
        }
        if tr.error_positions:
            d["error_positions"] = [list(p) for p in tr.error_positions]
        trials.append(d)
    return {
        "version": SCHEMA_VERSION,
        "session_id": log.session_id,
        "participant": participant,
        "screen": {"x": log.screen.x, "y": log.screen.y},
        "started_at": log.started_at.isoformat(),
        "pre": {"display_hours": log.pre.display_hours},
        "trials": trials,
        "gaze": [[s.t, s.x, s.y] for s in log.gaze],
        "mouse": [[s.t, s.x, s.y] for s in log.mouse],
        "post": {"strain_rating": log.post.strain_rating, "symptoms": list(log.post.symptoms)},
    }


def serialize_session(log: SessionLog) -> bytes:
    """Canonical byte form: UTF-8 JSON, sorted keys, compact separators."""
    text = json.dumps(session_to_dict(log), sort_keys=True, separators=(",", ":"),
                      ensure_ascii=False)
    return text.encode("utf-8") + b"\n"


def load_gaze_csv(source: str | IO[str]) -> list[GazeSample]:
    """Read a sensor export: header ``t_ms,x,y``, one sample per line.

    Timestamps must be non-negative and non-decreasing.
    """
    close = False
    if isinstance(source, str):
        fh = open(source, "r", encoding="utf-8", newline="")
        close = True
    else:
        fh = source
    try:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["t_ms", "x", "y"]:
            raise ValueError(f"expected header 't_ms,x,y', got {header!r}")
        samples: list[GazeSample] = []
        prev_t = -math.inf
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ValueError(f"line {lineno}: expected 3 fields, got {len(row)}")
            try:
                t, x, y = (float(v) for v in row)
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from exc
            if not all(math.isfinite(v) for v in (t, x, y)):
                raise ValueError(f"line {lineno}: non-finite value")
            if t < 0:
                raise ValueError(f"line {lineno}: negative timestamp {t}")
            if t < prev_t:
                raise ValueError(f"line {lineno}: timestamp {t} decreases (previous {prev_t})")
            prev_t = t
            samples.append(GazeSample(t=t, x=x, y=y))
        return samples
    finally:
        if close:
            fh.close()


def iter_symptoms(sessions: Iterable[SessionLog]) -> Iterable[str]:
    for log in sessions:
        yield from log.post.symptoms
