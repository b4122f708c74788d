"""Aggregate analysis over a corpus of session logs.

The report bundles per-session metrics, schedule-group comparisons,
correlations, per-resolution score steps, screen-region cluster summaries
and symptom tallies into one JSON document plus flat CSV tables (one per
figure-style analysis).  Regenerating from identical inputs and seed yields
byte-identical files: sessions are ordered by id, every JSON key is sorted,
all randomness flows from the seed, and no wall-clock state is embedded.

Group t-tests need a pairing; the explicit pairing key is the participant:
each participant with sessions in both schedule groups contributes one pair
of within-participant means.  When fewer than two such participants exist
(or the differences are constant) the comparison is reported as omitted
with the reason, never silently invented.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import tempfile
from dataclasses import dataclass
from statistics import fmean

from . import __version__, stats
from .cluster import InfeasibleClusteringError, RegionSummary, region_analysis
from .fixations import Fixation, FixationParams
from .metrics import MetricsError, SessionMetrics, session_metrics_with_fixations
from .session import (
    SYMPTOM_TAGS,
    SessionLog,
    SessionParseError,
    parse_session,
)
from .stats import ScheduleLabel

__all__ = [
    "AnalysisParams",
    "AnalyzedSession",
    "ReportError",
    "analyze_sources",
    "build_report",
    "write_report",
    "write_atomic",
]

GROUP_KEYS = ("nine_to_five", "flexible")
COMPARISON_MEASURES = (
    "espim",
    "errors",
    "mouse_moves",
    "anf",
    "fqls",
    "strain_rating",
    "display_hours",
)


class ReportError(ValueError):
    pass


@dataclass(frozen=True)
class AnalysisParams:
    dispersion_px: float = 60.0
    min_fixation_ms: float = 200.0
    pointer_epsilon_px: float = 1.0
    seed: int = 42
    k: int = 4

    @property
    def fixation_params(self) -> FixationParams:
        return FixationParams(dispersion_px=self.dispersion_px,
                              min_duration_ms=self.min_fixation_ms)


@dataclass(frozen=True)
class AnalyzedSession:
    path: str
    sha256: str
    log: SessionLog
    metrics: SessionMetrics
    fixations: tuple[Fixation, ...]

    @property
    def started_at(self):
        return self.log.started_at

    def value(self, measure: str) -> float:
        if measure == "espim":
            return self.metrics.espim.value
        if measure == "strain_rating":
            return float(self.log.post.strain_rating)
        if measure == "display_hours":
            return float(self.log.pre.display_hours)
        return float(getattr(self.metrics, measure))


def analyze_sources(
    sources: list[tuple[str, bytes]],
    params: AnalysisParams = AnalysisParams(),
    skip_invalid: bool = False,
) -> tuple[list[AnalyzedSession], list[tuple[str, str]]]:
    """Parse and measure every source; invalid ones abort unless skipped.

    Returns sessions ordered by session id plus the (path, reason) list of
    skipped sources.  Duplicate session ids are always an error.
    """
    analyzed: list[AnalyzedSession] = []
    skipped: list[tuple[str, str]] = []
    seen_ids: dict[str, str] = {}
    for path, data in sources:
        try:
            log = parse_session(data)
            metrics, fixations = session_metrics_with_fixations(
                log, params.fixation_params, params.pointer_epsilon_px
            )
        except (SessionParseError, MetricsError, ValueError) as exc:
            if skip_invalid:
                skipped.append((path, str(exc)))
                continue
            raise ReportError(f"{path}: {exc}") from exc
        if log.session_id in seen_ids:
            raise ReportError(
                f"{path}: duplicate session_id {log.session_id!r} "
                f"(already loaded from {seen_ids[log.session_id]})"
            )
        seen_ids[log.session_id] = path
        analyzed.append(
            AnalyzedSession(
                path=path,
                sha256=hashlib.sha256(data).hexdigest(),
                log=log,
                metrics=metrics,
                fixations=tuple(fixations),
            )
        )
    analyzed.sort(key=lambda s: s.log.session_id)
    return analyzed, skipped


def _mean_se(values: list[float]) -> dict:
    n = len(values)
    mean = fmean(values)
    if n > 1:
        sd = math.sqrt(sum((v - mean) ** 2 for v in values) / (n - 1))
        se = sd / math.sqrt(n)
    else:
        se = 0.0
    return {"mean": mean, "se": se, "n": n}


def _paired_by_participant(
    group_a: list[AnalyzedSession],
    group_b: list[AnalyzedSession],
    measure: str,
) -> tuple[list[float], list[float], int]:
    def by_pid(sessions):
        acc: dict[str, list[float]] = {}
        for s in sessions:
            acc.setdefault(s.log.participant.id, []).append(s.value(measure))
        return acc

    a = by_pid(group_a)
    b = by_pid(group_b)
    pids = sorted(set(a) & set(b))
    xs = [fmean(a[p]) for p in pids]
    ys = [fmean(b[p]) for p in pids]
    return xs, ys, len(pids)


def _comparisons(groups: dict[str, list[AnalyzedSession]],
                 keys: tuple[str, str] = GROUP_KEYS) -> dict:
    out: dict = {}
    g_a = groups[keys[0]]
    g_b = groups[keys[1]]
    for measure in COMPARISON_MEASURES:
        entry: dict = {}
        for key in keys:
            if groups[key]:
                entry[key] = _mean_se([s.value(measure) for s in groups[key]])
        if not g_a or not g_b:
            entry["paired_t"] = {"omitted": f"one of the {keys[0]}/{keys[1]} groups is empty"}
        else:
            xs, ys, n_pairs = _paired_by_participant(g_a, g_b, measure)
            if n_pairs < 2:
                entry["paired_t"] = {
                    "omitted": "fewer than 2 participants have sessions in both groups"
                }
            else:
                try:
                    res = stats.paired_t_test(xs, ys)
                    entry["paired_t"] = {"t": res.t, "df": res.df, "p": res.p,
                                         "n_pairs": n_pairs}
                except stats.ZeroVarianceError:
                    entry["paired_t"] = {
                        "omitted": "paired differences have zero variance"
                    }
        out[measure] = entry
    return out


GAMEPLAY_THRESHOLD = 2.5  # scale midpoint; rating >= threshold is "high"


def _gameplay_split(sessions: list[AnalyzedSession]) -> dict:
    rated = [s for s in sessions if s.log.participant.gameplay_rating is not None]
    if not rated:
        return {"omitted": "no session carries a gameplay rating"}
    low, high = stats.split_by_threshold(
        rated, key=lambda s: s.log.participant.gameplay_rating,
        threshold=GAMEPLAY_THRESHOLD,
    )
    groups = {"low": list(low), "high": list(high)}
    return {
        "threshold": GAMEPLAY_THRESHOLD,
        "unrated_sessions": len(sessions) - len(rated),
        "groups": {key: [s.log.session_id for s in group]
                   for key, group in groups.items()},
        "comparisons": _comparisons(groups, keys=("low", "high")),
    }


def _correlations(sessions: list[AnalyzedSession]) -> dict:
    pairs = {
        "espim_errors": ("espim", "errors"),
        "espim_mouse_moves": ("espim", "mouse_moves"),
        "gameplay_espim": ("gameplay_rating", "espim"),
    }
    out: dict = {}
    for name, (mx, my) in pairs.items():
        if mx == "gameplay_rating":
            subset = [s for s in sessions if s.log.participant.gameplay_rating is not None]
            xs = [float(s.log.participant.gameplay_rating) for s in subset]
            ys = [s.value(my) for s in subset]
        else:
            subset = sessions
            xs = [s.value(mx) for s in subset]
            ys = [s.value(my) for s in subset]
        try:
            res = stats.pearson(xs, ys)
            out[name] = {"r": res.r, "p": res.p, "n": res.n}
        except stats.StatsError as exc:
            out[name] = {"omitted": str(exc)}
    return out


def _resolution_diff(sessions: list[AnalyzedSession]) -> dict:
    by_res: dict[tuple[int, int], list[float]] = {}
    for s in sessions:
        key = (int(s.log.screen.x), int(s.log.screen.y))
        by_res.setdefault(key, []).append(s.metrics.espim.value)
    points = sorted(((res, fmean(vals)) for res, vals in by_res.items()),
                    key=lambda rv: rv[0][0] * rv[0][1])
    try:
        table = stats.resolution_diff(points)
    except stats.StatsError as exc:
        return {"omitted": str(exc)}
    return {
        "rows": [
            {
                "resolution": f"{r.resolution[0]}x{r.resolution[1]}",
                "p_value": r.p_value,
                "diff": r.diff,
            }
            for r in table.rows
        ],
        "total": table.total,
    }


def _quadrant(point: tuple[float, float], screen) -> str:
    """Screen quadrant label, ordered top-to-bottom then left-to-right."""
    idx = (2 if point[1] >= screen.y / 2 else 0) + (1 if point[0] >= screen.x / 2 else 0)
    return f"Q{idx + 1}"


def _region_summary(sessions: list[AnalyzedSession], params: AnalysisParams):
    """Pooled cluster analysis plus the per-point screen-quadrant view
    (cluster membership is canonical; quadrants are emitted alongside)."""
    targets: list[tuple[float, float]] = []
    fixations: list[tuple[float, float]] = []
    clicks: list[tuple[float, float]] = []
    errors: list[tuple[float, float]] = []
    quadrants: dict[str, list[str]] = {"target": [], "fixation": [], "click": [], "error": []}
    for s in sessions:
        screen = s.log.screen
        for tr in s.log.trials:
            targets.append(tr.target.center)
            quadrants["target"].append(_quadrant(tr.target.center, screen))
            clicks.append(tr.select_pos)
            quadrants["click"].append(_quadrant(tr.select_pos, screen))
            for p in tr.error_positions:
                errors.append(p)
                quadrants["error"].append(_quadrant(p, screen))
        for f in s.fixations:
            fixations.append(f.centroid)
            quadrants["fixation"].append(_quadrant(f.centroid, screen))
    summary = region_analysis(targets, fixations, clicks, errors,
                              k=params.k, seed=params.seed)
    return summary, (targets, fixations, clicks, errors), quadrants


def _quadrant_counts(quadrants: dict[str, list[str]]) -> dict:
    out: dict = {}
    for q in ("Q1", "Q2", "Q3", "Q4"):
        out[q] = {kind: labels.count(q) for kind, labels in quadrants.items()}
    return out


def _clusters(groups: dict[str, list[AnalyzedSession]], params: AnalysisParams) -> dict:
    out: dict = {}
    for key, sessions in groups.items():
        if not sessions:
            out[key] = {"omitted": "no sessions in this group"}
            continue
        try:
            summary, _, quadrants = _region_summary(sessions, params)
        except InfeasibleClusteringError as exc:
            out[key] = {"omitted": str(exc)}
            continue
        out[key] = {
            "inertia": summary.clustering.inertia,
            "regions": [
                {
                    "label": r.label,
                    "centroid": [r.centroid[0], r.centroid[1]],
                    "targets": r.target_count,
                    "mean_fixation_distance": r.mean_fixation_distance,
                    "mean_click_distance": r.mean_click_distance,
                    "errors": r.error_count,
                }
                for r in summary.regions
            ],
            "quadrants": _quadrant_counts(quadrants),
        }
    return out


def build_report(
    sessions: list[AnalyzedSession],
    params: AnalysisParams = AnalysisParams(),
    skipped: list[tuple[str, str]] | None = None,
) -> dict:
    """Assemble the full report dictionary (JSON-ready, deterministic)."""
    if not sessions:
        raise ReportError("no valid sessions to analyze")
    nine, flex = stats.split_by_schedule(sessions)
    groups: dict[str, list[AnalyzedSession]] = {
        "nine_to_five": list(nine.sessions),
        "flexible": list(flex.sessions),
    }
    tally = stats.symptom_tally({key: [s.log for s in group]
                                 for key, group in groups.items()})
    report = {
        "tool": {"name": "espim", "version": __version__},
        "params": {
            "dispersion_px": params.dispersion_px,
            "min_fixation_ms": params.min_fixation_ms,
            "pointer_epsilon_px": params.pointer_epsilon_px,
            "seed": params.seed,
            "k": params.k,
        },
        "inputs": [
            {"path": s.path, "session_id": s.log.session_id, "sha256": s.sha256}
            for s in sessions
        ],
        "skipped": [{"path": p, "reason": r} for p, r in (skipped or [])],
        "groups": {key: [s.log.session_id for s in group]
                   for key, group in groups.items()},
        "sessions": {
            s.log.session_id: {
                "group": _group_of(s),
                "resolution": f"{int(s.log.screen.x)}x{int(s.log.screen.y)}",
                "started_at": s.log.started_at.isoformat(),
                "participant": s.log.participant.id,
                "gameplay_rating": s.log.participant.gameplay_rating,
                "display_hours": s.log.pre.display_hours,
                "strain_rating": s.log.post.strain_rating,
                "symptoms": list(s.log.post.symptoms),
                "espim": s.metrics.espim.value,
                "anf": s.metrics.anf,
                "td_s": s.metrics.td,
                "errors": s.metrics.errors,
                "mouse_moves": s.metrics.mouse_moves,
                "fqls_px": s.metrics.fqls,
                "mean_id_bits": s.metrics.mean_id,
                "clamped_gaze": s.log.quality.clamped_gaze,
                "clamped_mouse": s.log.quality.clamped_mouse,
            }
            for s in sessions
        },
        "comparisons": _comparisons(groups),
        "gameplay_split": _gameplay_split(sessions),
        "correlations": _correlations(sessions),
        "resolution_diff": {
            key: (_resolution_diff(group) if group
                  else {"omitted": "no sessions in this group"})
            for key, group in groups.items()
        },
        "clusters": _clusters(groups, params),
        "symptoms": {
            "per_group": tally.per_group,
            "group_totals": tally.group_totals,
        },
    }
    return report


def _group_of(s: AnalyzedSession) -> str:
    nine, _ = stats.split_by_schedule([s])
    return "nine_to_five" if nine.sessions else "flexible"


def report_to_bytes(report: dict) -> bytes:
    text = json.dumps(report, sort_keys=True, separators=(",", ": "), indent=2,
                      ensure_ascii=False)
    return text.encode("utf-8") + b"\n"


# ---------------------------------------------------------------------------
# CSV emission (stable, documented column orders)


def _csv_bytes(header: list[str], rows: list[list]) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue().encode("utf-8")


def _fmt(value) -> str | float | int:
    if value is None:
        return ""
    return value


def csv_tables(
    report: dict,
    sessions: list[AnalyzedSession],
    params: AnalysisParams,
) -> dict[str, bytes]:
    """Figure-style CSV tables keyed by file name."""
    tables: dict[str, bytes] = {}

    rows = []
    for sid in sorted(report["sessions"]):
        e = report["sessions"][sid]
        rows.append([
            sid, e["group"], e["resolution"], e["espim"], e["anf"], e["td_s"],
            e["errors"], e["mouse_moves"], e["fqls_px"], e["mean_id_bits"],
            e["strain_rating"], e["display_hours"], _fmt(e["gameplay_rating"]),
            e["started_at"],
        ])
    tables["sessions.csv"] = _csv_bytes(
        ["session_id", "group", "resolution", "espim_bits", "anf", "td_s",
         "errors", "mouse_moves", "fqls_px", "mean_id_bits", "strain_rating",
         "display_hours", "gameplay_rating", "started_at"],
        rows,
    )

    rows = []
    for name in sorted(report["correlations"]):
        e = report["correlations"][name]
        if "omitted" in e:
            rows.append([name, "", "", "", e["omitted"]])
        else:
            rows.append([name, e["n"], e["r"], e["p"], ""])
    tables["correlations.csv"] = _csv_bytes(["pair", "n", "r", "p", "omitted"], rows)

    def comparison_rows(comparisons: dict, keys: tuple[str, str]) -> list[list]:
        rows = []
        for measure in COMPARISON_MEASURES:
            e = comparisons[measure]
            row = [measure]
            for key in keys:
                g = e.get(key)
                row.extend([g["mean"], g["se"], g["n"]] if g else ["", "", ""])
            t = e["paired_t"]
            if "omitted" in t:
                row.extend(["", "", "", "", t["omitted"]])
            else:
                row.extend([t["t"], t["df"], t["p"], t["n_pairs"], ""])
            rows.append(row)
        return rows

    tables["comparisons.csv"] = _csv_bytes(
        ["measure", "nine_to_five_mean", "nine_to_five_se", "nine_to_five_n",
         "flexible_mean", "flexible_se", "flexible_n", "t", "df", "p",
         "n_pairs", "omitted"],
        comparison_rows(report["comparisons"], GROUP_KEYS),
    )

    gameplay = report["gameplay_split"]
    tables["gameplay_split.csv"] = _csv_bytes(
        ["measure", "low_mean", "low_se", "low_n", "high_mean", "high_se",
         "high_n", "t", "df", "p", "n_pairs", "omitted"],
        comparison_rows(gameplay["comparisons"], ("low", "high"))
        if "omitted" not in gameplay else [],
    )

    for key in GROUP_KEYS:
        e = report["resolution_diff"][key]
        rows = []
        if "omitted" not in e:
            for r in e["rows"]:
                w, h = r["resolution"].split("x")
                rows.append([r["resolution"], w, h, r["p_value"], r["diff"]])
            rows.append(["TOTAL", "", "", "", e["total"]])
        tables[f"resolution_diff_{key}.csv"] = _csv_bytes(
            ["resolution", "width", "height", "p_value_bits", "diff_bits"], rows,
        )

    groups: dict[str, list[AnalyzedSession]] = {"nine_to_five": [], "flexible": []}
    for s in sessions:
        groups[_group_of(s)].append(s)
    for key in GROUP_KEYS:
        cluster_rows: list[list] = []
        scatter_rows: list[list] = []
        group = groups[key]
        if group and "omitted" not in report["clusters"][key]:
            summary, (targets, fixations, clicks, errors), quadrants = \
                _region_summary(group, params)
            for r in summary.regions:
                cluster_rows.append([
                    r.label, r.centroid[0], r.centroid[1], r.target_count,
                    _fmt(r.mean_fixation_distance), _fmt(r.mean_click_distance),
                    r.error_count,
                ])
            for kind, pts, regions in (
                ("target", targets, summary.target_regions),
                ("fixation", fixations, summary.fixation_regions),
                ("click", clicks, summary.click_regions),
                ("error", errors, summary.error_regions),
            ):
                for ((x, y), region), quad in zip(zip(pts, regions), quadrants[kind]):
                    scatter_rows.append([kind, x, y, summary.regions[region].label, quad])
        tables[f"clusters_{key}.csv"] = _csv_bytes(
            ["cluster", "centroid_x", "centroid_y", "n_targets",
             "mean_fixation_dist_px", "mean_click_dist_px", "errors"],
            cluster_rows,
        )
        tables[f"scatter_{key}.csv"] = _csv_bytes(
            ["kind", "x", "y", "cluster", "quadrant"], scatter_rows,
        )

    rows = []
    per_group = report["symptoms"]["per_group"]
    for tag in SYMPTOM_TAGS:
        counts = [per_group.get(key, {}).get(tag, 0) for key in GROUP_KEYS]
        rows.append([tag, *counts, sum(counts)])
    totals = [report["symptoms"]["group_totals"].get(key, 0) for key in GROUP_KEYS]
    rows.append(["TOTAL", *totals, sum(totals)])
    tables["symptoms.csv"] = _csv_bytes(
        ["symptom", "nine_to_five", "flexible", "total"], rows,
    )
    return tables


def write_atomic(path: str, data: bytes):
    """Write bytes so the final name only ever holds complete content."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_report(
    out_dir: str,
    report: dict,
    sessions: list[AnalyzedSession],
    params: AnalysisParams,
) -> list[str]:
    """Write report.json and every CSV table; returns the written paths."""
    os.makedirs(out_dir, exist_ok=True)
    written = []
    path = os.path.join(out_dir, "report.json")
    write_atomic(path, report_to_bytes(report))
    written.append(path)
    for name, data in sorted(csv_tables(report, sessions, params).items()):
        path = os.path.join(out_dir, name)
        write_atomic(path, data)
        written.append(path)
    return written
