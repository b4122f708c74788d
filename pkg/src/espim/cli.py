"""Command-line front end.

Subcommands: ``validate``, ``analyze``, ``estimate``, ``cluster``,
``resolution-diff``, ``serve``.  Exit codes: 0 success, 1 validation or
analysis failure, 2 usage error (argparse), 3 I/O error.  All randomness is
controlled by ``--seed`` (default 42), so identical inputs and seed yield
byte-identical outputs.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys

from . import __version__, model
from .cluster import InfeasibleClusteringError
from .report import (
    AnalysisParams,
    ReportError,
    analyze_sources,
    build_report,
    csv_tables,
    report_to_bytes,
    write_atomic,
    write_report,
    _group_of,
    _region_summary,
)
from .session import SessionParseError, SessionSyntaxError, SessionValidationError, parse_session
from .stats import StatsError, resolution_diff, split_by_schedule
from .collector import DEFAULT_MAX_BYTES, make_server

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_IO = 3

DEFAULT_SEED = 42


def _read_sources(paths: list[str]) -> list[tuple[str, bytes]]:
    sources = []
    for path in paths:
        try:
            with open(path, "rb") as fh:
                sources.append((path, fh.read()))
        except OSError as exc:
            raise _IoError(f"{path}: {exc}") from exc
    return sources


class _IoError(Exception):
    pass


# ---------------------------------------------------------------------------
# validate


def cmd_validate(args) -> int:
    status = EXIT_OK
    for path, data in _read_sources(args.paths):
        try:
            log = parse_session(data)
        except SessionSyntaxError as exc:
            print(f"{path}: unreadable: {exc}", file=sys.stderr)
            status = max(status, EXIT_IO)
            continue
        except SessionValidationError as exc:
            for v in exc.violations:
                print(f"{path}: {v.path}: {v.message}", file=sys.stderr)
            status = max(status, EXIT_INVALID)
            continue
        print(f"{path}: valid (session {log.session_id}, {len(log.trials)} trials)")
    return status


# ---------------------------------------------------------------------------
# analyze


def cmd_analyze(args) -> int:
    params = AnalysisParams(
        dispersion_px=args.dispersion_px,
        min_fixation_ms=args.min_fixation_ms,
        pointer_epsilon_px=args.pointer_epsilon_px,
        seed=args.seed,
        k=args.k,
    )
    sources = _read_sources(args.paths)
    try:
        sessions, skipped = analyze_sources(sources, params, skip_invalid=args.skip_invalid)
        report = build_report(sessions, params, skipped)
    except ReportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    written = write_report(args.out, report, sessions, params)
    for path, reason in skipped:
        print(f"skipped {path}: {reason}", file=sys.stderr)
    for path in written:
        print(path)
    return EXIT_OK


# ---------------------------------------------------------------------------
# estimate


def _parse_design(text: str) -> dict:
    fields = {}
    for part in text.split(","):
        if "=" not in part:
            raise ValueError(f"bad design fragment {part!r} (expected key=value)")
        key, value = part.split("=", 1)
        fields[key.strip()] = value.strip()
    missing = {"screen", "target", "d", "td"} - set(fields)
    if missing:
        raise ValueError(f"design is missing {sorted(missing)}")
    sw, _, sh = fields["screen"].partition("x")
    screen = model.ScreenSpec(x=float(sw), y=float(sh))
    shape, _, dims = fields["target"].partition(":")
    if shape == "circle":
        target = model.TargetSpec(cx=screen.x / 2, cy=screen.y / 2, w=float(dims), shape="circle")
    elif shape == "rect":
        tw, _, th = dims.partition("x")
        target = model.TargetSpec(cx=screen.x / 2, cy=screen.y / 2, w=float(tw),
                                  shape="rectangle", h=float(th))
    else:
        raise ValueError(f"unknown target shape {shape!r} (use circle:W or rect:WxH)")
    return {
        "text": text,
        "screen": screen,
        "target": target,
        "d": float(fields["d"]),
        "td": float(fields["td"]),
    }


def cmd_estimate(args) -> int:
    designs = []
    for text in args.design:
        try:
            design = _parse_design(text)
            estimate = model.espim_estimated(
                aos=design["screen"].aos,
                aot=design["target"].aot,
                d=design["d"],
                w=design["target"].w,
                td=design["td"],
                screen=design["screen"],
            )
        except (ValueError, model.DomainError) as exc:
            print(f"error: design {text!r}: {exc}", file=sys.stderr)
            return EXIT_INVALID
        designs.append((design, estimate))
    for design, est in designs:
        print(f"design: {design['text']}")
        print(f"  score low  (600 ms fixations): {est.low.value:.4f} bits")
        print(f"  score mid  (400 ms fixations): {est.mid.value:.4f} bits")
        print(f"  score high (200 ms fixations): {est.high.value:.4f} bits")
    if len(designs) > 1:
        ranked = sorted(designs, key=lambda de: de[1].mid.value)
        order = "  <  ".join(f"{de[0]['text']} ({de[1].mid.value:.4f})" for de in ranked)
        print(f"ordering by mid estimate (least strain first): {order}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# cluster


def cmd_cluster(args) -> int:
    params = AnalysisParams(
        dispersion_px=args.dispersion_px,
        min_fixation_ms=args.min_fixation_ms,
        seed=args.seed,
        k=args.k,
    )
    sources = _read_sources(args.paths)
    try:
        sessions, _ = analyze_sources(sources, params)
    except ReportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if args.by_schedule:
        nine, flex = split_by_schedule(sessions)
        groups = {"nine_to_five": list(nine.sessions), "flexible": list(flex.sessions)}
    else:
        groups = {"all": sessions}
    for key, group in groups.items():
        if not group:
            print(f"{key}: no sessions")
            continue
        try:
            summary, (targets, fixations, clicks, errors), quadrants = \
                _region_summary(group, params)
        except InfeasibleClusteringError as exc:
            print(f"{key}: {exc}", file=sys.stderr)
            return EXIT_INVALID
        print(f"{key}: {len(targets)} targets, {len(fixations)} fixations, "
              f"{len(clicks)} clicks, {len(errors)} errors, inertia {summary.clustering.inertia:.1f}")
        for r in summary.regions:
            fd = "-" if r.mean_fixation_distance is None else f"{r.mean_fixation_distance:.1f}"
            cd = "-" if r.mean_click_distance is None else f"{r.mean_click_distance:.1f}"
            print(f"  {r.label} @ ({r.centroid[0]:.0f}, {r.centroid[1]:.0f}): "
                  f"{r.target_count} targets, fixation drift {fd} px, "
                  f"click drift {cd} px, {r.error_count} errors")
        if args.out:
            os.makedirs(args.out, exist_ok=True)
            cluster_rows = [
                [r.label, r.centroid[0], r.centroid[1], r.target_count,
                 "" if r.mean_fixation_distance is None else r.mean_fixation_distance,
                 "" if r.mean_click_distance is None else r.mean_click_distance,
                 r.error_count]
                for r in summary.regions
            ]
            scatter_rows = []
            for kind, pts, regions in (
                ("target", targets, summary.target_regions),
                ("fixation", fixations, summary.fixation_regions),
                ("click", clicks, summary.click_regions),
                ("error", errors, summary.error_regions),
            ):
                for ((x, y), region), quad in zip(zip(pts, regions), quadrants[kind]):
                    scatter_rows.append([kind, x, y, summary.regions[region].label, quad])
            write_atomic(os.path.join(args.out, f"clusters_{key}.csv"),
                         _rows_to_csv(["cluster", "centroid_x", "centroid_y", "n_targets",
                                       "mean_fixation_dist_px", "mean_click_dist_px", "errors"],
                                      cluster_rows))
            write_atomic(os.path.join(args.out, f"scatter_{key}.csv"),
                         _rows_to_csv(["kind", "x", "y", "cluster", "quadrant"], scatter_rows))
    return EXIT_OK


def _rows_to_csv(header: list[str], rows: list[list]) -> bytes:
    import io

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue().encode("utf-8")


# ---------------------------------------------------------------------------
# resolution-diff


def _points_from_csv(path: str) -> list[tuple[tuple[int, int], float]]:
    points = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["resolution", "espim"]:
            raise ValueError(f"{path}: expected header 'resolution,espim', got {header!r}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise ValueError(f"{path}: line {lineno}: expected 2 fields")
            w, _, h = row[0].partition("x")
            points.append(((int(w), int(h)), float(row[1])))
    return points


def _print_table(label: str, table) -> None:
    print(f"{label}:")
    print(f"  {'resolution':>12}  {'score':>10}  {'diff':>10}")
    for row in table.rows:
        res = f"{row.resolution[0]}x{row.resolution[1]}"
        print(f"  {res:>12}  {row.p_value:>10.4f}  {row.diff:>+10.4f}")
    print(f"  {'TOTAL':>12}  {'':>10}  {table.total:>+10.4f}")


def cmd_resolution_diff(args) -> int:
    if args.points_csv:
        try:
            points = _points_from_csv(args.points_csv)
            table = resolution_diff(points)
        except (OSError, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INVALID if isinstance(exc, (StatsError, ValueError)) else EXIT_IO
        _print_table("points", table)
        return EXIT_OK
    params = AnalysisParams(seed=args.seed)
    sources = _read_sources(args.paths)
    try:
        sessions, _ = analyze_sources(sources, params)
    except ReportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if args.by_schedule:
        nine, flex = split_by_schedule(sessions)
        groups = {"nine_to_five": list(nine.sessions), "flexible": list(flex.sessions)}
    else:
        groups = {"all": sessions}
    from statistics import fmean

    for key, group in groups.items():
        if not group:
            print(f"{key}: no sessions")
            continue
        by_res: dict[tuple[int, int], list[float]] = {}
        for s in group:
            res = (int(s.log.screen.x), int(s.log.screen.y))
            by_res.setdefault(res, []).append(s.metrics.espim.value)
        points = sorted(((res, fmean(vals)) for res, vals in by_res.items()),
                        key=lambda rv: rv[0][0] * rv[0][1])
        try:
            table = resolution_diff(points)
        except StatsError as exc:
            print(f"{key}: {exc}", file=sys.stderr)
            return EXIT_INVALID
        _print_table(key, table)
    return EXIT_OK


# ---------------------------------------------------------------------------
# serve


def cmd_serve(args) -> int:
    host, _, port = args.bind.rpartition(":")
    host = host or "127.0.0.1"
    try:
        server = make_server(
            host=host,
            port=int(port),
            out_dir=args.out,
            token=args.token,
            max_bytes=args.max_bytes,
        )
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    actual = server.server_address
    print(f"collector listening on http://{actual[0]}:{actual[1]} -> {args.out}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        print("shutting down")
    finally:
        server.server_close()
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="espim",
        description="Eye-strain scoring and analysis for target-selection session logs.",
    )
    parser.add_argument("--version", action="version", version=f"espim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate session-log files")
    p.add_argument("paths", nargs="+", help="session-log JSON files")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("analyze", help="run the full analysis over session logs")
    p.add_argument("paths", nargs="+", help="session-log JSON files")
    p.add_argument("--out", required=True, help="output directory for report.json and CSVs")
    p.add_argument("--dispersion-px", type=float, default=60.0,
                   help="fixation dispersion threshold (default 60)")
    p.add_argument("--min-fixation-ms", type=float, default=200.0,
                   help="minimum fixation duration (default 200)")
    p.add_argument("--pointer-epsilon-px", type=float, default=1.0,
                   help="pointer displacement counted as movement (default 1)")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED,
                   help=f"random seed for clustering (default {DEFAULT_SEED})")
    p.add_argument("--k", type=int, default=4, help="number of screen regions (default 4)")
    p.add_argument("--skip-invalid", action="store_true",
                   help="skip invalid sessions instead of aborting")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("estimate", help="score a design without gaze data")
    p.add_argument("--design", action="append", required=True,
                   metavar="screen=WxH,target=circle:W|rect:WxH,d=PX,td=SECONDS",
                   help="design description; repeat to compare designs")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("cluster", help="screen-region cluster analysis")
    p.add_argument("paths", nargs="+", help="session-log JSON files")
    p.add_argument("--k", type=int, default=4, help="number of regions (default 4)")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--dispersion-px", type=float, default=60.0)
    p.add_argument("--min-fixation-ms", type=float, default=200.0)
    p.add_argument("--by-schedule", action="store_true",
                   help="cluster the 9-to-5 and flexible groups separately")
    p.add_argument("--out", help="directory for cluster and scatter CSVs")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("resolution-diff", help="per-resolution score steps")
    p.add_argument("paths", nargs="*", help="session-log JSON files")
    p.add_argument("--points-csv", help="CSV of resolution,espim points instead of sessions")
    p.add_argument("--by-schedule", action="store_true")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(func=cmd_resolution_diff)

    p = sub.add_parser("serve", help="run the session collector service")
    p.add_argument("--bind", default="127.0.0.1:8600", help="host:port (default 127.0.0.1:8600)")
    p.add_argument("--out", required=True, help="directory for persisted sessions")
    p.add_argument("--token", default=None,
                   help="shared upload token (or set ESPIM_COLLECTOR_TOKEN)")
    p.add_argument("--max-bytes", type=int, default=DEFAULT_MAX_BYTES,
                   help="maximum accepted payload size")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "resolution-diff" and not args.points_csv and not args.paths:
        parser.error("resolution-diff needs session paths or --points-csv")
    try:
        return args.func(args)
    except _IoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


def main_entry():  # console-script wrapper
    raise SystemExit(main())


if __name__ == "__main__":
    main_entry()
