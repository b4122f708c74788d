"""Acceptance criteria, one test per criterion, each at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one PASS line per
criterion.  Tolerances are pinned here and nowhere else.
"""

import itertools
import json
import math
import os
import threading
import time
import urllib.error
import urllib.request
from concurrent.futures import ThreadPoolExecutor

import mpmath as mp
import numpy as np
import scipy.stats

from espim import cli, model, stats
from espim.cluster import kmeans
from espim.fixations import detect_fixations
from espim.session import parse_session
from espim.synth import PERIOD_MS, SynthSessionSpec, make_session_dict, planted_trace

from conftest import brute_force_fixations, reference_espim


def _announce(name):
    print(f"ACCEPTANCE PASS: {name}")


def random_valid_inputs(rng):
    x = float(rng.uniform(300, 4000))
    y = float(rng.uniform(300, 4000))
    screen = model.ScreenSpec(x=x, y=y)
    return model.EspimInputs(
        aos=screen.aos,
        aot=screen.aos * float(rng.uniform(1e-4, 1.0)),
        d=screen.z * float(rng.uniform(1e-3, 1.0)),
        w=x * float(rng.uniform(1e-3, 1.0)),
        anf=float(rng.uniform(0.5, 5000)),
        td=float(rng.uniform(0.05, 5000)),
        screen=screen,
    )


def test_criterion_eq1_oracle_equivalence():
    """1000 random inputs vs a 50-digit oracle, rel err <= 1e-12, < 1 s."""
    rng = np.random.default_rng(20210315)
    inputs = [random_valid_inputs(rng) for _ in range(1000)]

    start = time.perf_counter()
    ours = [model.espim(i).value for i in inputs]
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0, f"1000 evaluations took {elapsed:.3f}s"

    mp.mp.dps = 50
    for inp, value in zip(inputs, ours):
        ratio = mp.mpf(inp.aos) / mp.mpf(inp.aot)
        ident = mp.log(1 + mp.mpf(inp.d) / mp.mpf(inp.w), 2)
        expected = mp.sqrt((ratio * ident * mp.mpf(inp.anf) + 1) / (mp.mpf(inp.td) + 1))
        rel = abs(value - float(expected)) / float(expected)
        assert rel <= 1e-12, f"rel err {rel} at {inp}"
    _announce("Eq-1 oracle equivalence (1000 cases, rel <= 1e-12, < 1 s)")


def test_criterion_scale_invariance():
    """200 random inputs, s in [0.1, 10]: score unchanged to 1e-9 relative."""
    rng = np.random.default_rng(77)
    for _ in range(200):
        inp = random_valid_inputs(rng)
        s = float(rng.uniform(0.1, 10.0))
        scaled = model.EspimInputs(
            aos=inp.aos * s * s, aot=inp.aot * s * s, d=inp.d * s, w=inp.w * s,
            anf=inp.anf, td=inp.td,
        )
        a = model.espim(inp).value
        b = model.espim(scaled).value
        assert abs(a - b) / a <= 1e-9
    _announce("scale invariance (200 cases, 1e-9 relative)")


def test_criterion_monotonicity():
    """100 random sweeps per parameter; strict direction, zero violations."""
    rng = np.random.default_rng(4242)
    directions = {
        "anf": +1,
        "d": +1,
        "td": -1,
        "w": -1,
    }
    for field, sign in directions.items():
        for _ in range(100):
            inp = random_valid_inputs(rng)
            bump = 1.0 + float(rng.uniform(0.01, 0.5))
            grown = {
                "aos": inp.aos, "aot": inp.aot, "d": inp.d, "w": inp.w,
                "anf": inp.anf, "td": inp.td,
            }
            base = model.espim(model.EspimInputs(**grown)).value
            grown[field] = grown[field] * bump
            changed = model.espim(model.EspimInputs(**grown)).value
            if sign > 0:
                assert changed > base, f"{field} up must raise the score"
            else:
                assert changed < base, f"{field} up must lower the score"
    _announce("monotonicity sweeps (4 x 100 cases, zero violations)")


def test_criterion_table2_reproduction():
    """Telescoped series reproduce the published diff columns and totals."""
    resolutions = [(1280, 720), (1280, 800), (1368, 912), (1920, 1080),
                   (2048, 1152), (2560, 1440), (3440, 1440)]
    published = {
        "nine_to_five": ([33.38, -11.28, 1.11, 11.13, 8.25, -4.41, -6.17], 32.01),
        "flexible": ([20.98, 1.10, 2.73, 8.58, 9.86, -4.03, -7.11], 32.11),
    }
    for label, (diffs, total) in published.items():
        p_series = list(itertools.accumulate(diffs))
        table = stats.resolution_diff(list(zip(resolutions, p_series)))
        for row, expected in zip(table.rows, diffs):
            assert abs(row.diff - expected) <= 0.005, (label, row)
        assert abs(table.total - total) <= 0.005, label
    _announce("resolution-difference table reproduction (totals 32.01 / 32.11)")


def test_criterion_table1_ranges():
    """Descriptive ranges forced by the published minima and maxima."""
    d = stats.descriptives([322.0, 617.0, 291.0 + 322.0, 1443.0])
    assert d.range == 1121.0
    d = stats.descriptives([315.0, 454.0, 600.0, 1336.0])
    assert d.range == 1021.0
    _announce("descriptives range consistency (1121 and 1021)")


def test_criterion_statistics_oracle():
    """100 random datasets vs scipy: t, df, r to 1e-9; p to 1e-6; hand case."""
    rng = np.random.default_rng(99)
    for _ in range(100):
        n = int(rng.integers(3, 30))
        xs = rng.normal(loc=rng.uniform(-5, 5), scale=rng.uniform(0.5, 10), size=n)
        ys = xs * rng.uniform(-1, 1) + rng.normal(scale=rng.uniform(0.5, 5), size=n)
        ours_t = stats.paired_t_test(xs, ys)
        ref_t = scipy.stats.ttest_rel(xs, ys)
        assert abs(ours_t.t - float(ref_t.statistic)) <= 1e-9
        assert ours_t.df == n - 1
        assert abs(ours_t.p - float(ref_t.pvalue)) <= 1e-6

        ours_r = stats.pearson(xs, ys)
        ref_r = scipy.stats.pearsonr(xs, ys)
        assert abs(ours_r.r - float(ref_r.statistic)) <= 1e-9
        assert abs(ours_r.p - float(ref_r.pvalue)) <= 1e-6

    hand = stats.paired_t_test([2.0, 4.0, 6.0], [1.0, 2.0, 3.0])  # d = (1,2,3)
    assert round(hand.t, 6) == 3.464102
    assert hand.df == 2
    _announce("statistics oracle (100 datasets; hand case t=3.464102, df=2)")


def test_criterion_fixation_detection():
    """20 planted 90 Hz traces: exact counts, centroids within 1 px, and the
    estimated fixation interval brackets every planted count."""
    rng = np.random.default_rng(321)
    for trace_idx in range(20):
        n_fix = int(rng.integers(2, 8))
        centers = []
        while len(centers) < n_fix:
            cand = (float(rng.uniform(80, 1840)), float(rng.uniform(80, 1000)))
            if not centers or math.dist(centers[-1], cand) >= 280:
                centers.append(cand)
        durations = [float(rng.uniform(220, 520)) for _ in range(n_fix)]
        samples, planted = planted_trace(centers, durations, seed=1000 + trace_idx,
                                         jitter_px=5.0)
        detected = detect_fixations(samples)
        assert len(detected) == n_fix, f"trace {trace_idx}: {len(detected)} != {n_fix}"
        for fx, plan in zip(detected, planted):
            assert math.dist(fx.centroid, plan.center) <= 1.0
            assert 200.0 <= plan.duration <= 600.0

        td_s = (samples[-1].t - samples[0].t) / 1000.0
        interval = model.estimate_anf(td_s)
        assert interval.low <= n_fix <= interval.high, (
            f"trace {trace_idx}: count {n_fix} outside "
            f"[{interval.low:.2f}, {interval.high:.2f}]"
        )
    _announce("fixation detection (20 traces exact; estimate brackets counts)")


def test_criterion_kmeans_small_instance():
    """8 points in 4 tight pairs: exhaustive-search optimum, deterministic."""
    centers = [(100, 100), (1800, 120), (150, 950), (1700, 900)]
    points = []
    for cx, cy in centers:
        points.append((cx - 4.0, cy + 3.0))
        points.append((cx + 4.0, cy - 3.0))

    best_inertia = math.inf
    best_partition = None
    for assignment in itertools.product(range(4), repeat=8):
        if len(set(assignment)) != 4:
            continue
        inertia = 0.0
        for j in range(4):
            members = [points[i] for i in range(8) if assignment[i] == j]
            cx = sum(p[0] for p in members) / len(members)
            cy = sum(p[1] for p in members) / len(members)
            inertia += sum((p[0] - cx) ** 2 + (p[1] - cy) ** 2 for p in members)
        if inertia < best_inertia:
            best_inertia = inertia
            best_partition = assignment

    result = kmeans(points, k=4, seed=42)
    assert abs(result.inertia - best_inertia) <= 1e-9
    ours = sorted(sorted(i for i in range(8) if result.assignments[i] == j)
                  for j in set(result.assignments))
    theirs = sorted(sorted(i for i in range(8) if best_partition[i] == j)
                    for j in set(best_partition))
    assert ours == theirs
    assert kmeans(points, k=4, seed=42) == result
    _announce("k-means small-instance optimality (inertia within 1e-9, deterministic)")


def _corpus(tmp_path):
    specs = [
        SynthSessionSpec(session_id="corpus-a", participant_id="p1", seed=501,
                         started_at="2021-03-15T10:30:00+02:00",
                         symptoms=("tired eyes",), stray_clicks={3: 2}),
        SynthSessionSpec(session_id="corpus-b", participant_id="p2", seed=502,
                         started_at="2021-03-15T19:45:00+02:00",
                         symptoms=("dry eyes", "blurred vision"),
                         screen=(1280.0, 720.0), stray_clicks={10: 1}),
    ]
    paths = []
    docs = {}
    for spec in specs:
        doc = make_session_dict(spec)
        path = tmp_path / f"{spec.session_id}.json"
        path.write_text(json.dumps(doc))
        paths.append(str(path))
        docs[spec.session_id] = doc
    return paths, docs


def _oracle_session_metrics(doc):
    """Recompute every metric from the raw document, sharing no code with
    the pipeline (reference scan + direct formulas)."""
    trials = doc["trials"]
    centers = [(t["target"]["cx"], t["target"]["cy"]) for t in trials]
    gaps = [math.dist(a, b) for a, b in zip(centers, centers[1:])]
    d = sum(gaps) / len(gaps)
    w = sum(t["target"]["w"] for t in trials) / len(trials)
    aot = sum(t["target"]["w"] * t["target"]["h"] for t in trials) / len(trials)
    aos = doc["screen"]["x"] * doc["screen"]["y"]
    td = (trials[-1]["select_t"] - trials[0]["appear_t"]) / 1000.0

    class S:
        def __init__(self, t, x, y):
            self.t, self.x, self.y = t, x, y

    fixations = brute_force_fixations([S(*row) for row in doc["gaze"]])
    count = sum(1 for f in fixations
                if trials[0]["appear_t"] <= f["onset"] <= trials[-1]["select_t"])
    drifts = []
    for f in fixations:
        for t in trials:
            if t["appear_t"] <= f["onset"] < t["select_t"]:
                drifts.append(math.dist(f["centroid"], (t["target"]["cx"], t["target"]["cy"])))
                break
    moves = sum(1 for a, b in zip(doc["mouse"], doc["mouse"][1:])
                if math.hypot(b[1] - a[1], b[2] - a[2]) > 1.0)
    return {
        "espim": reference_espim(aos, aot, d, w, count, td),
        "anf": float(count),
        "td_s": td,
        "errors": sum(t["error_clicks"] for t in trials),
        "mouse_moves": moves,
        "fqls_px": sum(drifts) / len(drifts),
        "mean_id_bits": sum(
            math.log2(1 + gap / trials[i + 1]["target"]["w"])
            for i, gap in enumerate(gaps)
        ) / len(gaps),
    }


def test_criterion_end_to_end_determinism(tmp_path):
    """analyze twice -> byte-identical outputs; metrics match the oracle."""
    paths, docs = _corpus(tmp_path)
    out1 = tmp_path / "run1"
    out2 = tmp_path / "run2"
    assert cli.main(["analyze", *paths, "--out", str(out1), "--seed", "42"]) == 0
    assert cli.main(["analyze", *paths, "--out", str(out2), "--seed", "42"]) == 0
    names = sorted(os.listdir(out1))
    assert names == sorted(os.listdir(out2))
    for name in names:
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes(), name

    report = json.loads((out1 / "report.json").read_text())
    for sid, doc in docs.items():
        expected = _oracle_session_metrics(doc)
        got = report["sessions"][sid]
        for key, value in expected.items():
            if isinstance(value, float):
                assert math.isclose(got[key], value, rel_tol=1e-9), (sid, key)
            else:
                assert got[key] == value, (sid, key)
    _announce("end-to-end determinism + independent metric oracle (2-session corpus)")


def test_criterion_collector_integrity(tmp_path):
    """50 concurrent uploads -> 50 intact files; invalid payloads leave none."""
    from espim.collector import make_server
    from espim.session import serialize_session

    out_dir = tmp_path / "uploads"
    server = make_server("127.0.0.1", 0, str(out_dir), quiet=True)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    base = f"http://127.0.0.1:{server.server_address[1]}"
    try:
        bodies = {}
        for i in range(50):
            sid = f"load-{i:03d}"
            doc = make_session_dict(SynthSessionSpec(session_id=sid, seed=700 + i))
            bodies[sid] = serialize_session(parse_session(json.dumps(doc)))

        def upload(item):
            sid, body = item
            req = urllib.request.Request(f"{base}/v1/sessions", data=body,
                                         headers={"Content-Type": "application/json"})
            with urllib.request.urlopen(req, timeout=30) as resp:
                return resp.status, json.loads(resp.read())

        with ThreadPoolExecutor(max_workers=16) as pool:
            results = list(pool.map(upload, bodies.items()))
        assert all(status == 201 for status, _ in results)

        files = sorted(os.listdir(out_dir))
        assert files == sorted(f"{sid}.json" for sid in bodies)
        for sid, body in bodies.items():
            with open(out_dir / f"{sid}.json", "rb") as fh:
                stored = fh.read()
            assert stored == body  # canonical submission persists byte-identically
            assert parse_session(stored) == parse_session(body)

        for bad in (b"{broken", b'{"version": 2}', b"\xff\xff"):
            req = urllib.request.Request(f"{base}/v1/sessions", data=bad)
            try:
                urllib.request.urlopen(req, timeout=10)
                raise AssertionError("invalid payload was accepted")
            except urllib.error.HTTPError as err:
                assert err.code == 422
        assert sorted(os.listdir(out_dir)) == files  # nothing new appeared
    finally:
        server.shutdown()
        server.server_close()
    _announce("collector integrity (50 concurrent uploads, no partial files)")


def test_criterion_synthetic_correlation_recovery():
    """A corpus built with rho = 0.8 between score and errors recovers
    r within +/-0.05 at n = 200 (the published human effects themselves are
    out of desk-scale reach)."""
    rng = np.random.default_rng(2718)
    n = 200
    rho = 0.8
    z1 = rng.standard_normal(n)
    z2 = rho * z1 + math.sqrt(1 - rho * rho) * rng.standard_normal(n)
    espim_values = 30.0 + 6.0 * z1
    error_values = 2.0 + 1.2 * z2
    result = stats.pearson(espim_values, error_values)
    assert abs(result.r - rho) <= 0.05, f"recovered r={result.r:.4f}"
    _announce(f"synthetic correlation recovery (r={result.r:.4f} vs rho=0.8)")
