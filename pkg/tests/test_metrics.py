"""Per-session metric extraction against independently computed values."""

import json
import math

import pytest

from espim.fixations import FixationParams
from espim.metrics import MetricsError, session_metrics, session_metrics_with_fixations
from espim.session import parse_session
from espim.synth import SynthSessionSpec, make_session_dict

from conftest import brute_force_fixations, reference_espim


def two_target_doc(d=300.0):
    """Two identical circular targets a known distance apart, with a planted
    fixation on each."""
    gaze = []
    # fixation on first target during its trial, second during its trial
    for k in range(30):
        gaze.append([100 + k * 11.0, 400.0, 300.0])
    for k in range(30):
        gaze.append([900 + k * 11.0, 400.0 + d, 300.0])
    return {
        "version": 1,
        "session_id": "two-1",
        "participant": {"id": "p9"},
        "screen": {"x": 1920, "y": 1080},
        "started_at": "2021-06-01T11:00:00+00:00",
        "pre": {"display_hours": 1},
        "trials": [
            {
                "target": {"cx": 400, "cy": 300, "w": 80, "shape": "circle"},
                "appear_t": 0,
                "select_t": 800,
                "select_pos": [400, 300],
                "error_clicks": 0,
            },
            {
                "target": {"cx": 400 + d, "cy": 300, "w": 80, "shape": "circle"},
                "appear_t": 800,
                "select_t": 1600,
                "select_pos": [400 + d, 300],
                "error_clicks": 0,
            },
        ],
        "gaze": gaze,
        "mouse": [[0, 100, 100], [500, 400, 300], [1200, 400 + d, 300]],
        "post": {"strain_rating": 2, "symptoms": []},
    }


class TestSessionMetrics:
    def test_single_trial_is_an_error(self):
        doc = two_target_doc()
        doc["trials"] = doc["trials"][:1]
        log = parse_session(json.dumps(doc))
        with pytest.raises(MetricsError):
            session_metrics(log)

    def test_two_targets_at_known_distance(self):
        log = parse_session(json.dumps(two_target_doc(d=300.0)))
        m = session_metrics(log)
        assert m.td == (1600 - 0) / 1000
        assert m.anf == 2.0
        aot = math.pi * 40**2
        expected = reference_espim(1920 * 1080, aot, 300.0, 80.0, 2.0, 1.6)
        assert math.isclose(m.espim.value, expected, rel_tol=1e-12)
        assert math.isclose(m.mean_id, math.log2(1 + 300 / 80), rel_tol=1e-12)
        assert m.errors == 0
        assert m.fqls == 0.0  # fixations exactly on target centers

    def test_no_in_task_fixation_is_an_error(self):
        doc = two_target_doc()
        doc["gaze"] = doc["gaze"][:3]  # too short for any fixation
        log = parse_session(json.dumps(doc))
        with pytest.raises(MetricsError):
            session_metrics(log)

    def test_td_ignores_stream_content(self):
        doc = two_target_doc()
        base = session_metrics(parse_session(json.dumps(doc)))
        doc["mouse"] = [[0, 5, 5], [100, 900, 900], [200, 5, 900], [300, 900, 5]]
        changed = session_metrics(parse_session(json.dumps(doc)))
        assert base.td == changed.td

    def test_full_synthetic_session_matches_field_oracle(self, session_doc_with_errors):
        doc = session_doc_with_errors
        log = parse_session(json.dumps(doc))
        m, fixations = session_metrics_with_fixations(log)

        trials = doc["trials"]
        centers = [(t["target"]["cx"], t["target"]["cy"]) for t in trials]
        gaps = [math.dist(a, b) for a, b in zip(centers, centers[1:])]
        d = sum(gaps) / len(gaps)
        w = sum(t["target"]["w"] for t in trials) / len(trials)
        aot = sum(t["target"]["w"] * t["target"]["h"] for t in trials) / len(trials)
        td = (trials[-1]["select_t"] - trials[0]["appear_t"]) / 1000.0
        assert math.isclose(m.td, td, rel_tol=1e-12)

        ref_fx = brute_force_fixations(log.gaze)
        n_fix = sum(1 for f in ref_fx
                    if trials[0]["appear_t"] <= f["onset"] <= trials[-1]["select_t"])
        assert m.anf == n_fix

        expected = reference_espim(1920 * 1080, aot, d, w, n_fix, td)
        assert math.isclose(m.espim.value, expected, rel_tol=1e-12)

        assert m.errors == sum(t["error_clicks"] for t in trials) == 3

        steps = 0
        for a, b in zip(doc["mouse"], doc["mouse"][1:]):
            if math.hypot(b[1] - a[1], b[2] - a[2]) > 1.0:
                steps += 1
        assert m.mouse_moves == steps

        # drift against the raw trial schedule, reference fixations
        drifts = []
        for f in ref_fx:
            for t in trials:
                if t["appear_t"] <= f["onset"] < t["select_t"]:
                    drifts.append(math.dist(f["centroid"],
                                            (t["target"]["cx"], t["target"]["cy"])))
                    break
        assert math.isclose(m.fqls, sum(drifts) / len(drifts), rel_tol=1e-9)

        ids = [math.log2(1 + gap / trials[i + 1]["target"]["w"])
               for i, gap in enumerate(gaps)]
        assert math.isclose(m.mean_id, sum(ids) / len(ids), rel_tol=1e-12)

        assert len(fixations) == len(ref_fx)

    def test_custom_fixation_params_flow_through(self, session_doc):
        log = parse_session(json.dumps(session_doc))
        loose = session_metrics(log, FixationParams(dispersion_px=200, min_duration_ms=100))
        tight = session_metrics(log, FixationParams(dispersion_px=30, min_duration_ms=400))
        assert loose.anf >= tight.anf
