"""Shared fixtures and independent reference implementations.

The reference implementations here deliberately avoid the package's own
code paths (pure-Python scans instead of numpy, direct formula evaluation)
so tests compare two independent routes to the same answer.
"""

from __future__ import annotations

import json
import math

import pytest

from espim.synth import SynthSessionSpec, make_session_dict


def brute_force_fixations(samples, dispersion_px=60.0, min_dur_ms=200.0):
    """Reference window scan: maximal windows spanning at least the minimum
    duration whose bounding-box width + height stays within the threshold."""

    def disp(window):
        xs = [s.x for s in window]
        ys = [s.y for s in window]
        return (max(xs) - min(xs)) + (max(ys) - min(ys))

    sams = list(samples)
    n = len(sams)
    out = []
    i = 0
    while i < n:
        j = i
        while j < n and sams[j].t - sams[i].t < min_dur_ms:
            j += 1
        if j == n:
            break
        if disp(sams[i : j + 1]) <= dispersion_px:
            while j + 1 < n and disp(sams[i : j + 2]) <= dispersion_px:
                j += 1
            window = sams[i : j + 1]
            out.append(
                {
                    "onset": sams[i].t,
                    "duration": sams[j].t - sams[i].t,
                    "centroid": (
                        sum(s.x for s in window) / len(window),
                        sum(s.y for s in window) / len(window),
                    ),
                    "sample_count": len(window),
                }
            )
            i = j + 1
        else:
            i += 1
    return out


def reference_espim(aos, aot, d, w, anf, td):
    """Direct formula evaluation, no shared code with the package."""
    return math.sqrt(((aos / aot) * math.log2(1 + d / w) * anf + 1) / (td + 1))


@pytest.fixture
def session_doc():
    """A clean 30-trial synthetic session document (raw dict)."""
    return make_session_dict(SynthSessionSpec(session_id="fix-30", seed=101))


@pytest.fixture
def session_doc_with_errors():
    """30 trials with exactly 3 planted stray clicks."""
    return make_session_dict(
        SynthSessionSpec(session_id="fix-err", seed=102, stray_clicks={4: 2, 17: 1})
    )


@pytest.fixture
def session_bytes(session_doc):
    return json.dumps(session_doc).encode("utf-8")
