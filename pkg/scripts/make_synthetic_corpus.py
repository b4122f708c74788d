#!/usr/bin/env python3
"""Generate a deterministic synthetic session corpus for pipeline runs.

Sessions alternate between 9-to-5 and flexible start times, cycle through a
set of common screen resolutions, and carry seeded questionnaire answers and
stray clicks, so the full analysis (groups, resolution table, clusters,
symptom tallies) has something to chew on.

    python scripts/make_synthetic_corpus.py --out corpus/ -n 12 --seed 3
"""

import argparse
import json
import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from espim.session import SYMPTOM_TAGS  # noqa: E402
from espim.synth import SynthSessionSpec, make_session_dict  # noqa: E402

RESOLUTIONS = [(1280, 720), (1280, 800), (1368, 912), (1920, 1080),
               (2048, 1152), (2560, 1440), (3440, 1440)]
NINE_TO_FIVE_STARTS = ["09:15", "10:30", "13:05", "16:40"]
FLEXIBLE_STARTS = ["07:20", "18:30", "21:10", "23:45"]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("-n", "--sessions", type=int, default=12)
    parser.add_argument("--seed", type=int, default=3)
    parser.add_argument("--participants", type=int, default=4)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    os.makedirs(args.out, exist_ok=True)
    written = []
    for i in range(args.sessions):
        flexible = i % 2 == 1
        starts = FLEXIBLE_STARTS if flexible else NINE_TO_FIVE_STARTS
        hhmm = starts[i % len(starts)]
        day = 1 + (i % 27)
        resolution = RESOLUTIONS[i % len(RESOLUTIONS)]
        n_symptoms = int(rng.integers(0, 4 if flexible else 2))
        symptoms = tuple(rng.choice(SYMPTOM_TAGS, size=n_symptoms, replace=False))
        stray = {}
        for _ in range(int(rng.integers(0, 3))):
            stray[int(rng.integers(0, 30))] = int(rng.integers(1, 3))
        spec = SynthSessionSpec(
            session_id=f"synth-{i:03d}",
            # consecutive session pairs share a participant so schedule
            # groups can be paired by participant in the analysis
            participant_id=f"p{(i // 2) % args.participants:02d}",
            started_at=f"2021-04-{day:02d}T{hhmm}:00+02:00",
            screen=(float(resolution[0]), float(resolution[1])),
            seed=args.seed * 1000 + i,
            display_hours=float(np.round(rng.uniform(0.5, 9.0), 1)),
            strain_rating=int(rng.integers(1, 6)),
            symptoms=symptoms,
            gameplay_rating=int(rng.integers(1, 6)),
            stray_clicks=stray,
        )
        path = os.path.join(args.out, f"{spec.session_id}.json")
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(make_session_dict(spec), fh)
        written.append(path)
    print(f"wrote {len(written)} sessions to {args.out}")
    print(f"next: python -m espim.cli analyze {args.out}/*.json --out report/")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
