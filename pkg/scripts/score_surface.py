#!/usr/bin/env python3
"""Tabulate the eye-strain score over a grid of spatial and fixation values.

Produces a long-format CSV (spatial, anf, td_s, score_bits) suitable for
external 3-D plotting, where ``spatial`` is the product of the screen/target
area ratio and the difficulty index.

    python scripts/score_surface.py --td 120 --out surface.csv
"""

import argparse
import csv
import math
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--td", type=float, default=120.0, help="task duration, seconds")
    parser.add_argument("--spatial-max", type=float, default=2000.0)
    parser.add_argument("--anf-max", type=float, default=600.0)
    parser.add_argument("--steps", type=int, default=60)
    parser.add_argument("--out", default="-", help="output CSV path (default stdout)")
    args = parser.parse_args()

    out = sys.stdout if args.out == "-" else open(args.out, "w", encoding="utf-8", newline="")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["spatial", "anf", "td_s", "score_bits"])
    for i in range(1, args.steps + 1):
        spatial = args.spatial_max * i / args.steps
        for j in range(1, args.steps + 1):
            anf = args.anf_max * j / args.steps
            score = math.sqrt((spatial * anf + 1.0) / (args.td + 1.0))
            writer.writerow([round(spatial, 6), round(anf, 6), args.td, score])
    if out is not sys.stdout:
        out.close()
        print(f"wrote {args.steps * args.steps} rows to {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
