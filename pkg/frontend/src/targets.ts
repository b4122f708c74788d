// Seeded target sequence: one rectangular button per trial, position and
// size scaled to the viewport, always fully inside it.

import { mulberry32, uniform } from "./rng.js";
import type { TargetDoc } from "./types.js";

export const MIN_VIEWPORT_W = 1024;
export const MIN_VIEWPORT_H = 640;

const EDGE_MARGIN = 8;
// width range in px at a 1920-wide reference viewport
const W_RANGE: [number, number] = [48, 160];
const H_RANGE: [number, number] = [40, 96];

export function generateTargets(
  viewportW: number,
  viewportH: number,
  seed: number,
  count = 30,
): TargetDoc[] {
  const rng = mulberry32(seed);
  const scale = viewportW / 1920;
  const targets: TargetDoc[] = [];
  for (let i = 0; i < count; i++) {
    const w = round2(uniform(rng, W_RANGE[0], W_RANGE[1]) * scale);
    const h = round2(uniform(rng, H_RANGE[0], H_RANGE[1]) * scale);
    const cx = round2(uniform(rng, w / 2 + EDGE_MARGIN, viewportW - w / 2 - EDGE_MARGIN));
    const cy = round2(uniform(rng, h / 2 + EDGE_MARGIN, viewportH - h / 2 - EDGE_MARGIN));
    targets.push({ cx, cy, w, shape: "rectangle", h });
  }
  return targets;
}

export function insideTarget(t: TargetDoc, x: number, y: number): boolean {
  if (t.shape === "circle") {
    return Math.hypot(x - t.cx, y - t.cy) <= t.w / 2;
  }
  return Math.abs(x - t.cx) <= t.w / 2 && Math.abs(y - t.cy) <= (t.h ?? 0) / 2;
}

function round2(v: number): number {
  return Math.round(v * 100) / 100;
}
