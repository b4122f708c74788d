// Client-side mirror of the session-schema rules, run before upload so the
// app never submits a document the collector would reject.

import { SCHEMA_VERSION, SYMPTOM_TAGS } from "./types.js";
import type { SessionDoc, TargetDoc, Violation } from "./types.js";
import { insideTarget } from "./targets.js";

const SESSION_ID_RE = /^[A-Za-z0-9][A-Za-z0-9._-]{0,127}$/;

export function validateSession(doc: SessionDoc): Violation[] {
  const errs: Violation[] = [];
  const bad = (path: string, kind: Violation["kind"], message: string) =>
    errs.push({ path, kind, message });

  if (doc.version !== SCHEMA_VERSION) {
    bad("version", "invariant", `unsupported schema version ${doc.version}`);
  }
  if (!SESSION_ID_RE.test(doc.session_id)) {
    bad("session_id", "invariant", "must be 1-128 chars of [A-Za-z0-9._-], starting alphanumeric");
  }
  if (!doc.participant || !doc.participant.id) {
    bad("participant.id", "missing", "required field is missing");
  }
  const rating = doc.participant?.gameplay_rating;
  if (rating !== undefined && (!Number.isInteger(rating) || rating < 1 || rating > 5)) {
    bad("participant.gameplay_rating", "invariant", `must be an integer in 1..5, got ${rating}`);
  }
  const sx = doc.screen?.x;
  const sy = doc.screen?.y;
  if (!(typeof sx === "number" && sx > 0 && typeof sy === "number" && sy > 0)) {
    bad("screen", "invariant", "screen x and y must be positive numbers");
  }
  if (!parsesAsOffsetTimestamp(doc.started_at)) {
    bad("started_at", "invariant", "must be ISO 8601 with an explicit UTC offset");
  }
  if (!(typeof doc.pre?.display_hours === "number" && doc.pre.display_hours >= 0)) {
    bad("pre.display_hours", "invariant", "must be a number >= 0");
  }

  if (!Array.isArray(doc.trials) || doc.trials.length === 0) {
    bad("trials", "invariant", "at least one trial is required");
  } else {
    let prevAppear = -Infinity;
    doc.trials.forEach((trial, i) => {
      const p = `trials[${i}]`;
      validateTarget(trial.target, `${p}.target`, sx, sy, bad);
      if (!(trial.appear_t >= 0)) bad(`${p}.appear_t`, "invariant", "must be >= 0");
      if (!(trial.select_t > trial.appear_t)) {
        bad(`${p}.select_t`, "invariant", "selection must come after appearance");
      }
      if (trial.appear_t < prevAppear) {
        bad(`${p}.appear_t`, "invariant", "trials must be ordered by appearance time");
      }
      prevAppear = trial.appear_t;
      if (!insideTarget(trial.target, trial.select_pos[0], trial.select_pos[1])) {
        bad(`${p}.select_pos`, "invariant", "selection point lies outside the target");
      }
      if (!Number.isInteger(trial.error_clicks) || trial.error_clicks < 0) {
        bad(`${p}.error_clicks`, "invariant", "must be an integer >= 0");
      }
      if (trial.error_positions !== undefined &&
          trial.error_positions.length !== trial.error_clicks) {
        bad(`${p}.error_positions`, "invariant",
            `${trial.error_positions.length} positions for ${trial.error_clicks} error clicks`);
      }
    });
  }

  validateStream(doc.gaze, "gaze", bad);
  validateStream(doc.mouse, "mouse", bad);

  const strain = doc.post?.strain_rating;
  if (!Number.isInteger(strain) || strain < 1 || strain > 5) {
    bad("post.strain_rating", "invariant", `must be an integer in 1..5, got ${strain}`);
  }
  const seen = new Set<string>();
  (doc.post?.symptoms ?? []).forEach((tag, j) => {
    if (!(SYMPTOM_TAGS as readonly string[]).includes(tag)) {
      bad(`post.symptoms[${j}]`, "invariant", `unknown symptom tag ${JSON.stringify(tag)}`);
    } else if (seen.has(tag)) {
      bad(`post.symptoms[${j}]`, "invariant", `duplicate symptom tag ${JSON.stringify(tag)}`);
    }
    seen.add(tag);
  });
  return errs;
}

function validateTarget(
  target: TargetDoc,
  path: string,
  sx: number | undefined,
  sy: number | undefined,
  bad: (path: string, kind: Violation["kind"], message: string) => void,
): void {
  if (!target) {
    bad(path, "missing", "required field is missing");
    return;
  }
  if (!(target.w > 0)) bad(`${path}.w`, "invariant", "must be > 0");
  if (target.shape === "rectangle") {
    if (!(target.h !== undefined && target.h > 0)) {
      bad(`${path}.h`, "invariant", "rectangle targets need a positive height");
    }
  } else if (target.shape === "circle") {
    if (target.h !== undefined) bad(`${path}.h`, "invariant", "circle targets take no height");
  } else {
    bad(`${path}.shape`, "invariant", "must be 'circle' or 'rectangle'");
  }
  if (sx !== undefined && sy !== undefined) {
    if (!(target.cx >= 0 && target.cx <= sx && target.cy >= 0 && target.cy <= sy)) {
      bad(path, "invariant", "target center lies outside the screen");
    }
    if (target.w > sx) bad(`${path}.w`, "invariant", "width exceeds screen width");
    if (target.h !== undefined && target.h > sy) {
      bad(`${path}.h`, "invariant", "height exceeds screen height");
    }
  }
}

function validateStream(
  rows: [number, number, number][],
  path: string,
  bad: (path: string, kind: Violation["kind"], message: string) => void,
): void {
  let prev = -Infinity;
  rows.forEach((row, i) => {
    if (!Array.isArray(row) || row.length !== 3 || row.some((v) => !Number.isFinite(v))) {
      bad(`${path}[${i}]`, "type", "expected a finite [t, x, y] triple");
      return;
    }
    if (row[0] < 0) bad(`${path}[${i}][0]`, "invariant", "timestamp must be >= 0");
    if (row[0] < prev) {
      bad(`${path}[${i}][0]`, "invariant", "timestamps must be non-decreasing");
    }
    prev = row[0];
  });
}

function parsesAsOffsetTimestamp(value: string): boolean {
  if (typeof value !== "string") return false;
  if (!/([+-]\d{2}:\d{2}|Z)$/.test(value)) return false;
  return !Number.isNaN(Date.parse(value));
}
