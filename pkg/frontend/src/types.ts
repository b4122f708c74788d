// Session-log document types, schema version 1 (mirrors the collector's
// expectations; see the repository README for the format description).

export const SCHEMA_VERSION = 1;

export const SYMPTOM_TAGS = [
  "tired eyes",
  "dry eyes",
  "blurred vision",
  "headache",
  "eye burn",
  "double vision",
] as const;

export type SymptomTag = (typeof SYMPTOM_TAGS)[number];

export interface TargetDoc {
  cx: number;
  cy: number;
  w: number;
  shape: "circle" | "rectangle";
  h?: number;
}

export interface TrialDoc {
  target: TargetDoc;
  appear_t: number;
  select_t: number;
  select_pos: [number, number];
  error_clicks: number;
  error_positions?: [number, number][];
}

export interface SessionDoc {
  version: number;
  session_id: string;
  participant: { id: string; age?: number; gameplay_rating?: number };
  screen: { x: number; y: number };
  started_at: string;
  pre: { display_hours: number };
  trials: TrialDoc[];
  gaze: [number, number, number][];
  mouse: [number, number, number][];
  post: { strain_rating: number; symptoms: string[] };
}

export interface Violation {
  path: string;
  kind: "missing" | "type" | "invariant";
  message: string;
}
