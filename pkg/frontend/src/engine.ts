// Task engine: phase machine and recording buffers for one focus-shift
// session.  Deliberately DOM-free -- the browser layer feeds it pointer,
// gaze and clock events, and replay harnesses can drive it headlessly with
// a synthetic clock.  Phases advance strictly forward:
//
//   calibration -> pretest -> task (30 trials) -> posttest -> done

import { generateTargets, insideTarget, MIN_VIEWPORT_W, MIN_VIEWPORT_H } from "./targets.js";
import { SCHEMA_VERSION } from "./types.js";
import type { SessionDoc, SymptomTag, TargetDoc, TrialDoc } from "./types.js";

export type Phase = "calibration" | "pretest" | "task" | "posttest" | "done";

export interface EngineConfig {
  viewportW: number;
  viewportH: number;
  seed: number;
  sessionId: string;
  participantId: string;
  startedAt: string; // ISO 8601 with offset
  nTrials?: number;
  proxyGaze?: boolean; // gaze := pointer (no webcam estimation)
  gameplayRating?: number;
  age?: number;
}

export interface ClickResult {
  hit: boolean;
  trialIndex: number;
  taskDone: boolean;
}

export class TaskEngine {
  readonly config: Required<Pick<EngineConfig, "nTrials" | "proxyGaze">> & EngineConfig;
  readonly targets: TargetDoc[];
  phase: Phase = "calibration";
  currentTrial = 0;
  calibrationQuality: "webgazer" | "pointer-proxy" | null = null;
  invalidated = false;
  invalidReason: string | null = null;

  private trials: TrialDoc[] = [];
  private gaze: [number, number, number][] = [];
  private mouse: [number, number, number][] = [];
  private appearT = 0;
  private strayClicks: [number, number][] = [];
  private displayHours: number | null = null;
  private strainRating: number | null = null;
  private symptoms: SymptomTag[] = [];

  constructor(config: EngineConfig) {
    if (config.viewportW < MIN_VIEWPORT_W || config.viewportH < MIN_VIEWPORT_H) {
      throw new Error(
        `viewport ${config.viewportW}x${config.viewportH} below the ` +
          `${MIN_VIEWPORT_W}x${MIN_VIEWPORT_H} minimum`,
      );
    }
    this.config = { nTrials: 30, proxyGaze: false, ...config };
    this.targets = generateTargets(
      config.viewportW,
      config.viewportH,
      config.seed,
      this.config.nTrials,
    );
  }

  get activeTarget(): TargetDoc | null {
    return this.phase === "task" ? this.targets[this.currentTrial] ?? null : null;
  }

  completeCalibration(quality: "webgazer" | "pointer-proxy"): void {
    this.expectPhase("calibration");
    this.calibrationQuality = quality;
    this.phase = "pretest";
  }

  answerPreTest(displayHours: number): void {
    this.expectPhase("pretest");
    if (!(displayHours >= 0)) {
      throw new Error(`display hours must be >= 0, got ${displayHours}`);
    }
    this.displayHours = displayHours;
    this.phase = "task";
  }

  /** Show the first target; `t` is ms since session start. */
  startTask(t: number): void {
    this.expectPhase("task");
    if (this.trials.length > 0 || this.appearT !== 0) {
      throw new Error("task already started");
    }
    this.appearT = t;
  }

  pointerMove(t: number, x: number, y: number): void {
    const cx = this.clampX(x);
    const cy = this.clampY(y);
    this.mouse.push([t, cx, cy]);
    if (this.config.proxyGaze) {
      this.gaze.push([t, cx, cy]);
    }
  }

  /** Gaze estimate from the webcam provider (ignored in proxy mode). */
  gazeSample(t: number, x: number, y: number): void {
    if (!this.config.proxyGaze) {
      this.gaze.push([t, this.clampX(x), this.clampY(y)]);
    }
  }

  click(t: number, x: number, y: number): ClickResult {
    this.expectPhase("task");
    const target = this.targets[this.currentTrial];
    if (!target) {
      throw new Error("no active target");
    }
    const index = this.currentTrial;
    if (!insideTarget(target, x, y)) {
      this.strayClicks.push([round2(x), round2(y)]);
      return { hit: false, trialIndex: index, taskDone: false };
    }
    const trial: TrialDoc = {
      target,
      appear_t: this.appearT,
      select_t: t,
      select_pos: [round2(x), round2(y)],
      error_clicks: this.strayClicks.length,
    };
    if (this.strayClicks.length > 0) {
      trial.error_positions = this.strayClicks;
    }
    this.trials.push(trial);
    this.strayClicks = [];
    this.currentTrial += 1;
    this.appearT = t; // the next target appears as this one is removed
    const taskDone = this.currentTrial >= this.config.nTrials;
    if (taskDone) {
      this.phase = "posttest";
    }
    return { hit: true, trialIndex: index, taskDone };
  }

  /** Mid-task viewport changes invalidate the session (geometry shifts). */
  flagResize(): void {
    if (this.phase === "task") {
      this.invalidated = true;
      this.invalidReason = "viewport was resized during the task";
    }
  }

  answerPostTest(strainRating: number, symptoms: SymptomTag[]): void {
    this.expectPhase("posttest");
    if (!Number.isInteger(strainRating) || strainRating < 1 || strainRating > 5) {
      throw new Error(`strain rating must be an integer in 1..5, got ${strainRating}`);
    }
    this.strainRating = strainRating;
    this.symptoms = [...new Set(symptoms)];
    this.phase = "done";
  }

  buildSession(): SessionDoc {
    this.expectPhase("done");
    if (this.invalidated) {
      throw new Error(`session is invalid: ${this.invalidReason}`);
    }
    const participant: SessionDoc["participant"] = { id: this.config.participantId };
    if (this.config.age !== undefined) participant.age = this.config.age;
    if (this.config.gameplayRating !== undefined) {
      participant.gameplay_rating = this.config.gameplayRating;
    }
    return {
      version: SCHEMA_VERSION,
      session_id: this.config.sessionId,
      participant,
      screen: { x: this.config.viewportW, y: this.config.viewportH },
      started_at: this.config.startedAt,
      pre: { display_hours: this.displayHours ?? 0 },
      trials: this.trials,
      gaze: this.gaze,
      mouse: this.mouse,
      post: { strain_rating: this.strainRating ?? 1, symptoms: [...this.symptoms] },
    };
  }

  private expectPhase(phase: Phase): void {
    if (this.phase !== phase) {
      throw new Error(`expected phase ${phase}, but the session is in ${this.phase}`);
    }
  }

  private clampX(x: number): number {
    return round2(Math.min(Math.max(x, 0), this.config.viewportW));
  }

  private clampY(y: number): number {
    return round2(Math.min(Math.max(y, 0), this.config.viewportH));
  }
}

function round2(v: number): number {
  return Math.round(v * 100) / 100;
}
