// Gaze providers.  The pointer-proxy provider defines gaze := pointer and
// needs no hardware; the webcam provider drives a webgazer build loaded at
// runtime (script tag), so the app builds and tests without it.

export type GazeSink = (t: number, x: number, y: number) => void;

export interface GazeProvider {
  readonly kind: "webgazer" | "pointer-proxy";
  start(sink: GazeSink, now: () => number): Promise<void>;
  stop(): void;
}

export class PointerProxyProvider implements GazeProvider {
  readonly kind = "pointer-proxy";
  // the engine mirrors pointer moves into the gaze buffer in proxy mode,
  // so this provider has nothing to capture
  async start(): Promise<void> {}
  stop(): void {}
}

interface WebgazerGlobal {
  setGazeListener(cb: (data: { x: number; y: number } | null) => void): WebgazerGlobal;
  begin(): Promise<unknown>;
  end(): void;
}

const WEBGAZER_URL = "https://webgazer.cs.brown.edu/webgazer.js";

export class WebgazerProvider implements GazeProvider {
  readonly kind = "webgazer";
  private instance: WebgazerGlobal | null = null;

  async start(sink: GazeSink, now: () => number): Promise<void> {
    const wg = await loadWebgazer();
    this.instance = wg;
    wg.setGazeListener((data) => {
      if (data) {
        sink(now(), data.x, data.y);
      }
    });
    await wg.begin();
  }

  stop(): void {
    this.instance?.end();
    this.instance = null;
  }
}

async function loadWebgazer(): Promise<WebgazerGlobal> {
  const existing = (globalThis as Record<string, unknown>)["webgazer"];
  if (existing) return existing as WebgazerGlobal;
  await new Promise<void>((resolve, reject) => {
    const script = document.createElement("script");
    script.src = WEBGAZER_URL;
    script.onload = () => resolve();
    script.onerror = () => reject(new Error("webcam gaze library failed to load"));
    document.head.appendChild(script);
  });
  const loaded = (globalThis as Record<string, unknown>)["webgazer"];
  if (!loaded) throw new Error("webcam gaze library did not register itself");
  return loaded as WebgazerGlobal;
}
