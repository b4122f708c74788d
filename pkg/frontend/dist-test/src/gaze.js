// Gaze providers.  The pointer-proxy provider defines gaze := pointer and
// needs no hardware; the webcam provider drives a webgazer build loaded at
// runtime (script tag), so the app builds and tests without it.
export class PointerProxyProvider {
    constructor() {
        this.kind = "pointer-proxy";
    }
    // the engine mirrors pointer moves into the gaze buffer in proxy mode,
    // so this provider has nothing to capture
    async start() { }
    stop() { }
}
const WEBGAZER_URL = "https://webgazer.cs.brown.edu/webgazer.js";
export class WebgazerProvider {
    constructor() {
        this.kind = "webgazer";
        this.instance = null;
    }
    async start(sink, now) {
        const wg = await loadWebgazer();
        this.instance = wg;
        wg.setGazeListener((data) => {
            if (data) {
                sink(now(), data.x, data.y);
            }
        });
        await wg.begin();
    }
    stop() {
        this.instance?.end();
        this.instance = null;
    }
}
async function loadWebgazer() {
    const existing = globalThis["webgazer"];
    if (existing)
        return existing;
    await new Promise((resolve, reject) => {
        const script = document.createElement("script");
        script.src = WEBGAZER_URL;
        script.onload = () => resolve();
        script.onerror = () => reject(new Error("webcam gaze library failed to load"));
        document.head.appendChild(script);
    });
    const loaded = globalThis["webgazer"];
    if (!loaded)
        throw new Error("webcam gaze library did not register itself");
    return loaded;
}
