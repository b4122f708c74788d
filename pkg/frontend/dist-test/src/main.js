// Browser wiring: phases rendered into #app, engine driven by DOM events.
//
// Query parameters:
//   ?seed=N        fix the target sequence (default: time-derived)
//   ?collector=URL upload endpoint base (default: same origin)
//   ?proxy=1       pointer-proxy gaze (no webcam), also the fallback
//   ?token=T       shared collector token, if the deployment uses one
import { TaskEngine } from "./engine.js";
import { PointerProxyProvider, WebgazerProvider } from "./gaze.js";
import { SYMPTOM_TAGS } from "./types.js";
import { downloadSession, uploadSession } from "./upload.js";
import { validateSession } from "./validate.js";
import { MIN_VIEWPORT_W, MIN_VIEWPORT_H } from "./targets.js";
const params = new URLSearchParams(location.search);
const seed = Number(params.get("seed") ?? Date.now() % 2 ** 31);
const collector = params.get("collector") ?? location.origin;
const proxy = params.get("proxy") === "1";
const token = params.get("token") ?? undefined;
const app = document.getElementById("app");
const t0 = performance.now();
const now = () => performance.now() - t0;
let engine;
let provider;
function show(html) {
    app.innerHTML = html;
    return app;
}
function init() {
    const vw = window.innerWidth;
    const vh = window.innerHeight;
    if (vw < MIN_VIEWPORT_W || vh < MIN_VIEWPORT_H) {
        show(`<div class="panel"><h1>Window too small</h1>
      <p>This task needs at least ${MIN_VIEWPORT_W}x${MIN_VIEWPORT_H} pixels;
      yours is ${vw}x${vh}. Enlarge the window and reload.</p></div>`);
        return;
    }
    engine = new TaskEngine({
        viewportW: vw,
        viewportH: vh,
        seed,
        sessionId: `web-${seed}-${Date.now().toString(36)}`,
        participantId: params.get("participant") ?? "anonymous",
        startedAt: new Date().toISOString(),
        proxyGaze: proxy,
    });
    window.addEventListener("resize", () => {
        engine.flagResize();
        if (engine.invalidated) {
            show(`<div class="panel"><h1>Session invalidated</h1>
        <p>${engine.invalidReason}. Reload to start over.</p></div>`);
        }
    });
    document.addEventListener("pointermove", (ev) => {
        engine.pointerMove(now(), ev.clientX, ev.clientY);
    });
    renderCalibration();
}
function renderCalibration() {
    const root = show(`<div class="panel"><h1>Calibration</h1>
    <p>Click each of the 9 dots while looking directly at the cursor.
    ${proxy ? "Pointer-proxy mode: your pointer stands in for gaze." :
        "Your webcam estimates gaze on this device only; nothing is recorded or sent. Use a well-lit room."}</p>
    <button id="calibrate-start">Start</button></div>`);
    root.querySelector("#calibrate-start").addEventListener("click", async () => {
        if (proxy) {
            provider = new PointerProxyProvider();
            await provider.start(() => { }, now);
            runCalibrationGrid("pointer-proxy");
            return;
        }
        provider = new WebgazerProvider();
        try {
            await provider.start((t, x, y) => engine.gazeSample(t, x, y), now);
            runCalibrationGrid("webgazer");
        }
        catch (err) {
            const fallback = show(`<div class="panel"><h1>Webcam unavailable</h1>
        <p>${String(err)}</p>
        <p>You can continue in pointer-proxy mode (gaze := pointer).</p>
        <button id="proxy-go">Continue with pointer proxy</button></div>`);
            fallback.querySelector("#proxy-go").addEventListener("click", async () => {
                engine.config.proxyGaze = true;
                provider = new PointerProxyProvider();
                await provider.start(() => { }, now);
                runCalibrationGrid("pointer-proxy");
            });
        }
    });
}
function runCalibrationGrid(quality) {
    const root = show(`<div id="grid"></div>`);
    const grid = root.querySelector("#grid");
    let remaining = 9;
    for (const fy of [0.1, 0.5, 0.9]) {
        for (const fx of [0.1, 0.5, 0.9]) {
            const dot = document.createElement("button");
            dot.className = "cal-dot";
            dot.style.left = `${fx * 100}%`;
            dot.style.top = `${fy * 100}%`;
            dot.addEventListener("click", () => {
                dot.remove();
                remaining -= 1;
                if (remaining === 0) {
                    engine.completeCalibration(quality);
                    renderPreTest();
                }
            });
            grid.appendChild(dot);
        }
    }
}
function renderPreTest() {
    const root = show(`<div class="panel"><h1>Before you start</h1>
    <label>How many hours have you already spent on a digital display today?
      <input id="hours" type="number" min="0" max="24" step="0.5" value="0">
    </label>
    <button id="pre-go">Begin the task</button></div>`);
    root.querySelector("#pre-go").addEventListener("click", () => {
        const hours = Number(root.querySelector("#hours").value);
        engine.answerPreTest(Number.isFinite(hours) && hours >= 0 ? hours : 0);
        renderTask();
    });
}
function renderTask() {
    const root = show(`<div id="stage"><div id="progress"></div></div>`);
    const stage = root.querySelector("#stage");
    const progress = root.querySelector("#progress");
    engine.startTask(now());
    stage.addEventListener("pointerdown", (ev) => {
        if (engine.phase !== "task" || engine.invalidated)
            return;
        const result = engine.click(now(), ev.clientX, ev.clientY);
        if (result.hit) {
            if (result.taskDone) {
                renderPostTest();
            }
            else {
                placeButton();
            }
        }
    });
    const placeButton = () => {
        stage.querySelector(".target")?.remove();
        const target = engine.activeTarget;
        const btn = document.createElement("div");
        btn.className = "target";
        btn.textContent = "click";
        btn.style.width = `${target.w}px`;
        btn.style.height = `${target.h}px`;
        btn.style.left = `${target.cx - target.w / 2}px`;
        btn.style.top = `${target.cy - (target.h ?? 0) / 2}px`;
        stage.appendChild(btn);
        progress.textContent = `${engine.currentTrial + 1} / ${engine.config.nTrials}`;
    };
    placeButton();
}
function renderPostTest() {
    provider.stop();
    const symptomBoxes = SYMPTOM_TAGS.map((tag) => `<label class="sym"><input type="checkbox" value="${tag}"> ${tag}</label>`).join("");
    const root = show(`<div class="panel"><h1>Almost done</h1>
    <p>Rate your current eye-strain from 1 (none) to 5 (a lot):</p>
    <div id="strain">${[1, 2, 3, 4, 5]
        .map((v) => `<label><input type="radio" name="strain" value="${v}"> ${v}</label>`)
        .join("")}</div>
    <p>Any of these right now?</p>
    <div id="symptoms">${symptomBoxes}</div>
    <button id="post-go">Submit</button></div>`);
    root.querySelector("#post-go").addEventListener("click", async () => {
        const strain = root.querySelector('input[name="strain"]:checked');
        if (!strain)
            return;
        const symptoms = [...root.querySelectorAll('#symptoms input:checked')].map((el) => el.value);
        engine.answerPostTest(Number(strain.value), symptoms);
        await submit();
    });
}
async function submit() {
    const doc = engine.buildSession();
    const violations = validateSession(doc);
    if (violations.length > 0) {
        show(`<div class="panel"><h1>Recording problem</h1><ul>${violations
            .map((v) => `<li>${v.path}: ${v.message}</li>`)
            .join("")}</ul></div>`);
        return;
    }
    const result = await uploadSession(collector, doc, token);
    if (result.ok) {
        show(`<div class="panel"><h1>Thank you!</h1>
      <p>Your session was stored as <code>${result.id}</code>.</p></div>`);
    }
    else if (result.status === null) {
        const root = show(`<div class="panel"><h1>Upload failed</h1>
      <p>${result.error}</p>
      <p>You can download the session file and send it to the study team.</p>
      <button id="dl">Download session file</button></div>`);
        root.querySelector("#dl").addEventListener("click", () => downloadSession(doc));
    }
    else {
        show(`<div class="panel"><h1>Collector rejected the session (${result.status})</h1>
      <ul>${result.violations.map((v) => `<li>${v.path}: ${v.message}</li>`).join("")}</ul></div>`);
    }
}
init();
