import assert from "node:assert/strict";
import { test } from "node:test";
import { generateTargets, insideTarget } from "../src/targets.js";
import { makeEngine, replaySession } from "./replay.js";
test("scripted replay completes 30 trials with zero errors", () => {
    const doc = replaySession(makeEngine(7));
    assert.equal(doc.trials.length, 30);
    assert.equal(doc.trials.reduce((n, tr) => n + tr.error_clicks, 0), 0);
    assert.ok(doc.gaze.length > 30 * 30);
    assert.equal(doc.gaze.length, doc.mouse.length); // proxy mode mirrors streams
});
test("one deliberate stray click records one error on that trial", () => {
    const doc = replaySession(makeEngine(7), { strayClickTrials: [5] });
    assert.equal(doc.trials[5].error_clicks, 1);
    assert.equal(doc.trials[5].error_positions.length, 1);
    assert.equal(doc.trials.reduce((n, tr) => n + tr.error_clicks, 0), 1);
    const [ex, ey] = doc.trials[5].error_positions[0];
    assert.ok(!insideTarget(doc.trials[5].target, ex, ey));
});
test("fixed seed yields an identical target sequence", () => {
    const a = makeEngine(1234);
    const b = makeEngine(1234);
    assert.deepEqual(a.targets, b.targets);
    const docA = replaySession(makeEngine(1234));
    const docB = replaySession(makeEngine(1234));
    assert.deepEqual(docA.trials.map((t) => t.target), docB.trials.map((t) => t.target));
    assert.notDeepEqual(makeEngine(1234).targets, makeEngine(4321).targets);
});
test("targets stay fully inside any viewport at or above the minimum", () => {
    for (const [vw, vh] of [[1024, 640], [1280, 800], [1920, 1080], [3440, 1440]]) {
        for (let seed = 0; seed < 20; seed++) {
            for (const t of generateTargets(vw, vh, seed)) {
                assert.ok(t.cx - t.w / 2 >= 0 && t.cx + t.w / 2 <= vw, `x bounds ${vw}x${vh}`);
                assert.ok(t.cy - t.h / 2 >= 0 && t.cy + t.h / 2 <= vh, `y bounds ${vw}x${vh}`);
            }
        }
    }
});
test("viewports below the minimum are rejected", () => {
    assert.throws(() => makeEngine(1, { viewportW: 800, viewportH: 600 }));
});
test("phases advance strictly forward", () => {
    const engine = makeEngine(2);
    assert.equal(engine.phase, "calibration");
    assert.throws(() => engine.answerPreTest(1)); // wrong phase
    engine.completeCalibration("pointer-proxy");
    assert.throws(() => engine.completeCalibration("pointer-proxy")); // no going back
    engine.answerPreTest(3);
    assert.equal(engine.phase, "task");
    assert.throws(() => engine.buildSession()); // not done yet
});
function clickThroughTask(engine, t0) {
    let t = t0;
    while (engine.phase === "task") {
        const target = engine.activeTarget;
        t += 50;
        engine.click(t, target.cx, target.cy);
    }
    return t;
}
test("mid-task resize invalidates the session", () => {
    const engine = makeEngine(3);
    engine.completeCalibration("pointer-proxy");
    engine.answerPreTest(0);
    engine.startTask(100);
    engine.flagResize();
    assert.ok(engine.invalidated);
    // finish the task anyway; the build must refuse
    clickThroughTask(engine, 200);
    engine.answerPostTest(1, []);
    assert.throws(() => engine.buildSession(), /invalid/);
});
test("resize outside the task phase is harmless", () => {
    const engine = makeEngine(4);
    engine.flagResize();
    assert.ok(!engine.invalidated);
});
test("gaze samples are clamped to the viewport", () => {
    const engine = makeEngine(5);
    engine.completeCalibration("pointer-proxy");
    engine.answerPreTest(1);
    engine.startTask(0);
    engine.pointerMove(10, -25, 5000);
    clickThroughTask(engine, 20);
    engine.answerPostTest(1, []);
    const doc = engine.buildSession();
    assert.deepEqual(doc.mouse[0], [10, 0, 800]);
    assert.deepEqual(doc.gaze[0], [10, 0, 800]);
});
test("webcam mode keeps pointer and gaze streams separate", () => {
    const engine = makeEngine(6, { proxyGaze: false });
    engine.completeCalibration("webgazer");
    engine.answerPreTest(1);
    engine.startTask(0);
    engine.pointerMove(5, 100, 100);
    engine.gazeSample(6, 320, 240);
    clickThroughTask(engine, 10);
    engine.answerPostTest(2, []);
    const doc = engine.buildSession();
    assert.equal(doc.mouse.length, 1);
    assert.equal(doc.gaze.length, 1);
    assert.deepEqual(doc.gaze[0], [6, 320, 240]);
});
