// Upload to the collector, or hand the participant the identical bytes as
// a download when the network path fails.
export function sessionBytes(doc) {
    return JSON.stringify(doc);
}
export async function uploadSession(collectorBase, doc, token) {
    const headers = { "Content-Type": "application/json" };
    if (token)
        headers["X-Collector-Token"] = token;
    let response;
    try {
        response = await fetch(`${collectorBase.replace(/\/$/, "")}/v1/sessions`, {
            method: "POST",
            headers,
            body: sessionBytes(doc),
        });
    }
    catch (err) {
        return { ok: false, status: null, error: String(err) };
    }
    if (response.status === 201) {
        const body = (await response.json());
        return { ok: true, id: body.id };
    }
    let violations = [];
    try {
        const body = (await response.json());
        violations = body.violations ?? [
            { path: "", kind: "invariant", message: body.error ?? `HTTP ${response.status}` },
        ];
    }
    catch {
        violations = [{ path: "", kind: "invariant", message: `HTTP ${response.status}` }];
    }
    return { ok: false, status: response.status, violations };
}
export function downloadSession(doc) {
    const blob = new Blob([sessionBytes(doc)], { type: "application/json" });
    const url = URL.createObjectURL(blob);
    const link = document.createElement("a");
    link.href = url;
    link.download = `${doc.session_id}.json`;
    link.click();
    URL.revokeObjectURL(url);
}
