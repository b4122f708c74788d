// Upload to the collector, or hand the participant the identical bytes as
// a download when the network path fails.

import type { SessionDoc, Violation } from "./types.js";

export interface UploadOk {
  ok: true;
  id: string;
}

export interface UploadRejected {
  ok: false;
  status: number;
  violations: Violation[];
}

export interface UploadFailed {
  ok: false;
  status: null;
  error: string;
}

export type UploadResult = UploadOk | UploadRejected | UploadFailed;

export function sessionBytes(doc: SessionDoc): string {
  return JSON.stringify(doc);
}

export async function uploadSession(
  collectorBase: string,
  doc: SessionDoc,
  token?: string,
): Promise<UploadResult> {
  const headers: Record<string, string> = { "Content-Type": "application/json" };
  if (token) headers["X-Collector-Token"] = token;
  let response: Response;
  try {
    response = await fetch(`${collectorBase.replace(/\/$/, "")}/v1/sessions`, {
      method: "POST",
      headers,
      body: sessionBytes(doc),
    });
  } catch (err) {
    return { ok: false, status: null, error: String(err) };
  }
  if (response.status === 201) {
    const body = (await response.json()) as { id: string };
    return { ok: true, id: body.id };
  }
  let violations: Violation[] = [];
  try {
    const body = (await response.json()) as { violations?: Violation[]; error?: string };
    violations = body.violations ?? [
      { path: "", kind: "invariant", message: body.error ?? `HTTP ${response.status}` },
    ];
  } catch {
    violations = [{ path: "", kind: "invariant", message: `HTTP ${response.status}` }];
  }
  return { ok: false, status: response.status, violations };
}

export function downloadSession(doc: SessionDoc): void {
  const blob = new Blob([sessionBytes(doc)], { type: "application/json" });
  const url = URL.createObjectURL(blob);
  const link = document.createElement("a");
  link.href = url;
  link.download = `${doc.session_id}.json`;
  link.click();
  URL.revokeObjectURL(url);
}
