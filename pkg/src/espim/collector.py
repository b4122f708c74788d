"""HTTP collection service: receives session uploads, persists to disk.

Endpoints:

- ``POST /v1/sessions``  body is one session-log JSON document; a valid
  session is persisted as ``<session_id>.json`` (write to a temp file,
  hard-link to the final name) so a file exists if and only if its content
  is a complete valid session, then answered 201 with ``{"id": ...}``.
  Invalid bodies get 422 with the violation list, duplicates 409, and
  oversized payloads 413.
- ``GET /v1/health``  liveness probe, 200.

An optional shared token (``--token`` or the ESPIM_COLLECTOR_TOKEN
environment variable) gates uploads via the ``X-Collector-Token`` header.
Plain HTTP by design: deploy behind a proxy for TLS.
"""

from __future__ import annotations

import hmac
import json
import os
import tempfile
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .session import SessionLog, SessionSyntaxError, SessionValidationError, parse_session, serialize_session

__all__ = [
    "DEFAULT_MAX_BYTES",
    "TOKEN_ENV_VAR",
    "DuplicateSessionError",
    "persist_session",
    "make_server",
]

DEFAULT_MAX_BYTES = 8 * 1024 * 1024
TOKEN_ENV_VAR = "ESPIM_COLLECTOR_TOKEN"


class DuplicateSessionError(FileExistsError):
    pass


def persist_session(out_dir: str, log: SessionLog) -> str:
    """Atomically persist one session; never leaves partial files behind."""
    data = serialize_session(log)
    final = os.path.join(out_dir, f"{log.session_id}.json")
    fd, tmp = tempfile.mkstemp(dir=out_dir, prefix=".upload-", suffix=".part")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        try:
            os.link(tmp, final)  # fails atomically if the id already exists
        except FileExistsError as exc:
            raise DuplicateSessionError(log.session_id) from exc
    finally:
        os.unlink(tmp)
    return final


class CollectorHandler(BaseHTTPRequestHandler):
    server_version = "espim-collector"
    protocol_version = "HTTP/1.1"

    def _send_json(self, status: int, payload: dict):
        body = json.dumps(payload, sort_keys=True).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self._send_cors()
        self.end_headers()
        self.wfile.write(body)

    def _send_cors(self):
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Headers", "Content-Type, X-Collector-Token")
        self.send_header("Access-Control-Allow-Methods", "POST, GET, OPTIONS")

    def do_OPTIONS(self):  # CORS preflight for browser clients
        self.send_response(204)
        self._send_cors()
        self.send_header("Content-Length", "0")
        self.end_headers()

    def do_GET(self):
        if self.path == "/v1/health":
            self._send_json(200, {"status": "ok"})
        else:
            self._send_json(404, {"error": "not found"})

    def do_POST(self):
        if self.path != "/v1/sessions":
            self._send_json(404, {"error": "not found"})
            return
        token = self.server.token  # type: ignore[attr-defined]
        if token is not None:
            presented = self.headers.get("X-Collector-Token", "")
            if not hmac.compare_digest(presented, token):
                self._send_json(401, {"error": "missing or invalid token"})
                return
        length = self.headers.get("Content-Length")
        if length is None:
            self._send_json(411, {"error": "Content-Length required"})
            return
        try:
            n = int(length)
        except ValueError:
            self._send_json(400, {"error": "bad Content-Length"})
            return
        if n > self.server.max_bytes:  # type: ignore[attr-defined]
            self._send_json(413, {"error": f"payload exceeds {self.server.max_bytes} bytes"})
            self.close_connection = True
            return
        body = self.rfile.read(n)
        try:
            log = parse_session(body)
        except SessionSyntaxError as exc:
            self._send_json(422, {"violations": [
                {"path": "", "kind": "syntax", "message": str(exc)}
            ]})
            return
        except SessionValidationError as exc:
            self._send_json(422, {"violations": [
                {"path": v.path, "kind": v.kind, "message": v.message}
                for v in exc.violations
            ]})
            return
        try:
            persist_session(self.server.out_dir, log)  # type: ignore[attr-defined]
        except DuplicateSessionError:
            self._send_json(409, {"error": f"session {log.session_id!r} already exists"})
            return
        self._send_json(201, {"id": log.session_id})

    def log_message(self, format, *args):
        if not self.server.quiet:  # type: ignore[attr-defined]
            super().log_message(format, *args)


def make_server(
    host: str,
    port: int,
    out_dir: str,
    token: str | None = None,
    max_bytes: int = DEFAULT_MAX_BYTES,
    quiet: bool = False,
) -> ThreadingHTTPServer:
    """Build (but do not start) the collector; reads the token env var when
    no explicit token is given."""
    if token is None:
        token = os.environ.get(TOKEN_ENV_VAR) or None
    os.makedirs(out_dir, exist_ok=True)
    if not os.access(out_dir, os.W_OK):
        raise PermissionError(f"output directory {out_dir!r} is not writable")
    server = ThreadingHTTPServer((host, port), CollectorHandler)
    server.daemon_threads = True
    server.out_dir = out_dir  # type: ignore[attr-defined]
    server.token = token  # type: ignore[attr-defined]
    server.max_bytes = max_bytes  # type: ignore[attr-defined]
    server.quiet = quiet  # type: ignore[attr-defined]
    return server
