"""Local HTTP review service: list targets, show top candidates with example
sentences, record selections, report agreement. Also serves the review UI
statically when a build directory is available."""

from __future__ import annotations

import json
import mimetypes
import os
import threading
from datetime import datetime, timezone
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

from .store import Bundle, BundleError, load_bundle, save_bundle

API_PREFIX = "/api/v1"

FALLBACK_PAGE = """<!doctype html>
<html><head><meta charset="utf-8"><title>nameplan review</title></head>
<body><h1>nameplan review service</h1>
<p>The service is running, but no review UI build was found.
Use the JSON API under <code>/api/v1/</code> or build the frontend.</p>
</body></html>
"""


class ReviewService:
    """Bundle-backed state shared by the request handlers; selection writes
    are serialized through a lock and flushed to disk immediately."""

    def __init__(self, bundle_path: str, ui_dir: str | None = None):
        self.bundle_path = bundle_path
        self.bundle: Bundle = load_bundle(bundle_path)
        self.ui_dir = ui_dir
        self.lock = threading.Lock()

    # -- queries --------------------------------------------------------------

    def target_rows(self, flt: str) -> list[dict]:
        rows = []
        for kind, record_map in (("entity", self.bundle.names),
                                 ("relation", self.bundle.plans)):
            if flt == "entities" and kind != "entity":
                continue
            if flt == "relations" and kind != "relation":
                continue
            for target in sorted(record_map):
                record = record_map[target]
                reviewed = bool(self.bundle.selections.get(target))
                if flt == "unreviewed" and reviewed:
                    continue
                rows.append({
                    "target": target,
                    "kind": kind,
                    "anonymous": record.get("anonymous", False),
                    "candidate_count": len(record.get("candidates", [])),
                    "reviewed": reviewed,
                })
        return rows

    def progress(self) -> dict:
        reviewable = [
            t for t in self.bundle.targets()
            if (self.bundle.names.get(t) or self.bundle.plans.get(t)).get("candidates")
        ]
        reviewed = [t for t in reviewable if self.bundle.selections.get(t)]
        return {
            "targets": len(reviewable),
            "reviewed": len(reviewed),
            "remaining": len(reviewable) - len(reviewed),
        }

    def candidates(self, target: str) -> dict:
        record = self.bundle.names.get(target)
        kind = "entity"
        if record is None:
            record = self.bundle.plans.get(target)
            kind = "relation"
        if record is None:
            raise BundleError(f"unknown target {target!r}")
        return {
            "target": target,
            "kind": kind,
            "anonymous": record.get("anonymous", False),
            "candidates": record.get("candidates", []),
            "selections": self.bundle.selections.get(target, {}),
        }

    # -- mutation --------------------------------------------------------------

    def select(self, target: str, candidates: list[str] | None, selector: str) -> dict:
        with self.lock:
            timestamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
            self.bundle.record_selection(target, candidates, selector, timestamp)
            save_bundle(self.bundle, self.bundle_path)
        return {
            "ok": True,
            "target": target,
            "selection": self.bundle.selections[target][selector],
        }


def _make_handler(service: ReviewService):
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):  # quiet server
            pass

        def _send_json(self, payload, status: int = 200):
            body = json.dumps(payload, sort_keys=True).encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json; charset=utf-8")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def _send_error_json(self, message: str, status: int):
            self._send_json({"ok": False, "error": message}, status)

        def _serve_static(self, path: str):
            if path in ("/", ""):
                path = "/index.html"
            if service.ui_dir:
                full = os.path.normpath(os.path.join(service.ui_dir, path.lstrip("/")))
                if full.startswith(os.path.abspath(service.ui_dir)) and os.path.isfile(full):
                    ctype = mimetypes.guess_type(full)[0] or "application/octet-stream"
                    with open(full, "rb") as fh:
                        body = fh.read()
                    self.send_response(200)
                    self.send_header("Content-Type", ctype)
                    self.send_header("Content-Length", str(len(body)))
                    self.end_headers()
                    self.wfile.write(body)
                    return
            if path == "/index.html":
                body = FALLBACK_PAGE.encode("utf-8")
                self.send_response(200)
                self.send_header("Content-Type", "text/html; charset=utf-8")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)
                return
            self._send_error_json("not found", 404)

        def do_GET(self):
            parsed = urlparse(self.path)
            route = parsed.path
            query = parse_qs(parsed.query)
            try:
                if route == f"{API_PREFIX}/targets":
                    flt = query.get("filter", ["all"])[0]
                    if flt not in ("all", "unreviewed", "entities", "relations"):
                        return self._send_error_json(f"unknown filter {flt!r}", 400)
                    return self._send_json({
                        "targets": service.target_rows(flt),
                        "progress": service.progress(),
                    })
                if route == f"{API_PREFIX}/candidates":
                    target = query.get("target", [""])[0]
                    if not target:
                        return self._send_error_json("missing target parameter", 400)
                    return self._send_json(service.candidates(target))
                if route == f"{API_PREFIX}/progress":
                    return self._send_json(service.progress())
                if route == f"{API_PREFIX}/metrics/agreement":
                    from .store import agreement_report

                    try:
                        return self._send_json(agreement_report(service.bundle))
                    except BundleError as exc:
                        return self._send_error_json(str(exc), 409)
                if route == f"{API_PREFIX}/bundle":
                    return self._send_json({
                        "path": service.bundle_path,
                        "ontology_hash": service.bundle.ontology_hash,
                        "progress": service.progress(),
                    })
                if route.startswith(API_PREFIX):
                    return self._send_error_json("unknown endpoint", 404)
                return self._serve_static(route)
            except BundleError as exc:
                return self._send_error_json(str(exc), 404)
            except Exception as exc:  # pragma: no cover - defensive
                return self._send_error_json(f"internal error: {exc}", 500)

        def do_POST(self):
            parsed = urlparse(self.path)
            if parsed.path != f"{API_PREFIX}/selection":
                return self._send_error_json("unknown endpoint", 404)
            length = int(self.headers.get("Content-Length", "0"))
            try:
                payload = json.loads(self.rfile.read(length) or b"{}")
            except json.JSONDecodeError:
                return self._send_error_json("request body is not valid JSON", 400)
            target = payload.get("target")
            if not target:
                return self._send_error_json("missing 'target'", 400)
            if "candidates" in payload:
                marked = payload["candidates"]
                if marked is not None and not isinstance(marked, list):
                    return self._send_error_json("'candidates' must be a list or null", 400)
            else:
                single = payload.get("candidate")
                marked = [single] if single else []
            selector = self.headers.get("X-Selector-Id", "reviewer")
            try:
                result = service.select(target, marked, selector)
            except BundleError as exc:
                return self._send_error_json(str(exc), 422)
            return self._send_json(result)

    return Handler


def make_server(bundle_path: str, port: int = 0, host: str = "127.0.0.1",
                ui_dir: str | None = None) -> tuple[ThreadingHTTPServer, ReviewService]:
    service = ReviewService(bundle_path, ui_dir)
    try:
        server = ThreadingHTTPServer((host, port), _make_handler(service))
    except OSError as exc:
        raise BundleError(f"cannot bind {host}:{port}: {exc}") from exc
    return server, service


def serve_review(bundle_path: str, port: int, host: str = "127.0.0.1",
                 ui_dir: str | None = None) -> None:
    server, _service = make_server(bundle_path, port, host, ui_dir)
    print(f"review service on http://{host}:{server.server_address[1]}/ "
          f"(bundle: {bundle_path})")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
