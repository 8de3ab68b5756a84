"""Recording stub HTTP server.

Accepts any method/path, records what arrived, and answers with the currently
scripted (status, JSON body) pair. Runs on an ephemeral localhost port in a
background thread; use as a context manager.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Any, Optional
from urllib.parse import parse_qsl, urlsplit


@dataclass(frozen=True)
class RecordedRequest:
    method: str
    path: str
    query: dict  # name -> value (last wins; generated tools never repeat keys)
    headers: dict
    body: Any  # parsed JSON, or raw text if unparseable, or None if empty


@dataclass
class _Script:
    status: int = 200
    body: Any = field(default_factory=dict)


class _Handler(BaseHTTPRequestHandler):
    server: "StubServer"

    def _handle(self):
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        if raw:
            try:
                body = json.loads(raw)
            except json.JSONDecodeError:
                body = raw.decode("utf-8", errors="replace")
        else:
            body = None
        split = urlsplit(self.path)
        record = RecordedRequest(
            method=self.command,
            path=split.path,
            query=dict(parse_qsl(split.query)),
            headers={k.lower(): v for k, v in self.headers.items()},
            body=body,
        )
        script = self.server.stub.next_script()
        self.server.stub.records.append(record)
        payload = json.dumps(script.body).encode("utf-8")
        self.send_response(script.status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    do_GET = do_POST = do_PUT = do_PATCH = do_DELETE = do_HEAD = _handle

    def log_message(self, *args):  # keep test output quiet
        pass


class _Server(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, stub: "StubServer"):
        self.stub = stub
        super().__init__(("127.0.0.1", 0), _Handler)


class StubServer:
    def __init__(self):
        self.records: list = []
        self._scripts: list = []
        self._lock = threading.Lock()
        self._server: Optional[_Server] = None
        self._thread: Optional[threading.Thread] = None

    @property
    def base_url(self) -> str:
        assert self._server is not None, "server not started"
        host, port = self._server.server_address
        return f"http://{host}:{port}"

    def script(self, status: int = 200, body: Any = None) -> None:
        """Queue the response for the next request (FIFO)."""
        with self._lock:
            self._scripts.append(_Script(status, {} if body is None else body))

    def next_script(self) -> _Script:
        with self._lock:
            return self._scripts.pop(0) if self._scripts else _Script()

    def __enter__(self) -> "StubServer":
        self._server = _Server(self)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()
        return self

    def __exit__(self, *exc) -> None:
        if self._server is not None:
            self._server.shutdown()
            self._server.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)
