"""Reference mock servers for the /embed and /generate wire contracts.

Both run a real HTTP server on a loopback port in a daemon thread so
the clients under test exercise genuine request/response round trips
without touching any external network.
"""

import hashlib
import json
import math
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer


def hash_embedding(text: str, dim: int = 8) -> list[float]:
    """Deterministic unit vector derived from the text content."""
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    raw = [digest[i % len(digest)] - 127.5 for i in range(dim)]
    norm = math.sqrt(sum(v * v for v in raw))
    return [v / norm for v in raw]


class _MockServer:
    def __init__(self):
        self.requests: list[dict] = []
        self.request_count = 0
        self._lock = threading.Lock()
        self._server: ThreadingHTTPServer | None = None

    def _start(self, handler_cls):
        self._server = ThreadingHTTPServer(("127.0.0.1", 0), handler_cls)
        self._server.mock = self
        thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        thread.start()

    @property
    def url(self) -> str:
        return f"http://127.0.0.1:{self._server.server_port}"

    def stop(self):
        if self._server:
            self._server.shutdown()
            self._server.server_close()

    def __enter__(self):
        return self

    def __exit__(self, *exc_info):
        self.stop()

    def _next_request_index(self, body) -> int:
        with self._lock:
            self.request_count += 1
            self.requests.append(body)
            return self.request_count


class _JsonHandler(BaseHTTPRequestHandler):
    def log_message(self, *args):
        pass

    def _read_json(self):
        length = int(self.headers.get("Content-Length", 0))
        return json.loads(self.rfile.read(length))

    def _send_json(self, payload, status=200):
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)


class MockEmbedProvider(_MockServer):
    """Configurable /embed provider.

    hooks for misbehavior: fail_status (always), fail_on (specific
    1-based request indices), drop_rows / extra_rows, ragged, and a
    normalized flag that may lie about the actual row norms.
    """

    def __init__(
        self,
        dim: int = 8,
        normalized: bool = True,
        model: str = "mock-encoder",
        embeddings_by_text: dict[str, list[float]] | None = None,
        fail_status: int | None = None,
        fail_on: set[int] | None = None,
        drop_rows: int = 0,
        extra_rows: int = 0,
        ragged: bool = False,
        scale: float = 1.0,
        delay: float = 0.0,
    ):
        super().__init__()
        self.dim = dim
        self.normalized = normalized
        self.model = model
        self.embeddings_by_text = embeddings_by_text
        self.fail_status = fail_status
        self.fail_on = fail_on or set()
        self.drop_rows = drop_rows
        self.extra_rows = extra_rows
        self.ragged = ragged
        self.scale = scale
        self.delay = delay

        outer = self

        class Handler(_JsonHandler):
            def do_POST(self):
                if self.path != "/embed":
                    self._send_json({"error": "not found"}, status=404)
                    return
                body = self._read_json()
                index = outer._next_request_index(body)
                if outer.delay:
                    time.sleep(outer.delay)
                if outer.fail_status is not None or index in outer.fail_on:
                    self._send_json({"error": "mock failure"},
                                    status=outer.fail_status or 500)
                    return
                texts = body["texts"]
                if outer.embeddings_by_text is not None:
                    rows = [list(outer.embeddings_by_text[t]) for t in texts]
                else:
                    rows = [hash_embedding(t, outer.dim) for t in texts]
                if outer.scale != 1.0:
                    rows = [[v * outer.scale for v in row] for row in rows]
                if outer.drop_rows:
                    rows = rows[: len(rows) - outer.drop_rows]
                if outer.extra_rows:
                    rows = rows + rows[: outer.extra_rows]
                if outer.ragged and rows:
                    rows[-1] = rows[-1][:-1]
                self._send_json({
                    "embeddings": rows,
                    "normalized": outer.normalized,
                    "model": outer.model,
                })

        self._start(Handler)


class MockGenerator(_MockServer):
    """Configurable /generate backend. responder maps prompt -> text."""

    def __init__(
        self,
        text: str = "A fixed answer. It has two sentences.",
        responder=None,
        model: str = "mock-lm",
        fail_status: int | None = None,
        delay: float = 0.0,
    ):
        super().__init__()
        self.text = text
        self.responder = responder
        self.model = model
        self.fail_status = fail_status
        self.delay = delay

        outer = self

        class Handler(_JsonHandler):
            def do_POST(self):
                if self.path != "/generate":
                    self._send_json({"error": "not found"}, status=404)
                    return
                body = self._read_json()
                outer._next_request_index(body)
                if outer.delay:
                    time.sleep(outer.delay)
                if outer.fail_status is not None:
                    self._send_json({"error": "mock failure"}, status=outer.fail_status)
                    return
                text = outer.responder(body["prompt"]) if outer.responder else outer.text
                self._send_json({"text": text, "model": outer.model})

        self._start(Handler)
