"""Reference stub summarisation service for integration testing.

Serves the client's endpoint contract in-process. By default it titles a
request with the first few words of its text. Individual requests can be
scripted by the SHA-256 hash of their text: each scripted step is consumed
once, so fault-injection sequences (fail, fail, succeed) are expressible.

Runnable standalone:  python -m podseg.stub_service --port 8040
"""

from __future__ import annotations

import argparse
import hashlib
import json
import threading
import time
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

__all__ = ["ScriptStep", "StubSummarizer", "text_key"]

MODEL_NAME = "stub-echo"


def text_key(text: str) -> str:
    """Script key of a request: hex SHA-256 of its text field."""
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class ScriptStep:
    """One scripted response: an HTTP status, an optional body, an optional delay."""

    status: int = 200
    body: dict | None = None
    delay: float = 0.0


class StubSummarizer:
    """Threaded stub server; use as a context manager in tests.

    ``script[text_key(text)]`` is a list of steps consumed one per request.
    Once the script is exhausted (or for unscripted texts) the default
    behaviour answers 200 with the first ``title_words`` words.
    """

    def __init__(self, title_words: int = 3, default_status: int = 200, port: int = 0):
        self.title_words = title_words
        self.default_status = default_status
        self.port = port
        self.script: dict[str, list[ScriptStep]] = {}
        self.request_counts: dict[str, int] = {}
        self._lock = threading.Lock()
        self._server: ThreadingHTTPServer | None = None
        self._thread: threading.Thread | None = None

    # -- scripting -----------------------------------------------------

    def script_for(self, text: str, steps: list[ScriptStep]) -> None:
        with self._lock:
            self.script[text_key(text)] = list(steps)

    def attempts(self, text: str) -> int:
        with self._lock:
            return self.request_counts.get(text_key(text), 0)

    def _next_step(self, text: str) -> ScriptStep:
        key = text_key(text)
        with self._lock:
            self.request_counts[key] = self.request_counts.get(key, 0) + 1
            steps = self.script.get(key)
            if steps:
                return steps.pop(0)
        if self.default_status != 200:
            return ScriptStep(status=self.default_status, body={"error": "scripted failure"})
        words = text.split()[: self.title_words]
        return ScriptStep(status=200, body={"title": " ".join(words), "model": MODEL_NAME})

    # -- lifecycle -----------------------------------------------------

    def __enter__(self) -> "StubSummarizer":
        stub = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self) -> None:  # noqa: N802 (http.server API)
                length = int(self.headers.get("Content-Length", 0))
                try:
                    payload = json.loads(self.rfile.read(length))
                    text = payload["text"]
                except (ValueError, KeyError):
                    self._reply(400, {"error": "bad request"})
                    return
                step = stub._next_step(text)
                if step.delay:
                    time.sleep(step.delay)
                self._reply(step.status, step.body if step.body is not None else {})

            def _reply(self, status: int, body: dict) -> None:
                data = json.dumps(body).encode("utf-8")
                self.send_response(status)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(data)))
                self.end_headers()
                self.wfile.write(data)

            def log_message(self, *args) -> None:  # silence request logging
                pass

        self._server = ThreadingHTTPServer(("127.0.0.1", self.port), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()
        return self

    def __exit__(self, *exc_info) -> None:
        if self._server is not None:
            self._server.shutdown()
            self._server.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)

    @property
    def url(self) -> str:
        if self._server is None:
            raise RuntimeError("server is not running")
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}/"


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description="Run the stub summarisation service")
    parser.add_argument("--port", type=int, default=8040)
    parser.add_argument("--title-words", type=int, default=3)
    args = parser.parse_args(argv)

    stub = StubSummarizer(title_words=args.title_words, port=args.port)
    with stub:
        print(f"stub summariser listening on {stub.url}")
        try:
            while True:
                time.sleep(3600)
        except KeyboardInterrupt:
            return 0


if __name__ == "__main__":
    raise SystemExit(main())
