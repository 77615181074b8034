"""Local HTTP server with scripted redirect behaviors, for exercising the resolver.

Routes:
    /ok                     200
    /chain/<n>/<i>          302 to /chain/<n>/<i+1> until i == n, then 200
    /loop/a, /loop/b        302 to each other
    /slow/<seconds>         sleeps, then 200
    /relative/<n>           302 with a relative Location to /ok (n ignored)
    /nolocation             302 without a Location header
    anything else           404
"""

from __future__ import annotations

import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.0"

    def log_message(self, format, *args):  # keep test output quiet
        pass

    def _send(self, code, location=None):
        self.send_response(code)
        if location is not None:
            self.send_header("Location", location)
        self.send_header("Content-Length", "0")
        self.end_headers()

    def do_GET(self):
        parts = [p for p in self.path.split("?")[0].split("/") if p]
        try:
            self._route(parts)
        except (BrokenPipeError, ConnectionResetError):
            pass

    do_HEAD = do_GET

    def _route(self, parts):
        if parts == ["ok"]:
            self._send(200)
        elif len(parts) == 3 and parts[0] == "chain":
            n, i = int(parts[1]), int(parts[2])
            if i < n:
                self._send(302, f"/chain/{n}/{i + 1}")
            else:
                self._send(200)
        elif parts == ["loop", "a"]:
            self._send(302, "/loop/b")
        elif parts == ["loop", "b"]:
            self._send(302, "/loop/a")
        elif len(parts) == 2 and parts[0] == "slow":
            time.sleep(float(parts[1]))
            self._send(200)
        elif len(parts) == 2 and parts[0] == "relative":
            self._send(301, "../ok")
        elif parts == ["nolocation"]:
            self._send(302)
        else:
            self._send(404)


class _Server(ThreadingHTTPServer):
    daemon_threads = True
    block_on_close = False


class RedirectTestServer:
    """Context manager running the scripted server on an ephemeral localhost port."""

    def __init__(self, host: str = "127.0.0.1"):
        self._server = _Server((host, 0), _Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)

    @property
    def base(self) -> str:
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}"

    def url(self, path: str) -> str:
        return self.base + "/" + path.lstrip("/")

    def start(self) -> "RedirectTestServer":
        self._thread.start()
        return self

    def stop(self) -> None:
        self._server.shutdown()
        self._server.server_close()

    def __enter__(self):
        return self.start()

    def __exit__(self, *exc):
        self.stop()
