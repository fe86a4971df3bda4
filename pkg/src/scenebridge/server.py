"""Local HTTP server for browsing a stage and writing back its tag layer.

Serves UI assets (when a directory is given) and the stage's own files.
Write access is limited to one endpoint: PUT /semantic-layer replaces the
stage's semantic sublayer, and only when explicitly enabled.
"""
import mimetypes
import os
import tempfile
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .errors import SceneBridgeError
from .usda import semantic_layer_path
from .usda.reader import read_usda


class StageHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server_version = "scenebridge"

    def log_message(self, format, *args):
        pass

    def _send(self, status: int, body: bytes, content_type: str = "text/plain"):
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _resolve(self, relative: str) -> Path | None:
        """Map a URL path onto the UI directory, then the stage directory."""
        for root in self.server.roots:
            candidate = (root / relative).resolve()
            # refuse paths that escape the served directories
            if not candidate.is_relative_to(root):
                continue
            if candidate.is_file():
                return candidate
        return None

    def do_GET(self):
        relative = self.path.split("?", 1)[0].lstrip("/")
        if not relative:
            relative = "index.html"
        found = self._resolve(relative)
        if found is None:
            self._send(404, b"not found\n")
            return
        guessed = mimetypes.guess_type(found.name)[0]
        if found.suffix == ".usda":
            guessed = "text/plain"
        self._send(200, found.read_bytes(), guessed or "application/octet-stream")

    def do_PUT(self):
        if self.path.split("?", 1)[0] != "/semantic-layer":
            self._send(404, b"not found\n")
            return
        if not self.server.write_back:
            self._send(405, b"write-back is disabled; restart with --write-back\n")
            return
        length = int(self.headers.get("Content-Length", "0"))
        raw = self.rfile.read(length)
        try:
            text = raw.decode("utf-8")
            read_usda(text)
        except (UnicodeDecodeError, SceneBridgeError) as exc:
            self._send(400, f"rejected: {exc}\n".encode("utf-8"))
            return
        target = self.server.semantic_path
        with self.server.write_lock:
            fd, tmp_name = tempfile.mkstemp(
                dir=str(target.parent), suffix=".usda.tmp"
            )
            try:
                with os.fdopen(fd, "w", encoding="utf-8") as handle:
                    handle.write(text)
                os.replace(tmp_name, target)
            except BaseException:
                if os.path.exists(tmp_name):
                    os.unlink(tmp_name)
                raise
        self._send(200, b"semantic layer replaced\n")


def create_server(
    stage_path: str | Path,
    port: int = 0,
    ui_dir: str | Path | None = None,
    write_back: bool = False,
) -> ThreadingHTTPServer:
    """Bind the server; port 0 picks a free ephemeral port."""
    stage_path = Path(stage_path).resolve()
    if not stage_path.is_file():
        raise SceneBridgeError(f"stage file {str(stage_path)!r} does not exist")
    roots = []
    if ui_dir is not None:
        ui_root = Path(ui_dir).resolve()
        if not ui_root.is_dir():
            raise SceneBridgeError(f"ui directory {str(ui_root)!r} does not exist")
        roots.append(ui_root)
    roots.append(stage_path.parent)
    try:
        server = ThreadingHTTPServer(("127.0.0.1", port), StageHandler)
    except OSError as exc:
        raise SceneBridgeError(f"cannot bind port {port}: {exc.strerror}") from exc
    server.roots = roots
    server.write_back = write_back
    server.semantic_path = semantic_layer_path(stage_path)
    server.write_lock = threading.Lock()
    return server


def serve_stage(stage_path, port=8000, ui_dir=None, write_back=False) -> int:
    server = create_server(stage_path, port, ui_dir, write_back)
    host, bound = server.server_address[:2]
    print(f"serving {Path(stage_path).name} on http://{host}:{bound}/ (ctrl-c stops)")
    try:
        server.serve_forever()
    finally:
        server.server_close()
    return 0
