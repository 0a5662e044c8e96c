from __future__ import annotations

import socket
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import pytest

from cardpipe.catalog import builtin_catalog
from cardpipe.datasets import DatasetManifest, default_registry
from cardpipe.engine import Env

REPO_ROOT = Path(__file__).resolve().parents[1]
DATA_DIR = REPO_ROOT / "src" / "cardpipe" / "data"
PIPELINES_DIR = DATA_DIR / "pipelines"
DATASETS_DIR = DATA_DIR / "datasets"

FOREST_URL = "https://data.cardpipe.example/datasets/forest_area.csv"


@pytest.fixture(scope="session")
def catalog():
    return builtin_catalog()


@pytest.fixture(scope="session")
def registry():
    return default_registry()


@pytest.fixture()
def env(catalog, registry):
    return Env(catalog=catalog, registry=registry)


def _free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


class _FixtureHandler(BaseHTTPRequestHandler):
    """Tiny HTTP server for fetch tests: ok, 404, 500, slow, oversized."""

    def do_GET(self):
        if self.path == "/ok.csv":
            body = b"a,b\r\n1,x\r\n2,y\r\n"
            self.send_response(200)
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)
        elif self.path == "/big.csv":
            body = b"a\r\n" + b"1\r\n" * 4096
            self.send_response(200)
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)
        elif self.path == "/slow.csv":
            time.sleep(3)
            self.send_response(200)
            self.end_headers()
        elif self.path == "/boom.csv":
            self.send_response(500)
            self.end_headers()
        else:
            self.send_response(404)
            self.end_headers()

    def log_message(self, *args):
        pass


@pytest.fixture(scope="session")
def tiny_http_server():
    server = ThreadingHTTPServer(("127.0.0.1", 0), _FixtureHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_address[1]}"
    server.shutdown()
    thread.join(timeout=5)


@pytest.fixture(scope="session")
def live_server(tmp_path_factory):
    """A real uvicorn instance over a socket, as the API contract requires."""
    import uvicorn

    from cardpipe.server import create_app

    registry = default_registry()
    # an external dataset whose upstream is unreachable, to exercise 500
    registry.register_url(
        "external_broken",
        "http://127.0.0.1:9/broken.csv",
        DatasetManifest(
            id="external_broken",
            title="Broken external",
            description="Upstream that never answers.",
            schema=(("a", "INTEGER"),),
            source_note="test fixture",
        ),
    )
    data_dir = tmp_path_factory.mktemp("server-data")
    app = create_app(registry=registry, data_dir=data_dir)
    port = _free_port()
    config = uvicorn.Config(app, host="127.0.0.1", port=port, log_level="warning")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 10
    while not server.started:
        if time.time() > deadline:
            raise RuntimeError("server did not start")
        time.sleep(0.02)
    yield f"http://127.0.0.1:{port}"
    server.should_exit = True
    thread.join(timeout=5)
