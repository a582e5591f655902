from __future__ import annotations

import math
import socket
import threading
import time

import pytest

from coevo.challenges import ChallengeId, default_specs
from coevo.shapes import BrickChain

H = math.pi / 2
T = math.pi / 6


@pytest.fixture(scope="session")
def specs():
    return default_specs()


@pytest.fixture(scope="session")
def bowl():
    """8 bricks: two down, four across, two up; the classic catcher."""
    return BrickChain(angles=(-H, 0.0, H, 0.0, 0.0, 0.0, H, 0.0))


@pytest.fixture(scope="session")
def bar8():
    return BrickChain(angles=(0.0,) * 8)


@pytest.fixture(scope="session")
def ring12():
    """Closed regular 12-gon chain; rolls."""
    return BrickChain(angles=(T,) * 12)


@pytest.fixture(scope="session")
def bar12():
    return BrickChain(angles=(0.0,) * 12)


@pytest.fixture(scope="session")
def blade():
    """Straight chain standing on its tip."""
    return BrickChain(angles=(H,) + (0.0,) * 7)


@pytest.fixture(scope="session")
def wall():
    return BrickChain(angles=(H,) + (0.0,) * 7)


def free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


@pytest.fixture(scope="session")
def live_server(tmp_path_factory):
    """Real uvicorn instance on a local socket; the API contract target."""
    import httpx
    import uvicorn

    from coevo.api import create_app

    data_dir = tmp_path_factory.mktemp("api-data")
    port = free_port()
    app = create_app(data_dir)
    config = uvicorn.Config(app, host="127.0.0.1", port=port, log_level="error")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    base = f"http://127.0.0.1:{port}"
    deadline = time.time() + 15
    while time.time() < deadline:
        try:
            httpx.get(base + "/v1/challenges", timeout=1.0)
            break
        except Exception:
            time.sleep(0.05)
    else:
        raise RuntimeError("server did not start")
    yield base
    server.should_exit = True
    thread.join(timeout=5)
