import asyncio
import json
import pathlib
import sys

import pytest

sys.path.insert(0, str(pathlib.Path(__file__).parent))

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> pathlib.Path:
    return FIXTURES


@pytest.fixture
def trust_store():
    from zkpuck.enclave import TrustStore

    return TrustStore.load(FIXTURES / "trust-store.json")


@pytest.fixture
def platform_key():
    from zkpuck.enclave import load_platform_key

    return load_platform_key(FIXTURES / "platform-key.json")


@pytest.fixture
def server_manifest():
    from zkpuck.enclave import load_manifest

    return load_manifest(FIXTURES / "server-manifest.json")


def run_async(coro):
    return asyncio.run(coro)


def make_server_config(tmp_path: pathlib.Path, **overrides) -> pathlib.Path:
    """Write a runnable server config into tmp_path and return its path."""
    cfg = {
        "tcp": "127.0.0.1:0",
        "ws": "127.0.0.1:0",
        "k_min": 5,
        "manifest": str(FIXTURES / "server-manifest.json"),
        "platform_key": str(FIXTURES / "platform-key.json"),
        "sink_dir": str(tmp_path / "sinks"),
        "pseudonym_key": "8c4b0f3a6d2e915c7a18b44f90de23a15f6c8d07b3e2a9415d60c78e1f2a3b4d",
        "top_n": 10,
    }
    cfg.update(overrides)
    path = tmp_path / "server-config.json"
    path.write_text(json.dumps(cfg, indent=2))
    return path


async def start_app(tmp_path: pathlib.Path, **overrides):
    """Boot an in-process ServerApp on ephemeral ports. Caller must stop() it."""
    from zkpuck.server import ServerApp, ServerConfig

    cfg_path = make_server_config(tmp_path, **overrides)
    app = ServerApp(ServerConfig.load(cfg_path))
    await app.start()
    return app
