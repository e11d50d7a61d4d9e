"""Operator and auditor command line.

Exit codes are a stable contract for CI:
    0  success / clean
    1  findings (lint hits, canary hits, broken chain link)
    2  usage or IO errors (missing files, malformed JSON, truncated chain)
    3  attestation failure (bot refused the server)
"""

from __future__ import annotations

import asyncio
import json
import sys
from pathlib import Path

import click

from . import bot as botlib
from .enclave import TrustStore, load_manifest, measure
from .errors import (
    AttestationError,
    ChainFileError,
    HandshakeAborted,
    InvalidManifest,
    LintRefusal,
    MalformedGraph,
    ZkpuckError,
)
from .policy import check_flows, format_findings, load_graph, verify_chain_file
from .server import ServerConfig, run_server


def _fail(code: int, message: str) -> None:
    click.echo(message, err=True)
    sys.exit(code)


@click.group()
def main() -> None:
    """Attested game platform tooling."""


@main.command("measure")
@click.argument("manifest_path", type=click.Path(path_type=Path))
def cmd_measure(manifest_path: Path) -> None:
    """Print the hex measurement of a component manifest."""
    try:
        manifest = load_manifest(manifest_path)
    except (OSError, InvalidManifest) as exc:
        _fail(2, f"cannot measure {manifest_path}: {exc}")
    click.echo(measure(manifest).hex)


@main.command("lint")
@click.argument("graph_path", type=click.Path(path_type=Path))
@click.option("--k-min", default=5, show_default=True, help="minimum k for AggregateK")
def cmd_lint(graph_path: Path, k_min: int) -> None:
    """Check a component graph; one finding per line, exit 1 if any."""
    try:
        graph = load_graph(graph_path)
    except (OSError, MalformedGraph, InvalidManifest) as exc:
        _fail(2, f"cannot lint {graph_path}: {exc}")
    findings = check_flows(graph, k_min=k_min)
    if findings:
        click.echo(format_findings(findings))
        sys.exit(1)


@main.command("verify-audit")
@click.argument("chain_path", type=click.Path(path_type=Path))
def cmd_verify_audit(chain_path: Path) -> None:
    """Verify an audit chain file; prints ok or the first bad index."""
    try:
        bad = verify_chain_file(chain_path)
    except (OSError, ChainFileError) as exc:
        _fail(2, f"cannot verify {chain_path}: {exc}")
    if bad is None:
        click.echo("ok")
    else:
        click.echo(f"bad record at index {bad}")
        sys.exit(1)


def _load_canaries(path: Path) -> list[tuple[str, bytes]]:
    """One canary per line: `hex:<bytes>` or a literal UTF-8 string."""
    canaries = []
    for line in path.read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("hex:"):
            canaries.append((line, bytes.fromhex(line[4:])))
        else:
            canaries.append((line, line.encode("utf-8")))
    return canaries


def _find_all(haystack: bytes, needle: bytes):
    off = haystack.find(needle)
    while off != -1:
        yield off
        off = haystack.find(needle, off + 1)


@main.command("canary-scan")
@click.argument("capture_dir", type=click.Path(path_type=Path))
@click.argument("canary_list", type=click.Path(path_type=Path))
def cmd_canary_scan(capture_dir: Path, canary_list: Path) -> None:
    """Scan captured egress bytes for canary values.

    Files ending in .cipher are session-addressed ciphertext and are
    skipped; everything else in the directory tree is fair game.
    Each hit prints as `file<TAB>offset<TAB>canary`.
    """
    try:
        canaries = _load_canaries(canary_list)
        files = sorted(
            p for p in capture_dir.rglob("*") if p.is_file() and p.suffix != ".cipher"
        )
        hits = []
        for path in files:
            data = path.read_bytes()
            rel = path.relative_to(capture_dir).as_posix()
            for display, needle in canaries:
                for off in _find_all(data, needle):
                    hits.append((rel, off, display))
    except (OSError, ValueError) as exc:
        _fail(2, f"cannot scan {capture_dir}: {exc}")
    for rel, off, display in sorted(hits):
        click.echo(f"{rel}\t{off}\t{display}")
    if hits:
        sys.exit(1)


@main.command("bot")
@click.argument("server_addr")
@click.option("--trust-store", "store_path", required=True, type=click.Path(path_type=Path))
@click.option("--script", "script_spec", required=True,
              help="path to a JSON move list, or random:<seed>")
@click.option("--transcript", "transcript_path", type=click.Path(path_type=Path))
@click.option("--identity-a", default="bot-a", show_default=True)
@click.option("--identity-b", default="bot-b", show_default=True)
@click.option("--tag-a", default="", help="8-byte hex tag on A's raw inputs")
@click.option("--tag-b", default="", help="8-byte hex tag on B's raw inputs")
@click.option("--query-highscores", is_flag=True, default=False)
def cmd_bot(
    server_addr: str,
    store_path: Path,
    script_spec: str,
    transcript_path: Path | None,
    identity_a: str,
    identity_b: str,
    tag_a: str,
    tag_b: str,
    query_highscores: bool,
) -> None:
    """Run two paired bots through one full match against a server."""
    try:
        host, _, port_s = server_addr.rpartition(":")
        port = int(port_s)
        store = TrustStore.load(store_path)
        script = botlib.MoveScript.load(script_spec)
        tag_a_b = bytes.fromhex(tag_a) if tag_a else botlib.protocol.ZERO_TAG
        tag_b_b = bytes.fromhex(tag_b) if tag_b else botlib.protocol.ZERO_TAG
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        _fail(2, f"bad bot invocation: {exc}")
    try:
        result = asyncio.run(
            botlib.run_pair(
                host,
                port,
                store,
                script,
                identity_a=identity_a.encode(),
                identity_b=identity_b.encode(),
                tag_a=tag_a_b,
                tag_b=tag_b_b,
                query_highscores=query_highscores,
                transcript_path=transcript_path,
            )
        )
    except (HandshakeAborted, AttestationError) as exc:
        _fail(3, f"attestation failure: {exc}")
    except (ConnectionError, OSError, asyncio.IncompleteReadError) as exc:
        _fail(2, f"connection failed: {exc}")
    except ZkpuckError as exc:
        _fail(2, f"match aborted: {exc}")
    click.echo(
        f"winner {result.winner} ({result.scores[0]}-{result.scores[1]}) "
        f"in {result.shots_played} shots"
    )


@main.command("serve")
@click.option("--config", "config_path", required=True, type=click.Path(path_type=Path))
def cmd_serve(config_path: Path) -> None:
    """Run the game server until interrupted."""
    try:
        config = ServerConfig.load(config_path)
    except (OSError, ValueError, KeyError) as exc:
        _fail(2, f"cannot load config {config_path}: {exc}")
    try:
        asyncio.run(run_server(config))
    except LintRefusal as exc:
        click.echo(format_findings(exc.findings), err=True)
        _fail(1, "refusing to boot: manifest lints dirty")
    except (OSError, InvalidManifest) as exc:
        _fail(2, f"cannot start server: {exc}")
    except KeyboardInterrupt:
        pass


if __name__ == "__main__":
    main()
