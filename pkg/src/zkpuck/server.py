"""The measured game service.

Sessions come in over attested channels (raw TCP or WebSocket), matches
run in memory, and the only bytes that ever leave through a side door
are writes to declared egress sinks, each mirrored into the audit chain
before the payload touches its file. Raw identities exist only inside
the login handler; raw shot and defense values exist only until the
outcome is resolved.

The server refuses to boot if its own manifest fails the flow lint.

A deliberately unsafe debug-log switch (config `unsafe_debug_log`)
writes raw inputs to a plain file. It exists so the canary scanner has
a true positive to catch in tests; never enable it outside a harness.
"""

from __future__ import annotations

import asyncio
import base64
import hashlib
import json
import os
import random
import struct
from dataclasses import dataclass
from pathlib import Path

from . import channel, protocol, suite
from .channel import (
    C2S,
    MSG_CLIENT_HELLO,
    MSG_FRAME,
    S2C,
    ClientHello,
    Frame,
    SessionKeys,
)
from .enclave import (
    ComponentManifest,
    PlatformKey,
    load_manifest,
    load_platform_key,
    measure,
)
from .errors import (
    ChannelError,
    EmptyIdentity,
    LintRefusal,
    MatchFull,
    NotLoggedIn,
    OutOfRange,
    ProtocolError,
    UnknownMatch,
    WrongPhase,
    WrongRole,
)
from .policy import (
    AuditChain,
    AuditRecord,
    ComponentGraph,
    Withheld,
    aggregate_k,
    check_flows,
    pseudonymize,
)
from .protocol import (
    CreateMatch,
    DefenseCommitted,
    DefenseMsg,
    ErrorMsg,
    HighScoreQuery,
    HighScoreReply,
    JoinMatch,
    Login,
    LoginOk,
    MatchCreated,
    MatchStarted,
    OutcomeMsg,
    ShotMsg,
)
from .shufflepuck import (
    START_X,
    Defense,
    MatchState,
    Phase,
    Player,
    Shot,
    apply_outcome,
    commit_defense,
    resolve_shot,
)

HIGHSCORE_SINK = "highscore-publish"
MATCH_LOG_SINK = "match-log"


@dataclass
class ServerConfig:
    tcp_host: str
    tcp_port: int
    ws_host: str | None
    ws_port: int | None
    k_min: int
    manifest_path: Path
    platform_key_path: Path
    sink_dir: Path
    pseudonym_key: bytes
    top_n: int = 10
    capture_dir: Path | None = None
    unsafe_debug_log: bool = False

    @classmethod
    def load(cls, path: str | Path) -> "ServerConfig":
        path = Path(path)
        obj = json.loads(path.read_text())
        base = path.parent

        def resolve(p: str) -> Path:
            q = Path(p)
            return q if q.is_absolute() else base / q

        tcp_host, tcp_port = _split_addr(obj["tcp"])
        ws_host = ws_port = None
        if obj.get("ws"):
            ws_host, ws_port = _split_addr(obj["ws"])
        key_hex = obj.get("pseudonym_key")
        pseudonym_key = bytes.fromhex(key_hex) if key_hex else os.urandom(32)
        if len(pseudonym_key) != suite.KEY_LEN:
            raise ValueError("pseudonym_key must be 32 bytes of hex")
        return cls(
            tcp_host=tcp_host,
            tcp_port=tcp_port,
            ws_host=ws_host,
            ws_port=ws_port,
            k_min=int(obj.get("k_min", 5)),
            manifest_path=resolve(obj["manifest"]),
            platform_key_path=resolve(obj["platform_key"]),
            sink_dir=resolve(obj["sink_dir"]),
            pseudonym_key=pseudonym_key,
            top_n=int(obj.get("top_n", 10)),
            capture_dir=resolve(obj["capture_dir"]) if obj.get("capture_dir") else None,
            unsafe_debug_log=bool(obj.get("unsafe_debug_log", False)),
        )


def _split_addr(addr: str) -> tuple[str, int]:
    host, _, port = addr.rpartition(":")
    return host, int(port)


class EgressSinks:
    """Append-only file per declared sink; the audit record lands first.

    Writing to an undeclared sink id is a programming error and raises.
    """

    def __init__(
        self,
        manifest: ComponentManifest,
        sink_dir: Path,
        capture_dir: Path | None = None,
    ):
        self.decls = {s.sink_id: s for s in manifest.egress_sinks}
        self.sink_dir = sink_dir
        self.capture_dir = capture_dir
        sink_dir.mkdir(parents=True, exist_ok=True)
        if capture_dir is not None:
            capture_dir.mkdir(parents=True, exist_ok=True)
        self.chain_path = sink_dir / "audit.chain"
        if self.chain_path.exists():
            self.chain = AuditChain.read_file(self.chain_path)
        else:
            self.chain = AuditChain()
            self.chain.write_file(self.chain_path)

    def write(self, sink_id: str, payload: bytes) -> AuditRecord:
        decl = self.decls[sink_id]
        record = self.chain.append(sink_id, decl.label, payload)
        self.chain.write_file(self.chain_path)
        with open(self.sink_dir / f"{sink_id}.bin", "ab") as f:
            f.write(payload)
        self._capture(f"{sink_id}.bin", payload)
        return record

    def _capture(self, name: str, data: bytes) -> None:
        if self.capture_dir is not None:
            with open(self.capture_dir / name, "ab") as f:
                f.write(data)


# --- transports ----------------------------------------------------------------

class TcpTransport:
    """One wire message per call over a plain TCP stream."""

    def __init__(self, reader, writer, capture=None):
        self.reader = reader
        self.writer = writer
        self.capture = capture  # callable (suffix, bytes) or None

    async def recv(self) -> tuple[int, bytes]:
        msg_type, payload = await channel.read_wire(self.reader)
        if self.capture:
            self.capture("ingress", channel.encode_wire(msg_type, payload))
        return msg_type, payload

    def send(self, msg_type: int, payload: bytes) -> None:
        data = channel.encode_wire(msg_type, payload)
        if self.capture:
            self.capture("egress", data)
        self.writer.write(data)

    async def drain(self) -> None:
        await self.writer.drain()

    def close(self) -> None:
        try:
            self.writer.close()
        except Exception:
            pass


WS_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"
_WS_BINARY = 0x2
_WS_CLOSE = 0x8
_WS_PING = 0x9
_WS_PONG = 0xA


def ws_frame(opcode: int, payload: bytes, mask: bool = False) -> bytes:
    """Build one frame. Servers send unmasked; clients must set mask."""
    b0 = 0x80 | opcode
    flag = 0x80 if mask else 0
    n = len(payload)
    if n < 126:
        header = bytes([b0, flag | n])
    elif n < 1 << 16:
        header = bytes([b0, flag | 126]) + struct.pack(">H", n)
    else:
        header = bytes([b0, flag | 127]) + struct.pack(">Q", n)
    if mask:
        key = os.urandom(4)
        return header + key + bytes(b ^ key[i & 3] for i, b in enumerate(payload))
    return header + payload


async def ws_read_frame(reader) -> tuple[bool, int, bytes]:
    hdr = await reader.readexactly(2)
    fin = bool(hdr[0] & 0x80)
    opcode = hdr[0] & 0x0F
    masked = bool(hdr[1] & 0x80)
    n = hdr[1] & 0x7F
    if n == 126:
        (n,) = struct.unpack(">H", await reader.readexactly(2))
    elif n == 127:
        (n,) = struct.unpack(">Q", await reader.readexactly(8))
    if n > channel.MAX_WIRE_LEN:
        raise ProtocolError(f"websocket frame of {n} bytes refused")
    mask = await reader.readexactly(4) if masked else b""
    payload = await reader.readexactly(n)
    if masked:
        payload = bytes(b ^ mask[i & 3] for i, b in enumerate(payload))
    return fin, opcode, payload


async def ws_accept(reader, writer) -> bool:
    """Upgrade one HTTP request or answer 400. Returns True when upgraded."""
    try:
        head = await reader.readuntil(b"\r\n\r\n")
    except (asyncio.IncompleteReadError, asyncio.LimitOverrunError):
        return False
    lines = head.decode("latin-1").split("\r\n")
    headers: dict[str, str] = {}
    for line in lines[1:]:
        if ":" in line:
            k, v = line.split(":", 1)
            headers[k.strip().lower()] = v.strip()
    key = headers.get("sec-websocket-key")
    upgrade_ok = (
        lines[0].startswith("GET ")
        and "websocket" in headers.get("upgrade", "").lower()
        and key is not None
    )
    if not upgrade_ok:
        writer.write(
            b"HTTP/1.1 400 Bad Request\r\nConnection: close\r\n"
            b"Content-Length: 0\r\n\r\n"
        )
        await writer.drain()
        return False
    # sha1 is what the upgrade handshake demands; it is not part of the
    # session crypto suite.
    digest = hashlib.sha1((key + WS_GUID).encode("ascii")).digest()
    accept = base64.b64encode(digest).decode("ascii")
    writer.write(
        (
            "HTTP/1.1 101 Switching Protocols\r\n"
            "Upgrade: websocket\r\n"
            "Connection: Upgrade\r\n"
            f"Sec-WebSocket-Accept: {accept}\r\n\r\n"
        ).encode("ascii")
    )
    await writer.drain()
    return True


class WsTransport:
    """One protocol message per binary WebSocket frame."""

    def __init__(self, reader, writer, capture=None):
        self.reader = reader
        self.writer = writer
        self.capture = capture

    async def recv(self) -> tuple[int, bytes]:
        while True:
            fin, opcode, payload = await ws_read_frame(self.reader)
            if opcode == _WS_PING:
                self.writer.write(ws_frame(_WS_PONG, payload))
                continue
            if opcode == _WS_PONG:
                continue
            if opcode == _WS_CLOSE:
                self.writer.write(ws_frame(_WS_CLOSE, b""))
                raise ConnectionResetError("websocket closed")
            if opcode != _WS_BINARY or not fin:
                raise ProtocolError("expected a single binary websocket frame")
            if self.capture:
                self.capture("ingress", payload)
            msg_type, body, rest = channel.decode_wire(payload)
            if rest:
                raise ProtocolError("websocket frame holds more than one message")
            return msg_type, body

    def send(self, msg_type: int, payload: bytes) -> None:
        data = channel.encode_wire(msg_type, payload)
        if self.capture:
            self.capture("egress", data)
        self.writer.write(ws_frame(_WS_BINARY, data))

    async def drain(self) -> None:
        await self.writer.drain()

    def close(self) -> None:
        try:
            self.writer.write(ws_frame(_WS_CLOSE, b""))
            self.writer.close()
        except Exception:
            pass


# --- sessions and rooms ----------------------------------------------------------

class Session:
    def __init__(self, sid: int, transport, keys: SessionKeys):
        self.sid = sid
        self.transport = transport
        self.keys = keys
        self.pseudonym: bytes | None = None
        self.match_id: bytes | None = None
        self.slot: Player | None = None

    def send_app(self, msg) -> None:
        # seal + buffer happen with no await in between, so frames from
        # concurrent room broadcasts cannot interleave mid-message.
        frame = channel.seal(self.keys, S2C, msg.encode())
        try:
            self.transport.send(MSG_FRAME, frame.encode())
        except (ConnectionError, OSError):
            pass


class MatchRoom:
    def __init__(self, match_id: bytes, creator: Session):
        self.match_id = match_id
        self.slots: list[Session | None] = [creator, None]
        self.state: MatchState | None = None
        self.pending_defense: Defense | None = None
        self.lock = asyncio.Lock()

    def broadcast(self, msg) -> None:
        for s in self.slots:
            if s is not None:
                s.send_app(msg)


_APP_ERROR_CODES: list[tuple[type, int]] = [
    (EmptyIdentity, protocol.ERR_EMPTY_IDENTITY),
    (NotLoggedIn, protocol.ERR_NOT_LOGGED_IN),
    (UnknownMatch, protocol.ERR_UNKNOWN_MATCH),
    (MatchFull, protocol.ERR_MATCH_FULL),
    (WrongPhase, protocol.ERR_WRONG_PHASE),
    (WrongRole, protocol.ERR_WRONG_ROLE),
    (OutOfRange, protocol.ERR_OUT_OF_RANGE),
]


class ServerApp:
    """All mutable service state; one instance per process."""

    def __init__(self, config: ServerConfig):
        self.config = config
        self.manifest = load_manifest(config.manifest_path)
        self.platform_key = load_platform_key(config.platform_key_path)
        findings = check_flows(
            ComponentGraph(nodes=(self.manifest,), edges=()), k_min=config.k_min
        )
        if findings:
            raise LintRefusal(findings)
        self.sinks = EgressSinks(self.manifest, config.sink_dir, config.capture_dir)
        self.sessions: dict[int, Session] = {}
        self.rooms: dict[bytes, MatchRoom] = {}
        self.highscores: dict[bytes, int] = {}
        self._next_sid = 0
        self._servers: list[asyncio.base_events.Server] = []
        self.tcp_addr: tuple[str, int] | None = None
        self.ws_addr: tuple[str, int] | None = None

    @property
    def measurement_hex(self) -> str:
        return measure(self.manifest).hex

    # -- lifecycle --

    async def start(self) -> None:
        tcp = await asyncio.start_server(
            self._on_tcp, self.config.tcp_host, self.config.tcp_port
        )
        self._servers.append(tcp)
        self.tcp_addr = tcp.sockets[0].getsockname()[:2]
        if self.config.ws_host is not None:
            ws = await asyncio.start_server(
                self._on_ws, self.config.ws_host, self.config.ws_port
            )
            self._servers.append(ws)
            self.ws_addr = ws.sockets[0].getsockname()[:2]

    async def serve_forever(self) -> None:
        await asyncio.gather(*(s.serve_forever() for s in self._servers))

    async def stop(self) -> None:
        for s in self._servers:
            s.close()
            await s.wait_closed()
        for session in list(self.sessions.values()):
            session.transport.close()

    # -- connection plumbing --

    def _capture_for(self, sid: int):
        cap_dir = self.config.capture_dir
        if cap_dir is None:
            return None

        def capture(suffix: str, data: bytes) -> None:
            # .cipher marks session-addressed bytes: AEAD frames plus the
            # handshake. The canary scanner skips these by pattern.
            with open(cap_dir / f"session-{sid}.{suffix}.cipher", "ab") as f:
                f.write(data)

        return capture

    async def _on_tcp(self, reader, writer) -> None:
        sid = self._next_sid
        self._next_sid += 1
        await self._run_session(sid, TcpTransport(reader, writer, self._capture_for(sid)))

    async def _on_ws(self, reader, writer) -> None:
        if not await ws_accept(reader, writer):
            writer.close()
            return
        sid = self._next_sid
        self._next_sid += 1
        await self._run_session(sid, WsTransport(reader, writer, self._capture_for(sid)))

    async def _run_session(self, sid: int, transport) -> None:
        try:
            msg_type, payload = await transport.recv()
            if msg_type != MSG_CLIENT_HELLO:
                transport.close()
                return
            hello = ClientHello.decode(payload)
            attest, keys = channel.server_respond(hello, self.manifest, self.platform_key)
            transport.send(channel.MSG_SERVER_ATTEST, attest.encode())
            await transport.drain()
        except (ProtocolError, ConnectionError, OSError, asyncio.IncompleteReadError):
            transport.close()
            return

        session = Session(sid, transport, keys)
        self.sessions[sid] = session
        try:
            while True:
                msg_type, payload = await transport.recv()
                if msg_type != MSG_FRAME:
                    raise ProtocolError(f"unexpected wire type 0x{msg_type:02x}")
                plaintext = channel.open_frame(keys, C2S, Frame.decode(payload))
                msg = protocol.decode_from_client(plaintext)
                await self._dispatch(session, msg)
                await transport.drain()
        except (ConnectionError, OSError, asyncio.IncompleteReadError):
            pass
        except ChannelError:
            # tampered or replayed frame: the channel is unusable, drop it
            pass
        except ProtocolError as exc:
            session.send_app(ErrorMsg(protocol.ERR_PROTOCOL, str(exc)))
        finally:
            await self._drop_session(session)
            transport.close()

    async def _drop_session(self, session: Session) -> None:
        self.sessions.pop(session.sid, None)
        room = self.rooms.get(session.match_id) if session.match_id else None
        if room is not None:
            async with room.lock:
                self.rooms.pop(room.match_id, None)
                for other in room.slots:
                    if other is not None and other is not session:
                        other.match_id = None
                        other.slot = None
                        other.send_app(
                            ErrorMsg(protocol.ERR_OPPONENT_GONE, "opponent disconnected")
                        )

    # -- message dispatch --

    async def _dispatch(self, session: Session, msg) -> None:
        try:
            if isinstance(msg, Login):
                self._handle_login(session, msg)
            elif isinstance(msg, CreateMatch):
                self._handle_create(session)
            elif isinstance(msg, JoinMatch):
                await self._handle_join(session, msg)
            elif isinstance(msg, DefenseMsg):
                await self._handle_defense(session, msg)
            elif isinstance(msg, ShotMsg):
                await self._handle_shot(session, msg)
            elif isinstance(msg, HighScoreQuery):
                self._handle_highscores(session)
            else:
                raise ProtocolError("unhandled message")
        except tuple(t for t, _ in _APP_ERROR_CODES) as exc:
            code = next(c for t, c in _APP_ERROR_CODES if isinstance(exc, t))
            session.send_app(ErrorMsg(code, str(exc)))

    def _require_login(self, session: Session) -> bytes:
        if session.pseudonym is None:
            raise NotLoggedIn("log in first")
        return session.pseudonym

    def _handle_login(self, session: Session, msg: Login) -> None:
        if self.config.unsafe_debug_log:
            self._debug_log(b"login identity=" + msg.identity + b"\n")
        pseudonym = pseudonymize(msg.identity, self.config.pseudonym_key)
        # msg.identity is not referenced beyond this point; only the
        # keyed hash survives in any server-side structure.
        session.pseudonym = pseudonym
        session.send_app(LoginOk(pseudonym=pseudonym))

    def _handle_create(self, session: Session) -> None:
        self._require_login(session)
        if session.match_id is not None:
            raise WrongPhase("already in a match")
        match_id = os.urandom(8)
        while match_id in self.rooms:
            match_id = os.urandom(8)
        room = MatchRoom(match_id, session)
        self.rooms[match_id] = room
        session.match_id = match_id
        session.slot = Player.A
        session.send_app(MatchCreated(match_id=match_id))

    async def _handle_join(self, session: Session, msg: JoinMatch) -> None:
        self._require_login(session)
        if session.match_id is not None:
            raise WrongPhase("already in a match")
        room = self.rooms.get(msg.match_id)
        if room is None:
            raise UnknownMatch(f"no match {msg.match_id.hex()}")
        async with room.lock:
            if room.slots[1] is not None:
                raise MatchFull(f"match {msg.match_id.hex()} already has two players")
            room.slots[1] = session
            session.match_id = msg.match_id
            session.slot = Player.B
            # Seeding from the match id keeps replays reproducible; the
            # seed line goes out at Aggregate so auditors can check it.
            seed = int.from_bytes(suite.hash256(msg.match_id)[:8], "little")
            first = Player(random.Random(seed).randrange(2))
            room.state = MatchState.initial(first)
            self.sinks.write(
                MATCH_LOG_SINK,
                f"match={msg.match_id.hex()} seed={seed} "
                f"first_shooter={first.name}\n".encode(),
            )
            for s in room.slots:
                if s is not None:
                    s.send_app(
                        MatchStarted(
                            match_id=msg.match_id,
                            your_slot=s.slot,
                            first_shooter=first,
                        )
                    )

    def _room_for(self, session: Session) -> MatchRoom:
        self._require_login(session)
        room = self.rooms.get(session.match_id) if session.match_id else None
        if room is None:
            raise UnknownMatch("not in a running match")
        return room

    async def _handle_defense(self, session: Session, msg: DefenseMsg) -> None:
        room = self._room_for(session)
        async with room.lock:
            state = room.state
            if state is None or state.phase is not Phase.AWAIT_DEFENSE:
                raise WrongPhase("no defense expected now")
            if session.slot is not state.defender:
                raise WrongRole("only the defender may commit a defense")
            if self.config.unsafe_debug_log:
                self._debug_log(
                    b"defense tag=" + msg.tag
                    + f" paddle_x={msg.paddle_x}\n".encode()
                )
            room.pending_defense = Defense(paddle_x=msg.paddle_x)
            room.state = commit_defense(state)
            room.broadcast(DefenseCommitted())

    async def _handle_shot(self, session: Session, msg: ShotMsg) -> None:
        room = self._room_for(session)
        async with room.lock:
            state = room.state
            if state is None or state.phase is not Phase.AWAIT_SHOT:
                raise WrongPhase("no shot expected now")
            if session.slot is not state.shooter:
                raise WrongRole("only the shooter may shoot")
            if self.config.unsafe_debug_log:
                self._debug_log(
                    b"shot tag=" + msg.tag
                    + f" angle={msg.angle_ddeg} force={msg.force}\n".encode()
                )
            shot = Shot(angle_ddeg=msg.angle_ddeg, force=msg.force)
            outcome = resolve_shot(START_X, shot, room.pending_defense)
            # Raw inputs are dropped here; only the outcome and the new
            # state survive.
            room.pending_defense = None
            room.state = apply_outcome(state, outcome)
            room.broadcast(OutcomeMsg.from_state(outcome, room.state))
            if room.state.phase is Phase.FINISHED:
                self._finish_match(room)

    def _finish_match(self, room: MatchRoom) -> None:
        state = room.state
        for slot, s in zip((Player.A, Player.B), room.slots):
            if s is not None and s.pseudonym is not None:
                self.highscores[s.pseudonym] = (
                    self.highscores.get(s.pseudonym, 0) + state.scores[slot]
                )
                s.match_id = None
                s.slot = None
        self.rooms.pop(room.match_id, None)
        self.sinks.write(
            MATCH_LOG_SINK,
            f"match={room.match_id.hex()} finished winner={state.winner.name} "
            f"score={state.scores[0]}-{state.scores[1]} "
            f"shots={state.shots_played}\n".encode(),
        )

    def _handle_highscores(self, session: Session) -> None:
        self._require_login(session)
        result = aggregate_k(
            list(self.highscores.items()), k=self.config.k_min, top_n=self.config.top_n
        )
        if isinstance(result, Withheld):
            reply = HighScoreReply(withheld=True)
        else:
            reply = HighScoreReply(withheld=False, rows=result.rows)
        self.sinks.write(HIGHSCORE_SINK, reply.encode())
        session.send_app(reply)

    def _debug_log(self, data: bytes) -> None:
        target = self.config.capture_dir or self.config.sink_dir
        with open(target / "debug.log", "ab") as f:
            f.write(data)


async def run_server(config: ServerConfig) -> None:
    """Boot, print where we listen, serve until cancelled."""
    app = ServerApp(config)
    await app.start()
    print(f"measurement {app.measurement_hex}", flush=True)
    print(f"tcp listening on {app.tcp_addr[0]}:{app.tcp_addr[1]}", flush=True)
    if app.ws_addr is not None:
        print(f"ws listening on {app.ws_addr[0]}:{app.ws_addr[1]}", flush=True)
    try:
        await app.serve_forever()
    except asyncio.CancelledError:
        await app.stop()
        raise
