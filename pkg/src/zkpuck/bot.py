"""Headless bot clients and the paired-match driver.

A bot is a plain TCP client that refuses to speak until the server's
quote verifies. The pair driver runs two bots in one process, plays a
scripted or seeded-random match to completion, and writes a transcript
of every plaintext application message each side sent or received. The
transcript is the ground truth integration tests assert against.
"""

from __future__ import annotations

import asyncio
import dataclasses
import json
import random
from pathlib import Path

from . import channel, protocol
from .channel import C2S, MSG_FRAME, S2C, Frame, ServerAttest
from .enclave import TrustStore
from .errors import HandshakeAborted, ProtocolError, ZkpuckError
from .protocol import (
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
    ZERO_TAG,
    CreateMatch,
)
from .shufflepuck import (
    ANGLE_MAX_DDEG,
    FORCE_MAX,
    FORCE_MIN,
    TABLE_WIDTH,
    Phase,
    Player,
)


class BotError(ZkpuckError):
    """Server answered something the bot's state machine cannot accept."""


def _jsonable(msg) -> dict:
    fields = {}
    for k, v in dataclasses.asdict(msg).items():
        if isinstance(v, bytes):
            v = v.hex()
        elif isinstance(v, Phase):
            v = v.value
        elif isinstance(v, Player):
            v = v.name
        elif isinstance(v, tuple):
            v = [
                [x.hex() if isinstance(x, bytes) else x for x in row]
                if isinstance(row, tuple)
                else row
                for row in v
            ]
        fields[k] = v
    return {"type": type(msg).__name__, "fields": fields}


class BotClient:
    """One attested session; records every app plaintext both ways."""

    def __init__(self, host: str, port: int, store: TrustStore, name: str):
        self.host = host
        self.port = port
        self.store = store
        self.name = name
        self.reader = None
        self.writer = None
        self.keys = None
        self.transcript: list[dict] = []
        self.pseudonym: bytes | None = None
        self.slot: Player | None = None

    async def connect(self) -> None:
        self.reader, self.writer = await asyncio.open_connection(self.host, self.port)
        hs = channel.ClientHandshake()
        self.writer.write(
            channel.encode_wire(channel.MSG_CLIENT_HELLO, hs.hello.encode())
        )
        await self.writer.drain()
        msg_type, payload = await channel.read_wire(self.reader)
        if msg_type != channel.MSG_SERVER_ATTEST:
            raise HandshakeAborted(ProtocolError(f"expected attest, got {msg_type}"))
        attest = ServerAttest.decode(payload)
        self.keys = hs.finish(attest, self.store)

    async def send_app(self, msg) -> None:
        self.transcript.append({"dir": "send", "hex": msg.encode().hex(), **_jsonable(msg)})
        frame = channel.seal(self.keys, C2S, msg.encode())
        self.writer.write(channel.encode_wire(MSG_FRAME, frame.encode()))
        await self.writer.drain()

    async def recv_app(self):
        msg_type, payload = await channel.read_wire(self.reader)
        if msg_type != MSG_FRAME:
            raise BotError(f"expected a sealed frame, got type 0x{msg_type:02x}")
        plaintext = channel.open_frame(self.keys, S2C, Frame.decode(payload))
        msg = protocol.decode_from_server(plaintext)
        self.transcript.append({"dir": "recv", "hex": plaintext.hex(), **_jsonable(msg)})
        return msg

    async def expect(self, kind):
        msg = await self.recv_app()
        if isinstance(msg, ErrorMsg):
            raise BotError(f"{self.name}: server error {msg.code}: {msg.message}")
        if not isinstance(msg, kind):
            raise BotError(f"{self.name}: expected {kind.__name__}, got {type(msg).__name__}")
        return msg

    async def login(self, identity: bytes) -> bytes:
        await self.send_app(Login(identity=identity))
        reply = await self.expect(LoginOk)
        self.pseudonym = reply.pseudonym
        return reply.pseudonym

    def close(self) -> None:
        if self.writer is not None:
            self.writer.close()


# --- move scripts ---------------------------------------------------------------

class MoveScript:
    """One (defense, shot) pair per turn; cycles when exhausted."""

    def __init__(self, moves: list[dict]):
        if not moves:
            raise ValueError("script has no moves")
        self.moves = moves
        self.i = 0

    @classmethod
    def load(cls, spec: str) -> "MoveScript":
        if spec.startswith("random:"):
            return RandomScript(int(spec.split(":", 1)[1]))
        return cls(json.loads(Path(spec).read_text()))

    def next_move(self) -> tuple[int, int, int]:
        move = self.moves[self.i % len(self.moves)]
        self.i += 1
        return (
            int(move["defense"]),
            int(move["shot"]["angle"]),
            int(move["shot"]["force"]),
        )


class RandomScript(MoveScript):
    def __init__(self, seed: int):
        self.rng = random.Random(seed)
        self.i = 0

    def next_move(self) -> tuple[int, int, int]:
        self.i += 1
        return (
            self.rng.randrange(0, TABLE_WIDTH + 1),
            self.rng.randrange(-ANGLE_MAX_DDEG, ANGLE_MAX_DDEG + 1),
            self.rng.randrange(FORCE_MIN, FORCE_MAX + 1),
        )


@dataclasses.dataclass
class PairResult:
    winner: str
    scores: tuple[int, int]
    shots_played: int
    pseudonyms: dict[str, str]


async def run_pair(
    host: str,
    port: int,
    store: TrustStore,
    script: MoveScript,
    *,
    identity_a: bytes = b"bot-a",
    identity_b: bytes = b"bot-b",
    tag_a: bytes = ZERO_TAG,
    tag_b: bytes = ZERO_TAG,
    query_highscores: bool = False,
    max_turns: int = 500,
    transcript_path: str | Path | None = None,
) -> PairResult:
    """Play one full match to completion.

    The transcript file is written even when the match aborts, so a
    failed handshake leaves evidence that zero app messages were sent.
    """
    a = BotClient(host, port, store, "A")
    b = BotClient(host, port, store, "B")
    transcript_doc: dict = {"sessions": {}}
    try:
        await a.connect()
        await b.connect()
        await a.login(identity_a)
        await b.login(identity_b)

        await a.send_app(CreateMatch())
        created = await a.expect(MatchCreated)
        await b.send_app(JoinMatch(match_id=created.match_id))
        started_a = await a.expect(MatchStarted)
        started_b = await b.expect(MatchStarted)
        a.slot, b.slot = started_a.your_slot, started_b.your_slot
        if {a.slot, b.slot} != {Player.A, Player.B}:
            raise BotError("server assigned overlapping slots")
        by_slot = {a.slot: a, b.slot: b}
        shooter = started_a.first_shooter

        outcome = None
        turns = 0
        for _ in range(max_turns):
            defense_x, angle, force = script.next_move()
            turns += 1
            defender_bot = by_slot[shooter.other]
            shooter_bot = by_slot[shooter]
            tag = tag_a if defender_bot is a else tag_b
            await defender_bot.send_app(DefenseMsg(paddle_x=defense_x, tag=tag))
            await a.expect(DefenseCommitted)
            await b.expect(DefenseCommitted)
            tag = tag_a if shooter_bot is a else tag_b
            await shooter_bot.send_app(ShotMsg(angle_ddeg=angle, force=force, tag=tag))
            out_a = await a.expect(OutcomeMsg)
            out_b = await b.expect(OutcomeMsg)
            if out_a != out_b:
                raise BotError("players saw different outcomes")
            outcome = out_a
            if outcome.phase is Phase.FINISHED:
                break
            shooter = outcome.next_shooter
        if outcome is None or outcome.phase is not Phase.FINISHED:
            raise BotError(f"match still running after {max_turns} turns")

        if query_highscores:
            await a.send_app(HighScoreQuery())
            await a.expect(HighScoreReply)

        result = PairResult(
            winner=outcome.winner.name,
            scores=(outcome.score_a, outcome.score_b),
            shots_played=turns,
            pseudonyms={"A": a.pseudonym.hex(), "B": b.pseudonym.hex()},
        )
        transcript_doc.update(
            winner=result.winner,
            final_scores=list(result.scores),
            shots_played=turns,
            pseudonyms=result.pseudonyms,
        )
        return result
    finally:
        transcript_doc["sessions"] = {"A": a.transcript, "B": b.transcript}
        if transcript_path is not None:
            Path(transcript_path).write_text(json.dumps(transcript_doc, indent=2) + "\n")
        a.close()
        b.close()
