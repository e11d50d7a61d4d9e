"""Application messages carried inside sealed channel frames.

Plaintext layout is [u8 app_type][payload]; each payload is a fixed
little-endian encoding with no optional fields except where a presence
byte says so. Some type codes are reused across directions (0x20 is both
the login request and its reply), so decoding is direction-aware:
`decode_from_client` for what a server reads, `decode_from_server` for
what a client reads.

Defense and Shot carry an 8-byte tag before their values. Production
clients send zeros; the test harness sends canary tags there so a leak
of raw inputs is detectable in captured egress bytes.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

from . import suite
from .errors import ProtocolError
from .shufflepuck import OutcomeKind, Phase, Player, ShotOutcome

APP_LOGIN = 0x20
APP_CREATE_MATCH = 0x21
APP_JOIN_MATCH = 0x22
APP_DEFENSE = 0x23
APP_SHOT = 0x24
APP_OUTCOME = 0x25
APP_HIGHSCORE_QUERY = 0x26
APP_HIGHSCORE_REPLY = 0x27
APP_ERROR = 0x2F

TAG_LEN = 8
ZERO_TAG = b"\x00" * TAG_LEN

# Error codes carried in 0x2F.
ERR_PROTOCOL = 1
ERR_EMPTY_IDENTITY = 2
ERR_NOT_LOGGED_IN = 3
ERR_UNKNOWN_MATCH = 4
ERR_MATCH_FULL = 5
ERR_WRONG_PHASE = 6
ERR_WRONG_ROLE = 7
ERR_OUT_OF_RANGE = 8
ERR_OPPONENT_GONE = 9

_PHASE_WIRE = {Phase.AWAIT_DEFENSE: 0, Phase.AWAIT_SHOT: 1, Phase.FINISHED: 2}
_WIRE_PHASE = {v: k for k, v in _PHASE_WIRE.items()}

NO_PLAYER = 0xFF


def _player_byte(p: Player | None) -> int:
    return NO_PLAYER if p is None else int(p)


def _byte_player(b: int) -> Player | None:
    if b == NO_PLAYER:
        return None
    if b not in (0, 1):
        raise ProtocolError(f"bad player byte {b}")
    return Player(b)


# --- client -> server ----------------------------------------------------------

@dataclass(frozen=True)
class Login:
    identity: bytes

    def encode(self) -> bytes:
        return bytes([APP_LOGIN]) + struct.pack("<I", len(self.identity)) + self.identity


@dataclass(frozen=True)
class CreateMatch:
    def encode(self) -> bytes:
        return bytes([APP_CREATE_MATCH])


@dataclass(frozen=True)
class JoinMatch:
    match_id: bytes

    def encode(self) -> bytes:
        return bytes([APP_JOIN_MATCH]) + self.match_id


@dataclass(frozen=True)
class DefenseMsg:
    paddle_x: int
    tag: bytes = ZERO_TAG

    def encode(self) -> bytes:
        return bytes([APP_DEFENSE]) + self.tag + struct.pack("<i", self.paddle_x)


@dataclass(frozen=True)
class ShotMsg:
    angle_ddeg: int
    force: int
    tag: bytes = ZERO_TAG

    def encode(self) -> bytes:
        return (
            bytes([APP_SHOT])
            + self.tag
            + struct.pack("<ii", self.angle_ddeg, self.force)
        )


@dataclass(frozen=True)
class HighScoreQuery:
    def encode(self) -> bytes:
        return bytes([APP_HIGHSCORE_QUERY])


# --- server -> client ----------------------------------------------------------

@dataclass(frozen=True)
class LoginOk:
    pseudonym: bytes

    def encode(self) -> bytes:
        return bytes([APP_LOGIN]) + self.pseudonym


@dataclass(frozen=True)
class MatchCreated:
    match_id: bytes

    def encode(self) -> bytes:
        return bytes([APP_CREATE_MATCH]) + self.match_id


@dataclass(frozen=True)
class MatchStarted:
    match_id: bytes
    your_slot: Player
    first_shooter: Player

    def encode(self) -> bytes:
        return (
            bytes([APP_JOIN_MATCH])
            + self.match_id
            + bytes([int(self.your_slot), int(self.first_shooter)])
        )


@dataclass(frozen=True)
class DefenseCommitted:
    """Tells both players the defender has locked in; shooter may fire."""

    def encode(self) -> bytes:
        return bytes([APP_DEFENSE])


@dataclass(frozen=True)
class OutcomeMsg:
    kind: OutcomeKind
    points: int
    final_x: int | None
    final_y: int | None
    score_a: int
    score_b: int
    next_shooter: Player
    phase: Phase
    winner: Player | None

    def encode(self) -> bytes:
        has_pos = self.final_x is not None
        return bytes([APP_OUTCOME]) + struct.pack(
            "<BBBiiIIBBB",
            int(self.kind),
            self.points,
            1 if has_pos else 0,
            self.final_x if has_pos else 0,
            self.final_y if has_pos else 0,
            self.score_a,
            self.score_b,
            int(self.next_shooter),
            _PHASE_WIRE[self.phase],
            _player_byte(self.winner),
        )

    @classmethod
    def from_state(cls, outcome: ShotOutcome, state) -> "OutcomeMsg":
        """Build the broadcast from a resolved outcome and the post-apply state."""
        return cls(
            kind=outcome.kind,
            points=outcome.points,
            final_x=outcome.final_x,
            final_y=outcome.final_y,
            score_a=state.scores[0],
            score_b=state.scores[1],
            next_shooter=state.shooter,
            phase=state.phase,
            winner=state.winner,
        )


@dataclass(frozen=True)
class HighScoreReply:
    withheld: bool
    rows: tuple[tuple[bytes, int], ...] = field(default_factory=tuple)

    def encode(self) -> bytes:
        out = bytes([APP_HIGHSCORE_REPLY, 1 if self.withheld else 0])
        out += struct.pack("<I", len(self.rows))
        for pseudonym, total in self.rows:
            if len(pseudonym) != suite.HASH_LEN:
                raise ProtocolError("pseudonym must be 32 bytes")
            out += pseudonym + struct.pack("<q", total)
        return out


@dataclass(frozen=True)
class ErrorMsg:
    code: int
    message: str

    def encode(self) -> bytes:
        msg = self.message.encode("utf-8")
        return bytes([APP_ERROR]) + struct.pack("<HI", self.code, len(msg)) + msg


# --- decoding ------------------------------------------------------------------

def _need(payload: bytes, n: int, what: str) -> None:
    if len(payload) != n:
        raise ProtocolError(f"{what}: expected {n} payload bytes, got {len(payload)}")


def decode_from_client(data: bytes):
    """Parse one message a server receives. Raises ProtocolError, never returns None."""
    if not data:
        raise ProtocolError("empty app message")
    app_type, payload = data[0], data[1:]
    if app_type == APP_LOGIN:
        if len(payload) < 4:
            raise ProtocolError("login: truncated")
        (n,) = struct.unpack_from("<I", payload)
        if len(payload) != 4 + n:
            raise ProtocolError("login: identity length mismatch")
        return Login(identity=payload[4:])
    if app_type == APP_CREATE_MATCH:
        _need(payload, 0, "create match")
        return CreateMatch()
    if app_type == APP_JOIN_MATCH:
        _need(payload, 8, "join match")
        return JoinMatch(match_id=payload)
    if app_type == APP_DEFENSE:
        _need(payload, TAG_LEN + 4, "defense")
        (paddle_x,) = struct.unpack_from("<i", payload, TAG_LEN)
        return DefenseMsg(paddle_x=paddle_x, tag=payload[:TAG_LEN])
    if app_type == APP_SHOT:
        _need(payload, TAG_LEN + 8, "shot")
        angle, force = struct.unpack_from("<ii", payload, TAG_LEN)
        return ShotMsg(angle_ddeg=angle, force=force, tag=payload[:TAG_LEN])
    if app_type == APP_HIGHSCORE_QUERY:
        _need(payload, 0, "high score query")
        return HighScoreQuery()
    raise ProtocolError(f"unexpected client app type 0x{app_type:02x}")


def decode_from_server(data: bytes):
    """Parse one message a client receives."""
    if not data:
        raise ProtocolError("empty app message")
    app_type, payload = data[0], data[1:]
    if app_type == APP_LOGIN:
        _need(payload, suite.HASH_LEN, "login reply")
        return LoginOk(pseudonym=payload)
    if app_type == APP_CREATE_MATCH:
        _need(payload, 8, "match created")
        return MatchCreated(match_id=payload)
    if app_type == APP_JOIN_MATCH:
        _need(payload, 10, "match started")
        slot = _byte_player(payload[8])
        shooter = _byte_player(payload[9])
        if slot is None or shooter is None:
            raise ProtocolError("match started: bad player byte")
        return MatchStarted(match_id=payload[:8], your_slot=slot, first_shooter=shooter)
    if app_type == APP_DEFENSE:
        _need(payload, 0, "defense committed")
        return DefenseCommitted()
    if app_type == APP_OUTCOME:
        _need(payload, struct.calcsize("<BBBiiIIBBB"), "outcome")
        (kind_b, points, has_pos, fx, fy, sa, sb, shooter_b, phase_b,
         winner_b) = struct.unpack("<BBBiiIIBBB", payload)
        try:
            kind = OutcomeKind(kind_b)
            phase = _WIRE_PHASE[phase_b]
        except (ValueError, KeyError) as exc:
            raise ProtocolError(f"outcome: {exc}") from exc
        shooter = _byte_player(shooter_b)
        if shooter is None:
            raise ProtocolError("outcome: missing next shooter")
        return OutcomeMsg(
            kind=kind,
            points=points,
            final_x=fx if has_pos else None,
            final_y=fy if has_pos else None,
            score_a=sa,
            score_b=sb,
            next_shooter=shooter,
            phase=phase,
            winner=_byte_player(winner_b),
        )
    if app_type == APP_HIGHSCORE_REPLY:
        if len(payload) < 5:
            raise ProtocolError("high score reply: truncated")
        withheld = payload[0]
        (count,) = struct.unpack_from("<I", payload, 1)
        row_len = suite.HASH_LEN + 8
        if len(payload) != 5 + count * row_len:
            raise ProtocolError("high score reply: row length mismatch")
        rows = []
        for i in range(count):
            off = 5 + i * row_len
            pseudonym = payload[off : off + suite.HASH_LEN]
            (total,) = struct.unpack_from("<q", payload, off + suite.HASH_LEN)
            rows.append((pseudonym, total))
        return HighScoreReply(withheld=bool(withheld), rows=tuple(rows))
    if app_type == APP_ERROR:
        if len(payload) < 6:
            raise ProtocolError("error message: truncated")
        code, n = struct.unpack_from("<HI", payload)
        if len(payload) != 6 + n:
            raise ProtocolError("error message: length mismatch")
        return ErrorMsg(code=code, message=payload[6:].decode("utf-8", "replace"))
    raise ProtocolError(f"unexpected server app type 0x{app_type:02x}")
