"""Attested, sealed session between a client and a measured server component.

One-shot handshake: the client sends a fresh nonce and an ephemeral key,
the server answers with its own ephemeral key plus a platform quote whose
report data binds the whole exchange. The client releases no application
byte until the quote verifies against its trust store. After that, every
message travels in an AEAD frame tagged with a strictly increasing
sequence number; corruption, replay, and reordering are all hard
failures. Underlying transport is assumed reliable and ordered.

Wire format (identical over raw TCP and binary WebSocket messages):
    [u32 LE length] [u8 msg_type] [payload]
with length covering everything after the length field itself.
"""

from __future__ import annotations

import os
import struct
from dataclasses import dataclass

from . import suite
from .enclave import (
    AttestationQuote,
    ComponentManifest,
    Measurement,
    PlatformKey,
    TrustStore,
    generate_quote,
    measure,
    verify_quote,
)
from .errors import (
    AttestationError,
    AuthFailure,
    HandshakeAborted,
    ProtocolError,
    ReplayDetected,
    SequenceGap,
    SequenceOverflow,
)

MSG_CLIENT_HELLO = 0x01
MSG_SERVER_ATTEST = 0x02
MSG_FRAME = 0x10

NONCE_LEN = 32
MAX_SEQ = 2**64 - 1
KDF_INFO = b"zkpuck-channel-v1"

C2S = 0  # direction byte, also the AEAD associated-data discriminator
S2C = 1


@dataclass(frozen=True)
class ClientHello:
    nonce: bytes
    client_eph_pub: bytes

    def encode(self) -> bytes:
        return self.nonce + self.client_eph_pub

    @classmethod
    def decode(cls, payload: bytes) -> "ClientHello":
        if len(payload) != NONCE_LEN + suite.KEY_LEN:
            raise ProtocolError(f"client hello must be 64 bytes, got {len(payload)}")
        return cls(nonce=payload[:NONCE_LEN], client_eph_pub=payload[NONCE_LEN:])


@dataclass(frozen=True)
class ServerAttest:
    server_eph_pub: bytes
    quote: AttestationQuote

    def encode(self) -> bytes:
        q = self.quote
        kid = q.platform_key_id.encode("ascii")
        return (
            self.server_eph_pub
            + q.measurement.digest
            + q.report_data
            + struct.pack("<I", len(q.platform_signature))
            + q.platform_signature
            + struct.pack("<I", len(kid))
            + kid
        )

    @classmethod
    def decode(cls, payload: bytes) -> "ServerAttest":
        try:
            off = 0
            eph = payload[off : off + suite.KEY_LEN]
            off += suite.KEY_LEN
            meas = payload[off : off + suite.HASH_LEN]
            off += suite.HASH_LEN
            report = payload[off : off + suite.HASH_LEN]
            off += suite.HASH_LEN
            (sig_len,) = struct.unpack_from("<I", payload, off)
            off += 4
            sig = payload[off : off + sig_len]
            off += sig_len
            (kid_len,) = struct.unpack_from("<I", payload, off)
            off += 4
            kid = payload[off : off + kid_len].decode("ascii")
            off += kid_len
            if off != len(payload) or len(sig) != sig_len or len(meas) != suite.HASH_LEN:
                raise ValueError("length mismatch")
        except (struct.error, ValueError, UnicodeDecodeError) as exc:
            raise ProtocolError(f"malformed server attest: {exc}") from exc
        return cls(
            server_eph_pub=eph,
            quote=AttestationQuote(
                measurement=Measurement(meas),
                report_data=report,
                platform_signature=sig,
                platform_key_id=kid,
            ),
        )


class SessionKeys:
    """Directional AEAD keys plus send/receive counters for one session.

    Each endpoint holds its own instance: send_seq counts the frames this
    endpoint sealed, recv_seq the frames it accepted. Not shareable
    across sessions.
    """

    __slots__ = ("key_c2s", "key_s2c", "send_seq", "recv_seq", "transcript_hash")

    def __init__(self, key_c2s: bytes, key_s2c: bytes, transcript_hash: bytes):
        self.key_c2s = key_c2s
        self.key_s2c = key_s2c
        self.send_seq = 0
        self.recv_seq = 0
        self.transcript_hash = transcript_hash


@dataclass(frozen=True)
class Frame:
    seq: int
    ciphertext: bytes

    def encode(self) -> bytes:
        return struct.pack("<Q", self.seq) + self.ciphertext

    @classmethod
    def decode(cls, payload: bytes) -> "Frame":
        if len(payload) < 8:
            raise ProtocolError("frame shorter than its sequence number")
        (seq,) = struct.unpack_from("<Q", payload)
        return cls(seq=seq, ciphertext=payload[8:])


def report_data_for(nonce: bytes, client_eph_pub: bytes, server_eph_pub: bytes) -> bytes:
    return suite.hash256(nonce + client_eph_pub + server_eph_pub)


def _derive_keys(shared: bytes, transcript_hash: bytes) -> SessionKeys:
    okm = suite.hkdf_sha256(shared, salt=transcript_hash, info=KDF_INFO, length=64)
    return SessionKeys(
        key_c2s=okm[:32], key_s2c=okm[32:], transcript_hash=transcript_hash
    )


class ClientHandshake:
    """Client half of the handshake; holds the ephemeral secret until finish."""

    def __init__(self, *, _nonce: bytes | None = None, _eph_seed: bytes | None = None):
        # The underscored parameters exist for fixture tests that need a
        # reproducible transcript; production callers pass nothing.
        self._eph = (
            suite.kex_from_seed(_eph_seed) if _eph_seed else suite.kex_generate()
        )
        self.hello = ClientHello(
            nonce=_nonce if _nonce is not None else os.urandom(NONCE_LEN),
            client_eph_pub=suite.kex_pub_bytes(self._eph),
        )

    def finish(self, attest: ServerAttest, store: TrustStore) -> SessionKeys:
        """Verify the quote against this handshake; keys exist only on success."""
        expected = report_data_for(
            self.hello.nonce, self.hello.client_eph_pub, attest.server_eph_pub
        )
        try:
            verify_quote(store, attest.quote, expected)
        except AttestationError as exc:
            raise HandshakeAborted(exc) from exc
        shared = suite.kex_shared(self._eph, attest.server_eph_pub)
        transcript = suite.hash256(self.hello.encode() + attest.encode())
        return _derive_keys(shared, transcript)


def client_hello() -> ClientHandshake:
    return ClientHandshake()


def server_respond(
    hello: ClientHello,
    manifest: ComponentManifest,
    platform_key: PlatformKey,
    *,
    _eph_seed: bytes | None = None,
) -> tuple[ServerAttest, SessionKeys]:
    """Answer a hello with a quote bound to this exchange, and derive keys."""
    if len(hello.nonce) != NONCE_LEN or len(hello.client_eph_pub) != suite.KEY_LEN:
        raise ProtocolError("malformed client hello")
    eph = suite.kex_from_seed(_eph_seed) if _eph_seed else suite.kex_generate()
    server_eph_pub = suite.kex_pub_bytes(eph)
    report = report_data_for(hello.nonce, hello.client_eph_pub, server_eph_pub)
    quote = generate_quote(platform_key, measure(manifest), report)
    attest = ServerAttest(server_eph_pub=server_eph_pub, quote=quote)
    shared = suite.kex_shared(eph, hello.client_eph_pub)
    transcript = suite.hash256(hello.encode() + attest.encode())
    return attest, _derive_keys(shared, transcript)


def _nonce_for(seq: int) -> bytes:
    return struct.pack("<Q", seq) + b"\x00\x00\x00\x00"


def _key_for(keys: SessionKeys, direction: int) -> bytes:
    return keys.key_c2s if direction == C2S else keys.key_s2c


def seal(keys: SessionKeys, direction: int, plaintext: bytes) -> Frame:
    if keys.send_seq >= MAX_SEQ:
        raise SequenceOverflow("send counter exhausted")
    seq = keys.send_seq
    ad = struct.pack("<Q", seq) + bytes([direction])
    ciphertext = suite.aead_seal(_key_for(keys, direction), _nonce_for(seq), plaintext, ad)
    keys.send_seq = seq + 1
    return Frame(seq=seq, ciphertext=ciphertext)


def open_frame(keys: SessionKeys, direction: int, frame: Frame) -> bytes:
    """Accept exactly the next expected sequence number, then advance it."""
    if frame.seq < keys.recv_seq:
        raise ReplayDetected(f"frame seq {frame.seq} already accepted")
    if frame.seq > keys.recv_seq:
        raise SequenceGap(f"expected seq {keys.recv_seq}, got {frame.seq}")
    ad = struct.pack("<Q", frame.seq) + bytes([direction])
    plaintext = suite.aead_open(
        _key_for(keys, direction), _nonce_for(frame.seq), frame.ciphertext, ad
    )
    if plaintext is None:
        raise AuthFailure(f"frame seq {frame.seq} failed authentication")
    keys.recv_seq = frame.seq + 1
    return plaintext


# --- wire framing --------------------------------------------------------------

MAX_WIRE_LEN = 1 << 22  # 4 MiB; desk-scale messages are tiny


def encode_wire(msg_type: int, payload: bytes) -> bytes:
    return struct.pack("<I", 1 + len(payload)) + bytes([msg_type]) + payload


def decode_wire(data: bytes) -> tuple[int, bytes, bytes]:
    """Split one message off the front; returns (type, payload, rest)."""
    if len(data) < 5:
        raise ProtocolError("wire message truncated")
    (length,) = struct.unpack_from("<I", data)
    if length < 1 or length > MAX_WIRE_LEN:
        raise ProtocolError(f"implausible wire length {length}")
    if len(data) < 4 + length:
        raise ProtocolError("wire message truncated")
    return data[4], data[5 : 4 + length], data[4 + length :]


async def read_wire(reader) -> tuple[int, bytes]:
    """Read one [len][type][payload] message from an asyncio stream reader."""
    header = await reader.readexactly(4)
    (length,) = struct.unpack("<I", header)
    if length < 1 or length > MAX_WIRE_LEN:
        raise ProtocolError(f"implausible wire length {length}")
    body = await reader.readexactly(length)
    return body[0], body[1:]
