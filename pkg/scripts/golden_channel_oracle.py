#!/usr/bin/env python3
"""One-off oracle for the fixed-key handshake golden values.

Reconstructs the two handshake payloads with raw struct/hashlib/hmac and
the cryptography primitives directly, never importing zkpuck.channel, then
prints the transcript hash and session keys. The hex outputs are frozen
into tests/test_channel.py; rerun this script only to regenerate them
after a deliberate protocol change.
"""

import hashlib
import hmac
import json
import pathlib
import struct

from cryptography.hazmat.primitives.asymmetric.ed25519 import Ed25519PrivateKey
from cryptography.hazmat.primitives.asymmetric.x25519 import (
    X25519PrivateKey,
    X25519PublicKey,
)
from cryptography.hazmat.primitives.serialization import Encoding, PublicFormat

HERE = pathlib.Path(__file__).resolve().parent.parent

NONCE = bytes(range(32))
CLIENT_SEED = bytes([0x11] * 32)
SERVER_SEED = bytes([0x22] * 32)
PLATFORM_SEED = bytes([0x33] * 32)
KEY_ID = "golden-platform"


def hkdf_sha256(ikm: bytes, salt: bytes, info: bytes, length: int) -> bytes:
    prk = hmac.new(salt, ikm, hashlib.sha256).digest()
    okm = b""
    block = b""
    counter = 1
    while len(okm) < length:
        block = hmac.new(prk, block + info + bytes([counter]), hashlib.sha256).digest()
        okm += block
        counter += 1
    return okm[:length]


def main() -> None:
    client_key = X25519PrivateKey.from_private_bytes(CLIENT_SEED)
    server_key = X25519PrivateKey.from_private_bytes(SERVER_SEED)
    client_pub = client_key.public_key().public_bytes(Encoding.Raw, PublicFormat.Raw)
    server_pub = server_key.public_key().public_bytes(Encoding.Raw, PublicFormat.Raw)

    canonical = (HERE / "fixtures" / "manifest-a.canonical.bin").read_bytes()
    measurement = hashlib.sha256(canonical).digest()

    report_data = hashlib.sha256(NONCE + client_pub + server_pub).digest()
    signer = Ed25519PrivateKey.from_private_bytes(PLATFORM_SEED)
    signature = signer.sign(measurement + report_data)

    hello_payload = NONCE + client_pub
    attest_payload = (
        server_pub
        + measurement
        + report_data
        + struct.pack("<I", len(signature))
        + signature
        + struct.pack("<I", len(KEY_ID))
        + KEY_ID.encode("ascii")
    )
    transcript = hashlib.sha256(hello_payload + attest_payload).digest()

    shared = client_key.exchange(X25519PublicKey.from_public_bytes(server_pub))
    assert shared == server_key.exchange(X25519PublicKey.from_public_bytes(client_pub))
    okm = hkdf_sha256(shared, transcript, b"zkpuck-channel-v1", 64)

    print(
        json.dumps(
            {
                "client_pub": client_pub.hex(),
                "server_pub": server_pub.hex(),
                "measurement": measurement.hex(),
                "report_data": report_data.hex(),
                "signature": signature.hex(),
                "transcript_hash": transcript.hex(),
                "key_c2s": okm[:32].hex(),
                "key_s2c": okm[32:].hex(),
            },
            indent=2,
        )
    )


if __name__ == "__main__":
    main()
