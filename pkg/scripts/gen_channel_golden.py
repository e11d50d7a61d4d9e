#!/usr/bin/env python3
"""Freeze the fixed-key handshake and a few sealed frames into
fixtures/channel-golden.json.

The web client's test suite reads the same file, so both implementations
are held to identical bytes. Rerun only after a deliberate protocol
change, then re-freeze.
"""

import json
import pathlib

from zkpuck import channel, protocol, suite
from zkpuck.enclave import PlatformKey, TrustStore, load_manifest, measure

HERE = pathlib.Path(__file__).resolve().parent.parent

NONCE = bytes(range(32))
CLIENT_SEED = bytes([0x11] * 32)
SERVER_SEED = bytes([0x22] * 32)
PLATFORM_SEED = bytes([0x33] * 32)
KEY_ID = "golden-platform"
PSEUDONYM = suite.hash256(b"golden-pseudonym")


def main() -> None:
    manifest = load_manifest(HERE / "fixtures" / "manifest-a.json")
    platform = PlatformKey.from_seed(KEY_ID, PLATFORM_SEED)
    store = TrustStore(
        platform_keys={KEY_ID: platform.public_bytes},
        expected_measurements=frozenset({measure(manifest)}),
    )

    hs = channel.ClientHandshake(_nonce=NONCE, _eph_seed=CLIENT_SEED)
    attest, server_keys = channel.server_respond(
        hs.hello, manifest, platform, _eph_seed=SERVER_SEED
    )
    client_keys = hs.finish(attest, store)

    frames = []

    def freeze(keys, direction: int, label: str, plaintext: bytes) -> None:
        frame = channel.seal(keys, direction, plaintext)
        frames.append(
            {
                "label": label,
                "direction": "c2s" if direction == channel.C2S else "s2c",
                "seq": frame.seq,
                "plaintext": plaintext.hex(),
                "frame": frame.encode().hex(),
                "wire": channel.encode_wire(channel.MSG_FRAME, frame.encode()).hex(),
            }
        )

    freeze(client_keys, channel.C2S, "login", protocol.Login(b"golden-player").encode())
    freeze(client_keys, channel.C2S, "defense", protocol.DefenseMsg(paddle_x=1234).encode())
    freeze(
        client_keys,
        channel.C2S,
        "shot",
        protocol.ShotMsg(angle_ddeg=-250, force=800).encode(),
    )
    freeze(server_keys, channel.S2C, "login-ok", protocol.LoginOk(PSEUDONYM).encode())

    obj = {
        "inputs": {
            "nonce": NONCE.hex(),
            "client_eph_seed": CLIENT_SEED.hex(),
            "server_eph_seed": SERVER_SEED.hex(),
            "platform_key_seed": PLATFORM_SEED.hex(),
            "platform_key_id": KEY_ID,
            "manifest_file": "manifest-a.json",
        },
        "trust_store": json.loads(store.to_json()),
        "derived": {
            "client_eph_pub": hs.hello.client_eph_pub.hex(),
            "server_eph_pub": attest.server_eph_pub.hex(),
            "measurement": measure(manifest).hex,
            "report_data": attest.quote.report_data.hex(),
            "transcript_hash": client_keys.transcript_hash.hex(),
            "key_c2s": client_keys.key_c2s.hex(),
            "key_s2c": client_keys.key_s2c.hex(),
        },
        "wire": {
            "client_hello": hs.hello.encode().hex(),
            "server_attest": attest.encode().hex(),
            "wire_client_hello": channel.encode_wire(
                channel.MSG_CLIENT_HELLO, hs.hello.encode()
            ).hex(),
            "wire_server_attest": channel.encode_wire(
                channel.MSG_SERVER_ATTEST, attest.encode()
            ).hex(),
        },
        "frames": frames,
    }
    out = HERE / "fixtures" / "channel-golden.json"
    out.write_text(json.dumps(obj, indent=2) + "\n")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
