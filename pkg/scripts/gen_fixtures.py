"""Regenerate the checked-in fixtures.

Run from the repo root: python3 scripts/gen_fixtures.py

The canonical-encoding golden for manifest-a is built here by hand with
raw struct packing, on purpose: it must not be derived from the library
code it exists to check. If the layout in the package drifts, the golden
test fails rather than silently following along.
"""

import hashlib
import json
import struct
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
FIX = ROOT / "fixtures"

# label bytes: Public 0, Aggregate 1, Pseudonymous 2, PlayerMetric 3,
#              RawInput 4, PlayerIdentity 5
# declassifier kinds: Pseudonymize 0, AggregateK 1
# sink kinds: network 0, persistence 1


def enc_str(s: str) -> bytes:
    b = s.encode("ascii")
    return struct.pack("<I", len(b)) + b


def main() -> None:
    FIX.mkdir(exist_ok=True)

    # --- manifest-a: the measurement golden --------------------------------
    digest_a = hashlib.sha256(b"manifest-a code").digest()
    manifest_a = {
        "component_id": "manifest-a",
        "code_digest": digest_a.hex(),
        "input_labels": ["PlayerIdentity"],
        "output_labels": ["Pseudonymous"],
        "declassifiers": [
            {
                "kind": "Pseudonymize",
                "input_label": "PlayerIdentity",
                "output_label": "Pseudonymous",
            }
        ],
        "egress_sinks": [
            {"sink_id": "events", "label": "Pseudonymous", "kind": "persistence"}
        ],
    }
    (FIX / "manifest-a.json").write_text(json.dumps(manifest_a, indent=2) + "\n")

    canonical = b"".join(
        [
            enc_str("manifest-a"),
            struct.pack("<I", 32) + digest_a,
            struct.pack("<I", 1) + bytes([5]),   # inputs: PlayerIdentity
            struct.pack("<I", 1) + bytes([2]),   # outputs: Pseudonymous
            struct.pack("<I", 1) + bytes([0, 5, 2]),  # Pseudonymize 5 -> 2
            struct.pack("<I", 1) + enc_str("events") + bytes([2, 1]),
        ]
    )
    (FIX / "manifest-a.canonical.bin").write_bytes(canonical)
    measurement = hashlib.sha256(canonical).hexdigest()
    (FIX / "manifest-a.measurement.txt").write_text(measurement + "\n")

    # --- server component manifest -----------------------------------------
    server_manifest = {
        "component_id": "shufflepuck-server",
        "code_digest": hashlib.sha256(b"shufflepuck-server build 0.1.0").hexdigest(),
        "input_labels": ["PlayerIdentity", "RawInput"],
        "output_labels": ["Aggregate", "PlayerMetric"],
        "declassifiers": [
            {
                "kind": "Pseudonymize",
                "input_label": "PlayerIdentity",
                "output_label": "Pseudonymous",
            },
            {
                "kind": "AggregateK",
                "input_label": "Pseudonymous",
                "output_label": "Aggregate",
                "k": 5,
            },
        ],
        "egress_sinks": [
            {"sink_id": "highscore-publish", "label": "Aggregate", "kind": "network"},
            {"sink_id": "match-log", "label": "Aggregate", "kind": "persistence"},
        ],
    }
    (FIX / "server-manifest.json").write_text(
        json.dumps(server_manifest, indent=2) + "\n"
    )

    # --- platform keys and trust stores -------------------------------------
    # Fixture secrets are deterministic so every checkout agrees byte-for-byte.
    sys.path.insert(0, str(ROOT / "src"))
    from zkpuck.enclave import (  # noqa: E402
        PlatformKey,
        TrustStore,
        load_manifest,
        measure,
        save_platform_key,
    )
    from zkpuck import suite  # noqa: E402

    key = PlatformKey.from_seed(
        "platform-1", hashlib.sha256(b"fixture platform key seed").digest()
    )
    save_platform_key(key, FIX / "platform-key.json")

    loaded = load_manifest(FIX / "server-manifest.json")
    server_measurement = measure(loaded)

    store = TrustStore(
        platform_keys={"platform-1": suite.sign_pub_bytes(key.signing_key)},
        expected_measurements=frozenset({server_measurement}),
    )
    store.save(FIX / "trust-store.json")

    rogue = PlatformKey.from_seed(
        "platform-1", hashlib.sha256(b"rogue platform key seed").digest()
    )
    wrong = TrustStore(
        platform_keys={"platform-1": suite.sign_pub_bytes(rogue.signing_key)},
        expected_measurements=frozenset({server_measurement}),
    )
    wrong.save(FIX / "wrong-trust-store.json")

    # cross-check: library agrees with the hand-built golden
    got = measure(load_manifest(FIX / "manifest-a.json")).hex
    if got != measurement:
        raise SystemExit(
            f"canonical encoding drifted: hand-built {measurement}, library {got}"
        )

    # --- server config -------------------------------------------------------
    config = {
        "tcp": "127.0.0.1:0",
        "ws": "127.0.0.1:0",
        "k_min": 5,
        "manifest": "server-manifest.json",
        "platform_key": "platform-key.json",
        "sink_dir": "run/sinks",
        "pseudonym_key": hashlib.sha256(b"fixture pseudonym key").hexdigest(),
    }
    (FIX / "server-config.json").write_text(json.dumps(config, indent=2) + "\n")

    # --- reference component graph ------------------------------------------
    graph = {
        "nodes": [
            {
                "component_id": "shufflepuck-app",
                "code_digest": hashlib.sha256(b"shufflepuck-app build 0.1.0").hexdigest(),
                "input_labels": ["Aggregate", "Public", "PlayerMetric"],
                "output_labels": ["PlayerIdentity", "RawInput"],
                "declassifiers": [],
                "egress_sinks": [],
            },
            server_manifest,
            {
                "component_id": "scoreboard-cdn",
                "code_digest": "",
                "input_labels": ["Aggregate"],
                "output_labels": ["Aggregate"],
                "declassifiers": [],
                "egress_sinks": [
                    {"sink_id": "public-web", "label": "Aggregate", "kind": "network"}
                ],
            },
        ],
        "edges": [
            {"from": "shufflepuck-app", "to": "shufflepuck-server", "label": "RawInput"},
            {
                "from": "shufflepuck-app",
                "to": "shufflepuck-server",
                "label": "PlayerIdentity",
            },
            {
                "from": "shufflepuck-server",
                "to": "shufflepuck-app",
                "label": "PlayerMetric",
            },
            {
                "from": "shufflepuck-server",
                "to": "scoreboard-cdn",
                "label": "Aggregate",
                "via_declassifier": "AggregateK",
            },
        ],
    }
    (FIX / "graph-shufflepuck.json").write_text(json.dumps(graph, indent=2) + "\n")

    # --- scripted match -------------------------------------------------------
    # Outcome walk (shooters alternate, points per turn in cycle order):
    # 3, 0, 2, 2, 0, 0, 1, 0 -> first shooter reaches 9 on turn 9, wins.
    script = [
        {"defense": 0, "shot": {"angle": 0, "force": 566}},
        {"defense": 2500, "shot": {"angle": 0, "force": 566}},
        {"defense": 4000, "shot": {"angle": 0, "force": 548}},
        {"defense": 2500, "shot": {"angle": 300, "force": 600}},
        {"defense": 100, "shot": {"angle": -200, "force": 700}},
        {"defense": 957, "shot": {"angle": -200, "force": 700}},
        {"defense": 4900, "shot": {"angle": 0, "force": 520}},
        {"defense": 2500, "shot": {"angle": 0, "force": 300}},
    ]
    (FIX / "bot-script.json").write_text(json.dumps(script, indent=2) + "\n")

    print(f"manifest-a measurement: {measurement}")
    print(f"server measurement:     {server_measurement.hex}")


if __name__ == "__main__":
    main()
