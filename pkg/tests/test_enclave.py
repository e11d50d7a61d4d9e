"""Measurement, quotes, and trust store verification.

The golden canonical encoding below is constructed by hand with struct
literals, independently of the library's encoder, and the measurement hex
was produced by an external sha256 tool over those bytes.
"""

import dataclasses
import hashlib
import random
import struct

import pytest

from zkpuck.enclave import (
    AttestationQuote,
    ComponentManifest,
    Measurement,
    PlatformKey,
    TrustStore,
    canonical_encode,
    generate_quote,
    load_manifest,
    load_platform_key,
    manifest_from_dict,
    manifest_to_dict,
    measure,
    save_platform_key,
    verify_quote,
)
from zkpuck.errors import (
    BadSignature,
    InvalidManifest,
    ReportMismatch,
    UnknownMeasurement,
    UnknownPlatformKey,
)
from zkpuck.labels import DataLabel, DeclassifierDecl, DeclassifierKind, SinkDecl, SinkKind

GOLDEN_MEASUREMENT = "bae62db6880605eeb474cbc005a26f1b5036d33554e1c906453c0083998d25d2"


def hand_built_canonical() -> bytes:
    """manifest-a encoded with raw struct calls, no library helpers."""
    code_digest = hashlib.sha256(b"manifest-a code").digest()
    out = b""
    out += struct.pack("<I", 10) + b"manifest-a"
    out += struct.pack("<I", 32) + code_digest
    out += struct.pack("<I", 1) + bytes([5])  # inputs: PlayerIdentity
    out += struct.pack("<I", 1) + bytes([2])  # outputs: Pseudonymous
    out += struct.pack("<I", 1) + bytes([0, 5, 2])  # Pseudonymize 5 -> 2
    out += struct.pack("<I", 1)
    out += struct.pack("<I", 6) + b"events" + bytes([2, 1])  # Pseudonymous persistence
    return out


def test_golden_canonical_encoding(fixtures_dir):
    manifest = load_manifest(fixtures_dir / "manifest-a.json")
    expected = hand_built_canonical()
    assert canonical_encode(manifest) == expected
    assert (fixtures_dir / "manifest-a.canonical.bin").read_bytes() == expected


def test_golden_measurement(fixtures_dir):
    manifest = load_manifest(fixtures_dir / "manifest-a.json")
    m = measure(manifest)
    assert m.hex == GOLDEN_MEASUREMENT
    assert m.digest == hashlib.sha256(hand_built_canonical()).digest()
    frozen = (fixtures_dir / "manifest-a.measurement.txt").read_text().strip()
    assert frozen == GOLDEN_MEASUREMENT


def test_measure_is_pure(fixtures_dir):
    manifest = load_manifest(fixtures_dir / "manifest-a.json")
    first = measure(manifest).digest
    for _ in range(10_000):
        assert measure(manifest).digest == first


def _random_manifest(rng: random.Random) -> ComponentManifest:
    labels = list(DataLabel)
    inputs = frozenset(rng.sample(labels, rng.randint(1, 3)))
    outputs = frozenset(rng.sample(labels, rng.randint(1, 3)))
    declassifiers = []
    if rng.random() < 0.5:
        declassifiers.append(
            DeclassifierDecl(
                DeclassifierKind.PSEUDONYMIZE,
                DataLabel.PLAYER_IDENTITY,
                DataLabel.PSEUDONYMOUS,
            )
        )
    if rng.random() < 0.5:
        declassifiers.append(
            DeclassifierDecl(
                DeclassifierKind.AGGREGATE_K,
                rng.choice(labels[2:]),
                DataLabel.AGGREGATE,
                k=rng.randint(2, 20),
            )
        )
    sinks = tuple(
        SinkDecl(f"sink-{i}", rng.choice(labels), rng.choice(list(SinkKind)))
        for i in range(rng.randint(0, 3))
    )
    return ComponentManifest(
        component_id="comp-" + "".join(rng.choice("abcdef0123456789") for _ in range(8)),
        code_digest=rng.randbytes(32) if rng.random() < 0.8 else None,
        input_labels=inputs,
        output_labels=outputs,
        declassifiers=tuple(declassifiers),
        egress_sinks=sinks,
    )


def test_measure_deterministic_over_random_manifests():
    rng = random.Random(0xE17C)
    for _ in range(500):
        manifest = _random_manifest(rng)
        a = measure(manifest)
        b = measure(
            dataclasses.replace(manifest)  # fresh object, same content
        )
        assert a == b
        assert a.digest == hashlib.sha256(canonical_encode(manifest)).digest()


def test_label_set_encoding_ignores_construction_order():
    base = dict(
        component_id="c",
        code_digest=None,
        declassifiers=(),
        egress_sinks=(),
        output_labels=frozenset({DataLabel.PUBLIC}),
    )
    a = ComponentManifest(
        input_labels=frozenset({DataLabel.RAW_INPUT, DataLabel.PLAYER_IDENTITY}), **base
    )
    b = ComponentManifest(
        input_labels=frozenset({DataLabel.PLAYER_IDENTITY, DataLabel.RAW_INPUT}), **base
    )
    assert measure(a) == measure(b)


def test_any_field_change_moves_the_measurement(fixtures_dir):
    manifest = load_manifest(fixtures_dir / "manifest-a.json")
    baseline = measure(manifest)
    variants = [
        dataclasses.replace(manifest, component_id="manifest-b"),
        dataclasses.replace(manifest, code_digest=None),
        dataclasses.replace(
            manifest, code_digest=bytes(32)
        ),
        dataclasses.replace(
            manifest, input_labels=frozenset({DataLabel.RAW_INPUT})
        ),
        dataclasses.replace(manifest, output_labels=frozenset({DataLabel.PUBLIC})),
        dataclasses.replace(manifest, declassifiers=()),
        dataclasses.replace(manifest, egress_sinks=()),
        dataclasses.replace(
            manifest,
            egress_sinks=(
                SinkDecl("events", DataLabel.PSEUDONYMOUS, SinkKind.NETWORK),
            ),
        ),
    ]
    seen = {baseline.digest}
    for variant in variants:
        digest = measure(variant).digest
        assert digest != baseline.digest
        seen.add(digest)
    assert len(seen) == len(variants) + 1


def test_manifest_dict_round_trip(fixtures_dir):
    manifest = load_manifest(fixtures_dir / "server-manifest.json")
    again = manifest_from_dict(manifest_to_dict(manifest))
    assert again == manifest
    assert measure(again) == measure(manifest)


def test_manifest_validation_rejects():
    good = dict(
        component_id="ok",
        code_digest=None,
        input_labels=frozenset({DataLabel.PUBLIC}),
        output_labels=frozenset({DataLabel.PUBLIC}),
        declassifiers=(),
        egress_sinks=(),
    )
    ComponentManifest(**good)
    for bad_id in ("", "has space", "x" * 65, "semi;colon"):
        with pytest.raises(InvalidManifest):
            ComponentManifest(**{**good, "component_id": bad_id})
    with pytest.raises(InvalidManifest):
        ComponentManifest(**{**good, "code_digest": b"\x00" * 31})
    with pytest.raises(InvalidManifest):
        manifest_from_dict({"component_id": "x"})
    with pytest.raises(InvalidManifest):
        manifest_from_dict(
            {
                "component_id": "x",
                "code_digest": "zz",
                "input_labels": [],
                "output_labels": [],
                "declassifiers": [],
                "egress_sinks": [],
            }
        )
    with pytest.raises(InvalidManifest):
        manifest_from_dict(
            {
                "component_id": "x",
                "code_digest": "",
                "input_labels": ["NotALabel"],
                "output_labels": [],
                "declassifiers": [],
                "egress_sinks": [],
            }
        )


def test_platform_key_round_trip(tmp_path):
    key = PlatformKey.generate("unit-key")
    save_platform_key(key, tmp_path / "pk.json")
    again = load_platform_key(tmp_path / "pk.json")
    assert again.key_id == "unit-key"
    assert again.public_bytes == key.public_bytes


def test_trust_store_round_trip(tmp_path, trust_store):
    trust_store.save(tmp_path / "ts.json")
    again = TrustStore.load(tmp_path / "ts.json")
    assert again.platform_keys == trust_store.platform_keys
    assert again.expected_measurements == trust_store.expected_measurements
    # serialization is canonical
    assert again.to_json() == trust_store.to_json()


def _quote_setup():
    key = PlatformKey.from_seed("platform-x", bytes([7] * 32))
    manifest = ComponentManifest(
        component_id="target",
        code_digest=bytes(range(32)),
        input_labels=frozenset({DataLabel.PUBLIC}),
        output_labels=frozenset({DataLabel.PUBLIC}),
        declassifiers=(),
        egress_sinks=(),
    )
    measurement = measure(manifest)
    report = hashlib.sha256(b"handshake binding").digest()
    quote = generate_quote(key, measurement, report)
    return key, measurement, report, quote


def test_verify_quote_accepts_honest_quote():
    key, measurement, report, quote = _quote_setup()
    store = TrustStore(
        platform_keys={"platform-x": key.public_bytes},
        expected_measurements=frozenset({measurement}),
    )
    identity = verify_quote(store, quote, report)
    assert identity.measurement == measurement


def test_verify_quote_fault_injection_all_16_combinations():
    """Drive every combination of the four checks and pin the first failure."""
    key, measurement, report, quote = _quote_setup()
    other_measurement = Measurement(hashlib.sha256(b"some other build").digest())
    wrong_report = hashlib.sha256(b"different handshake").digest()

    for key_known in (False, True):
        for sig_valid in (False, True):
            for meas_expected in (False, True):
                for report_match in (False, True):
                    store = TrustStore(
                        platform_keys=(
                            {"platform-x": key.public_bytes}
                            if key_known
                            else {"someone-else": key.public_bytes}
                        ),
                        expected_measurements=frozenset(
                            {measurement} if meas_expected else {other_measurement}
                        ),
                    )
                    q = quote
                    if not sig_valid:
                        broken = bytearray(quote.platform_signature)
                        broken[5] ^= 0x10
                        q = dataclasses.replace(
                            quote, platform_signature=bytes(broken)
                        )
                    expected_report = report if report_match else wrong_report
                    if not key_known:
                        expected_error = UnknownPlatformKey
                    elif not sig_valid:
                        expected_error = BadSignature
                    elif not meas_expected:
                        expected_error = UnknownMeasurement
                    elif not report_match:
                        expected_error = ReportMismatch
                    else:
                        expected_error = None
                    if expected_error is None:
                        assert verify_quote(store, q, expected_report).measurement == (
                            measurement
                        )
                    else:
                        with pytest.raises(expected_error):
                            verify_quote(store, q, expected_report)


def test_signature_covers_both_measurement_and_report():
    key, measurement, report, quote = _quote_setup()
    other = Measurement(hashlib.sha256(b"evil build").digest())
    store = TrustStore(
        platform_keys={"platform-x": key.public_bytes},
        expected_measurements=frozenset({other}),
    )
    # splicing a different measurement under the old signature dies at the
    # signature check, before the measurement lookup could accept it
    spliced = dataclasses.replace(quote, measurement=other)
    with pytest.raises(BadSignature):
        verify_quote(store, spliced, report)


def test_tampered_manifest_yields_unknown_measurement_100_trials(fixtures_dir):
    """Flip one byte of the manifest, re-measure, quote honestly: the client
    store built for the original must reject with UnknownMeasurement."""
    key = load_platform_key(fixtures_dir / "platform-key.json")
    manifest = load_manifest(fixtures_dir / "server-manifest.json")
    store = TrustStore(
        platform_keys={key.key_id: key.public_bytes},
        expected_measurements=frozenset({measure(manifest)}),
    )
    report = hashlib.sha256(b"session nonce binding").digest()
    rng = random.Random(0xBADC0DE)
    for trial in range(100):
        mode = rng.randrange(3)
        if mode == 0:
            digest = bytearray(manifest.code_digest)
            digest[rng.randrange(32)] ^= 1 << rng.randrange(8)
            tampered = dataclasses.replace(manifest, code_digest=bytes(digest))
        elif mode == 1:
            cid = list(manifest.component_id)
            pos = rng.randrange(len(cid))
            cid[pos] = rng.choice([c for c in "abcdefghij" if c != cid[pos]])
            tampered = dataclasses.replace(manifest, component_id="".join(cid))
        else:
            sinks = list(manifest.egress_sinks)
            pos = rng.randrange(len(sinks))
            s = sinks[pos]
            sid = list(s.sink_id)
            cpos = rng.randrange(len(sid))
            sid[cpos] = rng.choice([c for c in "abcdefghij" if c != sid[cpos]])
            sinks[pos] = SinkDecl("".join(sid), s.label, s.kind)
            tampered = dataclasses.replace(manifest, egress_sinks=tuple(sinks))
        quote = generate_quote(key, measure(tampered), report)
        with pytest.raises(UnknownMeasurement):
            verify_quote(store, quote, report)


def test_quote_rejects_short_report_data():
    key, measurement, _, _ = _quote_setup()
    with pytest.raises(ValueError):
        generate_quote(key, measurement, b"short")


def test_measurement_requires_32_bytes():
    with pytest.raises(InvalidManifest):
        Measurement(b"\x00" * 16)
