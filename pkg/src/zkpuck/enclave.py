"""Simulated trusted-execution platform.

A component's identity is the hash of its manifest's canonical encoding;
the manifest covers not just the code digest but the component's declared
data flows, so tampering with flow policy is as detectable as tampering
with code. Quotes are platform signatures binding a measurement to a
fresh handshake, verified against a local trust store.

The platform key is software-held: the guarantees here are protocol
level, and hardening the key against a hostile host is a separate
problem.
"""

from __future__ import annotations

import json
import re
import struct
from dataclasses import dataclass, field
from pathlib import Path

from . import suite
from .errors import (
    BadSignature,
    InvalidManifest,
    ReportMismatch,
    UnknownMeasurement,
    UnknownPlatformKey,
)
from .labels import (
    DataLabel,
    DeclassifierDecl,
    DeclassifierKind,
    SinkDecl,
    SinkKind,
    declassifier_kind_from_name,
    label_from_name,
    sink_kind_from_name,
)

_COMPONENT_ID_RE = re.compile(r"^[A-Za-z0-9_-]{1,64}$")


@dataclass(frozen=True)
class ComponentManifest:
    """Identity and declared data flows of one auditable compartment.

    code_digest is the 32-byte hash of the component's build artifact;
    it may be None for components nobody has measured yet (the lint
    layer flags those when they receive sensitive data).
    """

    component_id: str
    code_digest: bytes | None
    input_labels: frozenset[DataLabel]
    output_labels: frozenset[DataLabel]
    declassifiers: tuple[DeclassifierDecl, ...]
    egress_sinks: tuple[SinkDecl, ...]

    def __post_init__(self) -> None:
        if not _COMPONENT_ID_RE.match(self.component_id):
            raise InvalidManifest(
                f"component_id {self.component_id!r} must be 1-64 ASCII "
                "alphanumeric/-/_ characters"
            )
        if self.code_digest is not None and len(self.code_digest) != suite.HASH_LEN:
            raise InvalidManifest("code_digest must be exactly 32 bytes when present")
        # DeclassifierDecl validates its own monotonicity; nothing more here.

    def declassifier(self, kind: DeclassifierKind) -> DeclassifierDecl | None:
        for decl in self.declassifiers:
            if decl.kind is kind:
                return decl
        return None


@dataclass(frozen=True)
class Measurement:
    """256-bit identity of a manifest; equal iff the manifests encode equal."""

    digest: bytes

    def __post_init__(self) -> None:
        if len(self.digest) != suite.HASH_LEN:
            raise InvalidManifest("measurement must be 32 bytes")

    @property
    def hex(self) -> str:
        return self.digest.hex()


# --- canonical encoding ------------------------------------------------------
#
# Deterministic byte layout, fields in declared order. Variable-length
# strings/bytes carry a u32 LE length prefix; integers are fixed-width LE;
# sets are sorted by their encoded form; lists keep declared order.

def _enc_bytes(b: bytes) -> bytes:
    return struct.pack("<I", len(b)) + b


def _enc_str(s: str) -> bytes:
    return _enc_bytes(s.encode("ascii"))


def _enc_label_set(labels: frozenset[DataLabel]) -> bytes:
    encoded = sorted(bytes([label]) for label in labels)
    return struct.pack("<I", len(encoded)) + b"".join(encoded)


def _enc_declassifier(decl: DeclassifierDecl) -> bytes:
    out = bytes([decl.kind, decl.input_label, decl.output_label])
    if decl.kind is DeclassifierKind.AGGREGATE_K:
        out += struct.pack("<I", decl.k)
    return out


def _enc_sink(sink: SinkDecl) -> bytes:
    return _enc_str(sink.sink_id) + bytes([sink.label, sink.kind])


def canonical_encode(manifest: ComponentManifest) -> bytes:
    """Deterministic byte string a measurement can be taken over."""
    parts = [
        _enc_str(manifest.component_id),
        _enc_bytes(manifest.code_digest or b""),
        _enc_label_set(manifest.input_labels),
        _enc_label_set(manifest.output_labels),
        struct.pack("<I", len(manifest.declassifiers)),
        *(_enc_declassifier(d) for d in manifest.declassifiers),
        struct.pack("<I", len(manifest.egress_sinks)),
        *(_enc_sink(s) for s in manifest.egress_sinks),
    ]
    return b"".join(parts)


def measure(manifest: ComponentManifest) -> Measurement:
    return Measurement(suite.hash256(canonical_encode(manifest)))


# --- manifest JSON -----------------------------------------------------------

def manifest_from_dict(obj: dict) -> ComponentManifest:
    try:
        component_id = obj["component_id"]
        digest_hex = obj["code_digest"]
        input_labels = frozenset(label_from_name(n) for n in obj["input_labels"])
        output_labels = frozenset(label_from_name(n) for n in obj["output_labels"])
        declassifiers = tuple(
            DeclassifierDecl(
                kind=declassifier_kind_from_name(d["kind"]),
                input_label=label_from_name(d["input_label"]),
                output_label=label_from_name(d["output_label"]),
                k=d.get("k"),
            )
            for d in obj["declassifiers"]
        )
        sinks = tuple(
            SinkDecl(
                sink_id=s["sink_id"],
                label=label_from_name(s["label"]),
                kind=sink_kind_from_name(s["kind"]),
            )
            for s in obj["egress_sinks"]
        )
    except InvalidManifest:
        raise
    except (KeyError, TypeError) as exc:
        raise InvalidManifest(f"manifest missing or malformed field: {exc}") from exc
    try:
        code_digest = bytes.fromhex(digest_hex) if digest_hex else None
    except ValueError as exc:
        raise InvalidManifest("code_digest must be lowercase hex") from exc
    if not all(s.sink_id and len(s.sink_id) <= 64 for s in sinks):
        raise InvalidManifest("sink_id must be a non-empty string of at most 64 bytes")
    return ComponentManifest(
        component_id=component_id,
        code_digest=code_digest,
        input_labels=input_labels,
        output_labels=output_labels,
        declassifiers=declassifiers,
        egress_sinks=sinks,
    )


def manifest_to_dict(manifest: ComponentManifest) -> dict:
    return {
        "component_id": manifest.component_id,
        "code_digest": manifest.code_digest.hex() if manifest.code_digest else "",
        "input_labels": sorted(l.wire_name for l in manifest.input_labels),
        "output_labels": sorted(l.wire_name for l in manifest.output_labels),
        "declassifiers": [
            {
                "kind": d.kind.wire_name,
                "input_label": d.input_label.wire_name,
                "output_label": d.output_label.wire_name,
                **({"k": d.k} if d.k is not None else {}),
            }
            for d in manifest.declassifiers
        ],
        "egress_sinks": [
            {"sink_id": s.sink_id, "label": s.label.wire_name, "kind": s.kind.wire_name}
            for s in manifest.egress_sinks
        ],
    }


def load_manifest(path: str | Path) -> ComponentManifest:
    try:
        obj = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidManifest(f"cannot read manifest {path}: {exc}") from exc
    return manifest_from_dict(obj)


# --- quotes ------------------------------------------------------------------

@dataclass(frozen=True)
class AttestationQuote:
    """Platform-signed statement: this measured component answered this handshake."""

    measurement: Measurement
    report_data: bytes
    platform_signature: bytes
    platform_key_id: str


@dataclass(frozen=True)
class PlatformKey:
    """Software stand-in for the platform's quote-signing key."""

    key_id: str
    signing_key: object  # Ed25519PrivateKey

    @classmethod
    def generate(cls, key_id: str) -> "PlatformKey":
        return cls(key_id=key_id, signing_key=suite.sign_key_generate())

    @classmethod
    def from_seed(cls, key_id: str, seed: bytes) -> "PlatformKey":
        return cls(key_id=key_id, signing_key=suite.sign_key_from_seed(seed))

    @property
    def public_bytes(self) -> bytes:
        return suite.sign_pub_bytes(self.signing_key)

    @property
    def seed(self) -> bytes:
        return suite.sign_key_seed(self.signing_key)


def load_platform_key(path: str | Path) -> PlatformKey:
    obj = json.loads(Path(path).read_text())
    return PlatformKey.from_seed(obj["key_id"], bytes.fromhex(obj["private_key"]))


def save_platform_key(key: PlatformKey, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps({"key_id": key.key_id, "private_key": key.seed.hex()}, indent=2)
        + "\n"
    )


def generate_quote(
    platform_key: PlatformKey, measurement: Measurement, report_data: bytes
) -> AttestationQuote:
    if len(report_data) != suite.HASH_LEN:
        raise ValueError("report_data must be 32 bytes")
    signature = suite.sign(platform_key.signing_key, measurement.digest + report_data)
    return AttestationQuote(
        measurement=measurement,
        report_data=report_data,
        platform_signature=signature,
        platform_key_id=platform_key.key_id,
    )


@dataclass(frozen=True)
class VerifiedIdentity:
    measurement: Measurement


@dataclass(frozen=True)
class TrustStore:
    """What a client is willing to talk to: platform keys and measurements."""

    platform_keys: dict[str, bytes] = field(default_factory=dict)
    expected_measurements: frozenset[Measurement] = frozenset()

    def to_json(self) -> str:
        obj = {
            "platform_keys": {
                kid: pub.hex() for kid, pub in sorted(self.platform_keys.items())
            },
            "expected_measurements": sorted(
                m.hex for m in self.expected_measurements
            ),
        }
        return json.dumps(obj, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "TrustStore":
        obj = json.loads(text)
        return cls(
            platform_keys={
                kid: bytes.fromhex(pub) for kid, pub in obj["platform_keys"].items()
            },
            expected_measurements=frozenset(
                Measurement(bytes.fromhex(h)) for h in obj["expected_measurements"]
            ),
        )

    @classmethod
    def load(cls, path: str | Path) -> "TrustStore":
        return cls.from_json(Path(path).read_text())

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json())


def verify_quote(
    store: TrustStore, quote: AttestationQuote, expected_report_data: bytes
) -> VerifiedIdentity:
    """Accept the quote iff key known, signature valid, measurement expected,
    and report data matches this handshake. Checked in that order."""
    pub = store.platform_keys.get(quote.platform_key_id)
    if pub is None:
        raise UnknownPlatformKey(f"platform key {quote.platform_key_id!r} not trusted")
    signed = quote.measurement.digest + quote.report_data
    if not suite.verify(pub, quote.platform_signature, signed):
        raise BadSignature("platform signature does not verify")
    if quote.measurement not in store.expected_measurements:
        raise UnknownMeasurement(
            f"measurement {quote.measurement.hex} is not an expected component"
        )
    if quote.report_data != expected_report_data:
        raise ReportMismatch("quote does not bind this handshake's transcript")
    return VerifiedIdentity(measurement=quote.measurement)
