"""Flow policy: declassifiers, graph lints, and the tamper-evident egress log.

Data may only drop to a lower sensitivity label through one of two
declared declassifiers: keyed irreversible pseudonymization of
identities, or k-anonymous aggregation that withholds output entirely
below a participation threshold. A small fixed rule set lints component
graphs for the flow patterns that defeat those protections, and every
egress event is chained into an append-only hash log so an auditor can
replay exactly what left the system.
"""

from __future__ import annotations

import json
import struct
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import suite
from .enclave import ComponentManifest, manifest_from_dict, manifest_to_dict
from .errors import (
    ChainFileError,
    EmptyIdentity,
    InvalidK,
    InvalidManifest,
    MalformedGraph,
)
from .labels import (
    DataLabel,
    DeclassifierKind,
    SinkKind,
    label_from_name,
    label_leq,
)

DEFAULT_K_MIN = 5
ZERO_HASH = bytes(suite.HASH_LEN)


# --- declassifiers -----------------------------------------------------------

def pseudonymize(identity: bytes, pseudonym_key: bytes) -> bytes:
    """Keyed irreversible hash of an identity: stable per key, unlinkable across keys."""
    if not identity:
        raise EmptyIdentity("identity must be non-empty")
    if len(pseudonym_key) != suite.KEY_LEN:
        raise ValueError("pseudonym key must be 32 bytes")
    return suite.mac256(pseudonym_key, identity)


@dataclass(frozen=True)
class AggregateReport:
    """Ranked (pseudonym, total) rows; released only above the k threshold."""

    rows: tuple[tuple[bytes, int], ...]


@dataclass(frozen=True)
class Withheld:
    """Too few distinct participants; nothing is released, not even a count."""


def aggregate_k(
    rows: list[tuple[bytes, int]], k: int, top_n: int
) -> AggregateReport | Withheld:
    """Sum scores per pseudonym; release the top_n only with >= k participants.

    Ties order by score descending then pseudonym bytes ascending, so the
    output is a pure function of the row multiset.
    """
    if k < 2:
        raise InvalidK(f"k must be at least 2, got {k}")
    totals: dict[bytes, int] = {}
    for pseudonym, score in rows:
        totals[pseudonym] = totals.get(pseudonym, 0) + score
    if len(totals) < k:
        return Withheld()
    ranked = sorted(totals.items(), key=lambda item: (-item[1], item[0]))
    return AggregateReport(rows=tuple(ranked[:top_n]))


# --- component graph + lints -------------------------------------------------

@dataclass(frozen=True)
class FlowEdge:
    from_id: str
    to_id: str
    label: DataLabel
    via_declassifier: str | None = None


@dataclass(frozen=True)
class ComponentGraph:
    nodes: tuple[ComponentManifest, ...]
    edges: tuple[FlowEdge, ...]

    def __post_init__(self) -> None:
        by_id: dict[str, ComponentManifest] = {}
        for node in self.nodes:
            if node.component_id in by_id:
                raise MalformedGraph(f"duplicate component {node.component_id!r}")
            by_id[node.component_id] = node
        for edge in self.edges:
            sender = by_id.get(edge.from_id)
            receiver = by_id.get(edge.to_id)
            if sender is None or receiver is None:
                raise MalformedGraph(
                    f"edge {edge.from_id} -> {edge.to_id} references unknown component"
                )
            if edge.label not in sender.output_labels:
                raise MalformedGraph(
                    f"{edge.from_id} does not declare output label {edge.label.wire_name}"
                )
            if edge.label not in receiver.input_labels:
                raise MalformedGraph(
                    f"{edge.to_id} does not accept input label {edge.label.wire_name}"
                )
            if edge.via_declassifier is not None:
                decl = next(
                    (
                        d
                        for d in sender.declassifiers
                        if d.kind.wire_name == edge.via_declassifier
                    ),
                    None,
                )
                if decl is None:
                    raise MalformedGraph(
                        f"{edge.from_id} declares no {edge.via_declassifier} declassifier"
                    )
                if decl.output_label is not edge.label:
                    raise MalformedGraph(
                        f"edge label {edge.label.wire_name} does not match "
                        f"{edge.via_declassifier} output"
                    )

    def node(self, component_id: str) -> ComponentManifest:
        for n in self.nodes:
            if n.component_id == component_id:
                return n
        raise MalformedGraph(f"no component {component_id!r}")


@dataclass(frozen=True)
class LintFinding:
    rule_id: str
    component_id: str
    message: str


def check_flows(graph: ComponentGraph, k_min: int = DEFAULT_K_MIN) -> list[LintFinding]:
    """Fixed rule set over declared flows. Deterministic and order-independent:
    permuting nodes or edges yields the same sorted finding list.

    R1 RawEgress            network sink at PlayerMetric or above
    R2 KeyColocation        pseudonym-key holder also receives pseudonymous data
    R3 WeakAggregation      AggregateK below the configured k floor
    R4 UnmeasuredSensitive  unmeasured component receives Pseudonymous or above
    R5 PersistentRaw        persistence sink at PlayerMetric or above

    A persistence sink at a sensitive label is R5's alone (not also R1):
    each rule owns one disjoint failure pattern so a single defect maps
    to a single finding.
    """
    findings: set[LintFinding] = set()
    inbound: dict[str, set[DataLabel]] = {n.component_id: set() for n in graph.nodes}
    for edge in graph.edges:
        inbound[edge.to_id].add(edge.label)

    for node in graph.nodes:
        cid = node.component_id
        for sink in node.egress_sinks:
            sensitive = label_leq(DataLabel.PLAYER_METRIC, sink.label)
            if sink.kind is SinkKind.NETWORK and sensitive:
                findings.add(
                    LintFinding(
                        "R1",
                        cid,
                        f"network sink {sink.sink_id!r} egresses "
                        f"{sink.label.wire_name} with no declassifier on the path",
                    )
                )
            if sink.kind is SinkKind.PERSISTENCE and sensitive:
                findings.add(
                    LintFinding(
                        "R5",
                        cid,
                        f"persistence sink {sink.sink_id!r} stores {sink.label.wire_name}",
                    )
                )
        holds_key = node.declassifier(DeclassifierKind.PSEUDONYMIZE) is not None
        if holds_key and DataLabel.PSEUDONYMOUS in inbound[cid]:
            findings.add(
                LintFinding(
                    "R2",
                    cid,
                    "holds the pseudonym key and receives Pseudonymous data "
                    "(re-linkable)",
                )
            )
        for decl in node.declassifiers:
            if decl.kind is DeclassifierKind.AGGREGATE_K and decl.k < k_min:
                findings.add(
                    LintFinding(
                        "R3",
                        cid,
                        f"AggregateK k={decl.k} is below the required minimum {k_min}",
                    )
                )
        receives_sensitive = any(
            label_leq(DataLabel.PSEUDONYMOUS, label) for label in inbound[cid]
        )
        if receives_sensitive and node.code_digest is None:
            findings.add(
                LintFinding(
                    "R4",
                    cid,
                    "receives Pseudonymous-or-higher data but has no code digest "
                    "to attest",
                )
            )
    return sorted(findings, key=lambda f: (f.rule_id, f.component_id, f.message))


def format_findings(findings: list[LintFinding]) -> str:
    """One finding per line: RULE_ID<TAB>component<TAB>message."""
    return "\n".join(f"{f.rule_id}\t{f.component_id}\t{f.message}" for f in findings)


def graph_from_dict(obj: dict) -> ComponentGraph:
    try:
        nodes = tuple(manifest_from_dict(n) for n in obj["nodes"])
        edges = tuple(
            FlowEdge(
                from_id=e["from"],
                to_id=e["to"],
                label=label_from_name(e["label"]),
                via_declassifier=e.get("via_declassifier"),
            )
            for e in obj["edges"]
        )
    except InvalidManifest:
        raise
    except (KeyError, TypeError) as exc:
        raise MalformedGraph(f"graph missing or malformed field: {exc}") from exc
    return ComponentGraph(nodes=nodes, edges=edges)


def graph_to_dict(graph: ComponentGraph) -> dict:
    return {
        "nodes": [manifest_to_dict(n) for n in graph.nodes],
        "edges": [
            {
                "from": e.from_id,
                "to": e.to_id,
                "label": e.label.wire_name,
                **(
                    {"via_declassifier": e.via_declassifier}
                    if e.via_declassifier
                    else {}
                ),
            }
            for e in graph.edges
        ],
    }


def load_graph(path: str | Path) -> ComponentGraph:
    try:
        obj = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedGraph(f"cannot read graph {path}: {exc}") from exc
    return graph_from_dict(obj)


# --- audit chain ---------------------------------------------------------------

@dataclass(frozen=True)
class AuditRecord:
    """One egress event: what left, through which sink, at which label."""

    index: int
    timestamp_ms: int
    sink_id: str
    label: DataLabel
    payload_digest: bytes
    prev_hash: bytes

    def encode(self) -> bytes:
        sink = self.sink_id.encode("ascii")
        return (
            struct.pack("<QQI", self.index, self.timestamp_ms, len(sink))
            + sink
            + bytes([self.label])
            + self.payload_digest
            + self.prev_hash
        )

    @classmethod
    def decode(cls, data: bytes) -> "AuditRecord":
        if len(data) < 20 + 1 + 2 * suite.HASH_LEN:
            raise ChainFileError("audit record too short")
        index, timestamp_ms, sink_len = struct.unpack_from("<QQI", data)
        off = 20
        if len(data) != off + sink_len + 1 + 2 * suite.HASH_LEN:
            raise ChainFileError("audit record length mismatch")
        try:
            sink_id = data[off : off + sink_len].decode("ascii")
            off += sink_len
            label = DataLabel(data[off])
        except (UnicodeDecodeError, ValueError) as exc:
            raise ChainFileError(f"audit record fields unreadable: {exc}") from exc
        off += 1
        payload_digest = data[off : off + suite.HASH_LEN]
        prev_hash = data[off + suite.HASH_LEN :]
        return cls(index, timestamp_ms, sink_id, label, payload_digest, prev_hash)


class AuditChain:
    """Append-only hash chain over egress records; single writer, many verifiers."""

    def __init__(self) -> None:
        self.records: list[AuditRecord] = []
        self.head_hash: bytes = ZERO_HASH

    def append(
        self,
        sink_id: str,
        label: DataLabel,
        payload: bytes,
        timestamp_ms: int | None = None,
    ) -> AuditRecord:
        if timestamp_ms is None:
            timestamp_ms = time.time_ns() // 1_000_000
        record = AuditRecord(
            index=len(self.records),
            timestamp_ms=timestamp_ms,
            sink_id=sink_id,
            label=label,
            payload_digest=suite.hash256(payload),
            prev_hash=self.head_hash if self.records else ZERO_HASH,
        )
        self.records.append(record)
        self.head_hash = suite.hash256(record.encode())
        return record

    def verify(self) -> int | None:
        """None when every link holds; otherwise the first broken index."""
        prev = ZERO_HASH
        for i, record in enumerate(self.records):
            if record.index != i or record.prev_hash != prev:
                return i
            prev = suite.hash256(record.encode())
        if prev != self.head_hash:
            # Head footer disagrees with the last intact record (or with
            # emptiness); blame the final link.
            return max(len(self.records) - 1, 0)
        return None

    def write_file(self, path: str | Path) -> None:
        blob = bytearray()
        for record in self.records:
            enc = record.encode()
            blob += struct.pack("<I", len(enc)) + enc
        blob += self.head_hash
        Path(path).write_bytes(bytes(blob))

    @classmethod
    def read_file(cls, path: str | Path) -> "AuditChain":
        data = Path(path).read_bytes()
        if len(data) < suite.HASH_LEN:
            raise ChainFileError("chain file shorter than its head footer")
        chain = cls.__new__(cls)
        chain.records = []
        off = 0
        while off < len(data) - suite.HASH_LEN:
            if off + 4 > len(data) - suite.HASH_LEN:
                raise ChainFileError(f"dangling bytes before footer at offset {off}")
            (rec_len,) = struct.unpack_from("<I", data, off)
            off += 4
            if off + rec_len > len(data) - suite.HASH_LEN:
                raise ChainFileError(f"record at offset {off - 4} overruns the footer")
            chain.records.append(AuditRecord.decode(data[off : off + rec_len]))
            off += rec_len
        chain.head_hash = data[-suite.HASH_LEN :]
        return chain


def verify_chain_file(path: str | Path) -> int | None:
    """Read and verify; ChainFileError for structural damage, index for link breaks."""
    return AuditChain.read_file(path).verify()
