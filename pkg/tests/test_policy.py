"""Declassifiers, graph lints, and the audit chain."""

import copy
import dataclasses
import json
import os
import random
import struct

import pytest

from oracles import aggregate_oracle
from zkpuck.errors import (
    ChainFileError,
    EmptyIdentity,
    InvalidK,
    MalformedGraph,
)
from zkpuck.labels import DataLabel
from zkpuck.policy import (
    AggregateReport,
    AuditChain,
    AuditRecord,
    ComponentGraph,
    FlowEdge,
    Withheld,
    ZERO_HASH,
    aggregate_k,
    check_flows,
    format_findings,
    graph_from_dict,
    graph_to_dict,
    load_graph,
    pseudonymize,
    verify_chain_file,
)

KEY = bytes(range(32))
OTHER_KEY = bytes(range(1, 33))


# --- pseudonymize -------------------------------------------------------------

def test_pseudonymize_deterministic_and_key_separated():
    a = pseudonymize(b"alice@example.com", KEY)
    assert a == pseudonymize(b"alice@example.com", KEY)
    assert len(a) == 32
    assert a != pseudonymize(b"bob@example.com", KEY)
    assert a != pseudonymize(b"alice@example.com", OTHER_KEY)


def test_pseudonymize_rejects_bad_inputs():
    with pytest.raises(EmptyIdentity):
        pseudonymize(b"", KEY)
    with pytest.raises(ValueError):
        pseudonymize(b"x", b"short key")


def test_pseudonym_never_contains_identity_1000_random():
    rng = random.Random(0x1D)
    for _ in range(1000):
        identity = rng.randbytes(rng.randrange(4, 24))
        pseudonym = pseudonymize(identity, KEY)
        assert identity not in pseudonym
        assert pseudonym not in identity


# --- aggregate_k ---------------------------------------------------------------

def _p(n: int) -> bytes:
    return bytes([n]) * 32


def test_aggregate_k_rejects_small_k():
    for k in (-1, 0, 1):
        with pytest.raises(InvalidK):
            aggregate_k([(_p(1), 1)], k, 3)


def test_aggregate_k_worked_example():
    rows = [(_p(1), 3), (_p(2), 1), (_p(3), 4), (_p(4), 1), (_p(5), 5)]
    report = aggregate_k(rows, k=5, top_n=3)
    assert isinstance(report, AggregateReport)
    assert [total for _, total in report.rows] == [5, 4, 3]
    assert [p for p, _ in report.rows] == [_p(5), _p(3), _p(1)]


def test_aggregate_k_withholds_below_threshold():
    rows = [(_p(i), 10) for i in range(4)]
    assert isinstance(aggregate_k(rows, k=5, top_n=3), Withheld)
    # repeated rows for the same pseudonym do not add participants
    rows += [(_p(0), 99), (_p(1), 99)]
    assert isinstance(aggregate_k(rows, k=5, top_n=3), Withheld)
    rows.append((_p(4), 1))
    assert isinstance(aggregate_k(rows, k=5, top_n=10), AggregateReport)


def test_aggregate_k_groups_and_breaks_ties_by_pseudonym():
    rows = [(_p(2), 1), (_p(1), 2), (_p(2), 1), (_p(3), 2), (_p(4), 0), (_p(5), 0)]
    report = aggregate_k(rows, k=2, top_n=10)
    assert report.rows == (
        (_p(1), 2),
        (_p(2), 2),
        (_p(3), 2),
        (_p(4), 0),
        (_p(5), 0),
    )


def test_aggregate_k_matches_oracle_on_random_tables():
    rng = random.Random(0xA66)
    for _ in range(500):
        population = [_p(i) for i in range(rng.randrange(1, 12))]
        rows = [
            (rng.choice(population), rng.randrange(-5, 50))
            for _ in range(rng.randrange(1, 40))
        ]
        k = rng.randrange(2, 8)
        top_n = rng.randrange(1, 12)
        expected = aggregate_oracle(rows, k, top_n)
        got = aggregate_k(rows, k, top_n)
        if expected is None:
            assert isinstance(got, Withheld)
        else:
            assert isinstance(got, AggregateReport)
            assert list(got.rows) == expected


def test_aggregate_k_is_order_independent():
    rng = random.Random(7)
    rows = [(_p(i % 7), i * 3 % 11) for i in range(25)]
    baseline = aggregate_k(rows, k=5, top_n=5)
    for _ in range(10):
        shuffled = rows[:]
        rng.shuffle(shuffled)
        assert aggregate_k(shuffled, k=5, top_n=5) == baseline


# --- component graph -----------------------------------------------------------

def _graph_dict(fixtures_dir) -> dict:
    return json.loads((fixtures_dir / "graph-shufflepuck.json").read_text())


def test_reference_graph_loads_and_lints_clean(fixtures_dir):
    graph = load_graph(fixtures_dir / "graph-shufflepuck.json")
    assert check_flows(graph, k_min=5) == []


def test_graph_round_trip(fixtures_dir):
    graph = load_graph(fixtures_dir / "graph-shufflepuck.json")
    again = graph_from_dict(graph_to_dict(graph))
    assert again == graph


def test_graph_rejects_malformed(fixtures_dir):
    base = _graph_dict(fixtures_dir)

    unknown_target = copy.deepcopy(base)
    unknown_target["edges"][0]["to"] = "nowhere"
    with pytest.raises(MalformedGraph):
        graph_from_dict(unknown_target)

    undeclared_output = copy.deepcopy(base)
    undeclared_output["edges"][0]["label"] = "Public"
    with pytest.raises(MalformedGraph):
        graph_from_dict(undeclared_output)

    unaccepted_input = copy.deepcopy(base)
    undeclared = {"from": "shufflepuck-server", "to": "scoreboard-cdn",
                  "label": "PlayerMetric"}
    unaccepted_input["edges"].append(undeclared)
    with pytest.raises(MalformedGraph):
        graph_from_dict(unaccepted_input)

    missing_declassifier = copy.deepcopy(base)
    missing_declassifier["edges"][3]["via_declassifier"] = "Pseudonymize"
    with pytest.raises(MalformedGraph):
        graph_from_dict(missing_declassifier)

    duplicate_nodes = copy.deepcopy(base)
    duplicate_nodes["nodes"].append(copy.deepcopy(base["nodes"][0]))
    with pytest.raises(MalformedGraph):
        graph_from_dict(duplicate_nodes)

    missing_field = copy.deepcopy(base)
    del missing_field["edges"]
    with pytest.raises(MalformedGraph):
        graph_from_dict(missing_field)


def mutant_r1(base: dict) -> dict:
    out = copy.deepcopy(base)
    out["nodes"][1]["egress_sinks"][0]["label"] = "PlayerMetric"
    return out


def mutant_r2(base: dict) -> dict:
    out = copy.deepcopy(base)
    out["nodes"][2]["output_labels"].append("Pseudonymous")
    out["nodes"][1]["input_labels"].append("Pseudonymous")
    out["edges"].append(
        {"from": "scoreboard-cdn", "to": "shufflepuck-server", "label": "Pseudonymous"}
    )
    return out


def mutant_r3(base: dict) -> dict:
    out = copy.deepcopy(base)
    out["nodes"][1]["declassifiers"][1]["k"] = 2
    return out


def mutant_r4(base: dict) -> dict:
    out = copy.deepcopy(base)
    out["nodes"][1]["code_digest"] = ""
    return out


def mutant_r5(base: dict) -> dict:
    out = copy.deepcopy(base)
    out["nodes"][1]["egress_sinks"][1]["label"] = "PlayerMetric"
    return out


MUTANTS = {
    "R1": mutant_r1,
    "R2": mutant_r2,
    "R3": mutant_r3,
    "R4": mutant_r4,
    "R5": mutant_r5,
}


@pytest.mark.parametrize("rule_id", sorted(MUTANTS))
def test_each_mutant_trips_exactly_its_rule(fixtures_dir, rule_id):
    graph = graph_from_dict(MUTANTS[rule_id](_graph_dict(fixtures_dir)))
    findings = check_flows(graph, k_min=5)
    assert len(findings) == 1, format_findings(findings)
    assert findings[0].rule_id == rule_id
    assert findings[0].component_id == "shufflepuck-server"


def test_check_flows_order_independent(fixtures_dir):
    base = mutant_r1(mutant_r3(_graph_dict(fixtures_dir)))
    baseline = check_flows(graph_from_dict(base), k_min=5)
    assert [f.rule_id for f in baseline] == ["R1", "R3"]
    rng = random.Random(3)
    for _ in range(6):
        shuffled = copy.deepcopy(base)
        rng.shuffle(shuffled["nodes"])
        rng.shuffle(shuffled["edges"])
        assert check_flows(graph_from_dict(shuffled), k_min=5) == baseline


def test_k_min_parameter_moves_the_r3_line(fixtures_dir):
    graph = load_graph(fixtures_dir / "graph-shufflepuck.json")
    # reference declares k=5: clean at k_min 5, flagged at k_min 6
    assert check_flows(graph, k_min=5) == []
    findings = check_flows(graph, k_min=6)
    assert [f.rule_id for f in findings] == ["R3"]


def test_format_findings_layout():
    graph = ComponentGraph(nodes=(), edges=())
    assert format_findings(check_flows(graph)) == ""


# --- audit chain -----------------------------------------------------------------

def _build_chain(n: int) -> AuditChain:
    chain = AuditChain()
    for i in range(n):
        chain.append(
            "sink-" + str(i % 3),
            DataLabel(i % 6),
            b"payload %d" % i,
            timestamp_ms=1_700_000_000_000 + i,
        )
    return chain


def test_empty_chain_verifies():
    chain = AuditChain()
    assert chain.head_hash == ZERO_HASH
    assert chain.verify() is None


def test_chain_appends_link_and_verify_passes():
    chain = _build_chain(100)
    assert chain.verify() is None
    assert chain.records[0].prev_hash == ZERO_HASH
    for i in range(1, 100):
        import hashlib

        assert chain.records[i].prev_hash == hashlib.sha256(
            chain.records[i - 1].encode()
        ).digest()
    assert chain.records[41].index == 41


def test_mutating_record_42_breaks_link_43():
    chain = _build_chain(100)
    target = chain.records[42]
    digest = bytearray(target.payload_digest)
    digest[0] ^= 0x01
    chain.records[42] = dataclasses.replace(target, payload_digest=bytes(digest))
    # record 42 re-encodes differently, so the stored prev_hash of record 43
    # no longer matches; the first broken link is 43
    assert chain.verify() == 43


def test_mutating_last_record_blames_the_head():
    chain = _build_chain(10)
    target = chain.records[9]
    chain.records[9] = dataclasses.replace(target, timestamp_ms=target.timestamp_ms + 1)
    assert chain.verify() == 9


def test_every_single_record_mutation_is_caught():
    n = 30
    for i in range(n):
        chain = _build_chain(n)
        target = chain.records[i]
        digest = bytearray(target.payload_digest)
        digest[i % 32] ^= 0x80
        chain.records[i] = dataclasses.replace(target, payload_digest=bytes(digest))
        bad = chain.verify()
        assert bad is not None
        assert bad in (i, i + 1 if i + 1 < n else i)


def test_record_codec_round_trip():
    chain = _build_chain(5)
    for record in chain.records:
        assert AuditRecord.decode(record.encode()) == record
    with pytest.raises(ChainFileError):
        AuditRecord.decode(chain.records[0].encode()[:-1])
    with pytest.raises(ChainFileError):
        AuditRecord.decode(b"\x00" * 10)
    # label byte outside the enum
    raw = bytearray(chain.records[0].encode())
    raw[20 + len(chain.records[0].sink_id)] = 99
    with pytest.raises(ChainFileError):
        AuditRecord.decode(bytes(raw))


def test_chain_file_round_trip(tmp_path):
    chain = _build_chain(25)
    path = tmp_path / "audit.chain"
    chain.write_file(path)
    again = AuditChain.read_file(path)
    assert again.records == chain.records
    assert again.head_hash == chain.head_hash
    assert again.verify() is None
    assert verify_chain_file(path) is None


def test_chain_file_truncation_detected(tmp_path):
    chain = _build_chain(8)
    path = tmp_path / "audit.chain"
    chain.write_file(path)
    data = path.read_bytes()
    path.write_bytes(data[: len(data) // 2])
    with pytest.raises(ChainFileError):
        verify_chain_file(path)
    path.write_bytes(data + b"\x00")
    with pytest.raises(ChainFileError):
        verify_chain_file(path)
    path.write_bytes(data[:10])
    with pytest.raises(ChainFileError):
        verify_chain_file(path)


def test_chain_file_any_single_byte_flip_fails(tmp_path):
    """Every byte of the file is covered: flipping one bit anywhere must
    surface as structural damage or as a broken link at a computable index."""
    chain = _build_chain(12)
    path = tmp_path / "audit.chain"
    chain.write_file(path)
    data = path.read_bytes()

    # map each offset to the record whose serialized span contains it
    spans = []
    off = 0
    for i, record in enumerate(chain.records):
        enc_len = 4 + len(record.encode())
        spans.append((off, off + enc_len, i))
        off += enc_len
    footer_start = off

    rng = random.Random(0xF1)
    for pos in range(len(data)):
        flipped = bytearray(data)
        flipped[pos] ^= 1 << rng.randrange(8)
        path.write_bytes(bytes(flipped))
        try:
            bad = verify_chain_file(path)
        except ChainFileError:
            continue
        assert bad is not None, f"flip at offset {pos} went unnoticed"
        if pos >= footer_start:
            assert bad == len(chain.records) - 1
        else:
            owner = next(i for start, end, i in spans if start <= pos < end)
            assert bad in (owner, owner + 1), (pos, owner, bad)


def test_chain_file_missing(tmp_path):
    with pytest.raises(FileNotFoundError):
        verify_chain_file(tmp_path / "nope.chain")
