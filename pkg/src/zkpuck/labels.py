"""Sensitivity labels and the flow declarations that move data between them.

The label set is a six-point total order, least sensitive first. Every
byte a component emits is tagged with one of these, and the only way a
flow may drop to a lower label is through a declared declassifier.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

from .errors import InvalidManifest


class DataLabel(IntEnum):
    """Total order: PUBLIC is bottom, PLAYER_IDENTITY is top."""

    PUBLIC = 0
    AGGREGATE = 1
    PSEUDONYMOUS = 2
    PLAYER_METRIC = 3
    RAW_INPUT = 4
    PLAYER_IDENTITY = 5

    @property
    def wire_name(self) -> str:
        return _LABEL_NAMES[self]


_LABEL_NAMES = {
    DataLabel.PUBLIC: "Public",
    DataLabel.AGGREGATE: "Aggregate",
    DataLabel.PSEUDONYMOUS: "Pseudonymous",
    DataLabel.PLAYER_METRIC: "PlayerMetric",
    DataLabel.RAW_INPUT: "RawInput",
    DataLabel.PLAYER_IDENTITY: "PlayerIdentity",
}
_LABELS_BY_NAME = {name: label for label, name in _LABEL_NAMES.items()}


def label_leq(a: DataLabel, b: DataLabel) -> bool:
    """True when a is at most as sensitive as b."""
    return a <= b


def label_from_name(name: str) -> DataLabel:
    try:
        return _LABELS_BY_NAME[name]
    except KeyError:
        raise InvalidManifest(f"unknown data label {name!r}") from None


class DeclassifierKind(IntEnum):
    PSEUDONYMIZE = 0
    AGGREGATE_K = 1

    @property
    def wire_name(self) -> str:
        return "Pseudonymize" if self is DeclassifierKind.PSEUDONYMIZE else "AggregateK"


def declassifier_kind_from_name(name: str) -> DeclassifierKind:
    if name == "Pseudonymize":
        return DeclassifierKind.PSEUDONYMIZE
    if name == "AggregateK":
        return DeclassifierKind.AGGREGATE_K
    raise InvalidManifest(f"unknown declassifier kind {name!r}")


@dataclass(frozen=True)
class DeclassifierDecl:
    """A declared, deliberate label-lowering step.

    Pseudonymize may only map PLAYER_IDENTITY to PSEUDONYMOUS; AggregateK
    may map any higher label to AGGREGATE and must carry k >= 2.
    """

    kind: DeclassifierKind
    input_label: DataLabel
    output_label: DataLabel
    k: int | None = None

    def __post_init__(self) -> None:
        if not self.output_label < self.input_label:
            raise InvalidManifest(
                f"declassifier output {self.output_label.wire_name} must be strictly "
                f"below input {self.input_label.wire_name}"
            )
        if self.kind is DeclassifierKind.PSEUDONYMIZE:
            if self.input_label is not DataLabel.PLAYER_IDENTITY:
                raise InvalidManifest("Pseudonymize input must be PlayerIdentity")
            if self.output_label is not DataLabel.PSEUDONYMOUS:
                raise InvalidManifest("Pseudonymize output must be Pseudonymous")
            if self.k is not None:
                raise InvalidManifest("Pseudonymize takes no k parameter")
        else:
            if self.output_label is not DataLabel.AGGREGATE:
                raise InvalidManifest("AggregateK output must be Aggregate")
            if self.k is None or self.k < 2:
                raise InvalidManifest("AggregateK requires k >= 2")


class SinkKind(IntEnum):
    NETWORK = 0
    PERSISTENCE = 1

    @property
    def wire_name(self) -> str:
        return "network" if self is SinkKind.NETWORK else "persistence"


def sink_kind_from_name(name: str) -> SinkKind:
    if name == "network":
        return SinkKind.NETWORK
    if name == "persistence":
        return SinkKind.PERSISTENCE
    raise InvalidManifest(f"unknown sink kind {name!r}")


@dataclass(frozen=True)
class SinkDecl:
    """A declared egress point: every byte leaving through it is audited."""

    sink_id: str
    label: DataLabel
    kind: SinkKind
