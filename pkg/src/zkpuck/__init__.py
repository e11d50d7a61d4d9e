"""Attested shufflepuck platform: measured components, sealed channels,
flow-labeled egress, and a tamper-evident audit trail."""

__version__ = "0.1.0"
