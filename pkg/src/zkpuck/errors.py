"""Exception types shared across the platform.

Every failure a caller is expected to branch on gets its own class; the
audit CLI maps these onto its exit-code contract (0 clean, 1 findings,
2 usage/IO, 3 attestation failure).
"""

from __future__ import annotations


class ZkpuckError(Exception):
    """Base class for all errors raised by this package."""


# --- enclave ---------------------------------------------------------------

class InvalidManifest(ZkpuckError):
    """A component manifest violates one of its declared invariants."""


class AttestationError(ZkpuckError):
    """Base class for quote verification failures."""


class UnknownPlatformKey(AttestationError):
    """Quote names a platform key the trust store does not contain."""


class BadSignature(AttestationError):
    """Platform signature does not verify over (measurement, report data)."""


class UnknownMeasurement(AttestationError):
    """Quoted measurement is not in the trust store's expected set."""


class ReportMismatch(AttestationError):
    """Quote's report data does not bind the current handshake (replay/stale)."""


# --- channel ---------------------------------------------------------------

class ProtocolError(ZkpuckError):
    """Malformed or unexpected wire message."""


class HandshakeAborted(ZkpuckError):
    """Client refused the session; wraps the underlying attestation error.

    No session keys exist after this, so no application data can be sent.
    """

    def __init__(self, reason: Exception):
        super().__init__(f"handshake aborted: {type(reason).__name__}: {reason}")
        self.reason = reason


class ChannelError(ZkpuckError):
    """Base class for sealed-frame failures."""


class AuthFailure(ChannelError):
    """Frame failed AEAD authentication (corruption or forgery)."""


class ReplayDetected(ChannelError):
    """Frame sequence number was already accepted."""


class SequenceGap(ChannelError):
    """Frame skipped ahead of the expected sequence number (hard failure)."""


class SequenceOverflow(ChannelError):
    """Sequence counter exhausted; the session must end."""


# --- policy ----------------------------------------------------------------

class EmptyIdentity(ZkpuckError):
    """Pseudonymization requires a non-empty identity."""


class InvalidK(ZkpuckError):
    """k-anonymous aggregation requires k >= 2."""


class MalformedGraph(ZkpuckError):
    """Component graph references unknown nodes or inconsistent labels."""


class ChainFileError(ZkpuckError):
    """Audit chain file is truncated or structurally unreadable."""


# --- shufflepuck -----------------------------------------------------------

class OutOfRange(ZkpuckError):
    """A shot or defense parameter is outside its declared range."""


class WrongPhase(ZkpuckError):
    """Match state transition attempted in the wrong phase."""


# --- server ----------------------------------------------------------------

class WrongRole(ZkpuckError):
    """The acting session is not the player this phase expects."""


class MatchFull(ZkpuckError):
    """Both slots of the match are already taken."""


class UnknownMatch(ZkpuckError):
    """No match room with the given id."""


class NotLoggedIn(ZkpuckError):
    """Application message sent before the login declassifier ran."""


class LintRefusal(ZkpuckError):
    """Server manifest linted dirty at startup; boot refused."""

    def __init__(self, findings):
        lines = "; ".join(f"{f.rule_id} {f.component_id}: {f.message}" for f in findings)
        super().__init__(f"manifest lints dirty, refusing to boot: {lines}")
        self.findings = list(findings)
