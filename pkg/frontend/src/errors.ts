// Error taxonomy mirroring the server package, so the badge can show the
// same names the protocol documentation uses. The `name` field is what the
// UI renders after "Rejected:".

export class ProtocolError extends Error {
  override name = "ProtocolError";
}

export class AttestationError extends Error {
  override name = "AttestationError";
}

export class UnknownPlatformKey extends AttestationError {
  override name = "UnknownPlatformKey";
}

export class BadSignature extends AttestationError {
  override name = "BadSignature";
}

export class UnknownMeasurement extends AttestationError {
  override name = "UnknownMeasurement";
}

export class ReportMismatch extends AttestationError {
  override name = "ReportMismatch";
}

export class HandshakeAborted extends Error {
  override name = "HandshakeAborted";
  constructor(public reason: Error) {
    super(`handshake aborted: ${reason.name}: ${reason.message}`);
  }
}

export class ChannelError extends Error {
  override name = "ChannelError";
}

export class AuthFailure extends ChannelError {
  override name = "AuthFailure";
}

export class ReplayDetected extends ChannelError {
  override name = "ReplayDetected";
}

export class SequenceGap extends ChannelError {
  override name = "SequenceGap";
}

export class SequenceOverflow extends ChannelError {
  override name = "SequenceOverflow";
}

// Connection-level failures before any handshake byte is exchanged.
export class Unreachable extends Error {
  override name = "unreachable";
}

export class ConnectTimeout extends Error {
  override name = "timeout";
}
