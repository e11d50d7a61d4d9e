// Sealed channel: handshake payloads, key schedule, and AEAD frames.
// Byte layouts are pinned by fixtures/channel-golden.json, which the
// server package's tests verify against the same implementation it runs.

import {
  concatBytes,
  decodeUtf8,
  encodeUtf8,
  readU32le,
  readU64le,
  u32le,
  u64le,
} from "./bytes.js";
import { AttestationQuote, TrustStore, verifyQuote } from "./enclave.js";
import {
  AttestationError,
  AuthFailure,
  HandshakeAborted,
  ProtocolError,
  ReplayDetected,
  SequenceGap,
  SequenceOverflow,
} from "./errors.js";
import {
  HASH_LEN,
  KEY_LEN,
  KexKeyPair,
  aeadOpen,
  aeadSeal,
  hkdfSha256,
  kexGenerate,
  kexShared,
  randomBytes,
  sha256,
} from "./suite.js";

export const C2S = 0;
export const S2C = 1;

export const NONCE_LEN = 32;
export const MAX_SEQ = (1n << 64n) - 1n;
export const KDF_INFO = encodeUtf8("zkpuck-channel-v1");

export interface SessionKeys {
  keyC2s: Uint8Array;
  keyS2c: Uint8Array;
  sendSeq: bigint;
  recvSeq: bigint;
  transcriptHash: Uint8Array;
}

export interface Frame {
  seq: bigint;
  ciphertext: Uint8Array;
}

export function encodeFrame(frame: Frame): Uint8Array {
  return concatBytes(u64le(frame.seq), frame.ciphertext);
}

export function decodeFrame(data: Uint8Array): Frame {
  if (data.length < 8) throw new ProtocolError("frame truncated");
  return { seq: readU64le(data, 0), ciphertext: data.subarray(8) };
}

export interface ParsedAttest {
  serverEphPub: Uint8Array;
  quote: AttestationQuote;
}

// server_eph_pub(32) || measurement(32) || report_data(32)
// || u32 siglen || sig || u32 kidlen || kid(ascii)
export function parseAttest(payload: Uint8Array): ParsedAttest {
  const fixed = KEY_LEN + HASH_LEN + HASH_LEN;
  if (payload.length < fixed + 8) {
    throw new ProtocolError("attestation payload truncated");
  }
  const serverEphPub = payload.subarray(0, KEY_LEN);
  const measurement = payload.subarray(KEY_LEN, KEY_LEN + HASH_LEN);
  const reportData = payload.subarray(KEY_LEN + HASH_LEN, fixed);
  let off = fixed;
  const sigLen = readU32le(payload, off);
  off += 4;
  if (payload.length < off + sigLen + 4) {
    throw new ProtocolError("attestation payload truncated");
  }
  const sig = payload.subarray(off, off + sigLen);
  off += sigLen;
  const kidLen = readU32le(payload, off);
  off += 4;
  if (payload.length !== off + kidLen) {
    throw new ProtocolError("attestation payload length mismatch");
  }
  const kid = decodeUtf8(payload.subarray(off));
  return {
    serverEphPub,
    quote: {
      measurementDigest: measurement,
      reportData,
      platformSignature: sig,
      platformKeyId: kid,
    },
  };
}

async function deriveKeys(
  shared: Uint8Array,
  transcriptHash: Uint8Array
): Promise<SessionKeys> {
  const okm = await hkdfSha256(shared, transcriptHash, KDF_INFO, 64);
  return {
    keyC2s: okm.subarray(0, 32),
    keyS2c: okm.subarray(32),
    sendSeq: 0n,
    recvSeq: 0n,
    transcriptHash,
  };
}

export interface HandshakeOptions {
  nonce?: Uint8Array;
  keypair?: KexKeyPair;
}

export class ClientHandshake {
  readonly nonce: Uint8Array;
  readonly helloPayload: Uint8Array;
  private readonly keypair: KexKeyPair;
  /** Verified measurement digest hex, set by finish(). */
  measurementHex: string | null = null;

  private constructor(nonce: Uint8Array, keypair: KexKeyPair) {
    this.nonce = nonce;
    this.keypair = keypair;
    this.helloPayload = concatBytes(nonce, keypair.publicRaw);
  }

  static async create(opts: HandshakeOptions = {}): Promise<ClientHandshake> {
    const nonce = opts.nonce ?? randomBytes(NONCE_LEN);
    if (nonce.length !== NONCE_LEN) throw new Error("nonce must be 32 bytes");
    const keypair = opts.keypair ?? (await kexGenerate());
    return new ClientHandshake(nonce, keypair);
  }

  /**
   * Verify the attestation payload and derive session keys. Throws
   * HandshakeAborted wrapping the attestation failure; no key material
   * exists unless the quote checked out.
   */
  async finish(
    attestPayload: Uint8Array,
    store: TrustStore
  ): Promise<SessionKeys> {
    const attest = parseAttest(attestPayload);
    const expectedReport = await sha256(
      concatBytes(this.nonce, this.keypair.publicRaw, attest.serverEphPub)
    );
    try {
      this.measurementHex = await verifyQuote(store, attest.quote, expectedReport);
    } catch (err) {
      if (err instanceof AttestationError) throw new HandshakeAborted(err);
      throw err;
    }
    const shared = await kexShared(this.keypair, attest.serverEphPub);
    const transcript = await sha256(
      concatBytes(this.helloPayload, attestPayload)
    );
    return deriveKeys(shared, transcript);
  }
}

function nonceFor(seq: bigint): Uint8Array {
  return concatBytes(u64le(seq), new Uint8Array(4));
}

function keyFor(keys: SessionKeys, direction: number): Uint8Array {
  return direction === C2S ? keys.keyC2s : keys.keyS2c;
}

function adFor(seq: bigint, direction: number): Uint8Array {
  return concatBytes(u64le(seq), Uint8Array.of(direction));
}

export async function seal(
  keys: SessionKeys,
  direction: number,
  plaintext: Uint8Array
): Promise<Frame> {
  if (keys.sendSeq >= MAX_SEQ) throw new SequenceOverflow("send counter exhausted");
  const seq = keys.sendSeq;
  const ciphertext = await aeadSeal(
    keyFor(keys, direction),
    nonceFor(seq),
    plaintext,
    adFor(seq, direction)
  );
  keys.sendSeq = seq + 1n;
  return { seq, ciphertext };
}

/** Accept exactly the next expected sequence number, then advance it. */
export async function openFrame(
  keys: SessionKeys,
  direction: number,
  frame: Frame
): Promise<Uint8Array> {
  if (frame.seq < keys.recvSeq) {
    throw new ReplayDetected(`frame seq ${frame.seq} already accepted`);
  }
  if (frame.seq > keys.recvSeq) {
    throw new SequenceGap(`expected seq ${keys.recvSeq}, got ${frame.seq}`);
  }
  const plaintext = await aeadOpen(
    keyFor(keys, direction),
    nonceFor(frame.seq),
    frame.ciphertext,
    adFor(frame.seq, direction)
  );
  if (plaintext === null) {
    throw new AuthFailure(`frame seq ${frame.seq} failed authentication`);
  }
  keys.recvSeq = frame.seq + 1n;
  return plaintext;
}
