// Trust store and quote verification: the client half of attestation.
// A quote is accepted only if the platform key is known, the signature
// verifies, the measurement is expected, and the report data binds this
// exact handshake. Checked in that order.

import { bytesEqual, bytesToHex, concatBytes, hexToBytes } from "./bytes.js";
import {
  BadSignature,
  ReportMismatch,
  UnknownMeasurement,
  UnknownPlatformKey,
} from "./errors.js";
import { HASH_LEN, ed25519Verify } from "./suite.js";

export interface AttestationQuote {
  measurementDigest: Uint8Array;
  reportData: Uint8Array;
  platformSignature: Uint8Array;
  platformKeyId: string;
}

export interface TrustStore {
  platformKeys: Map<string, Uint8Array>;
  /** Hex digests of acceptable component measurements. */
  expectedMeasurements: Set<string>;
}

export interface TrustStoreJson {
  platform_keys: Record<string, string>;
  expected_measurements: string[];
}

export function parseTrustStore(obj: TrustStoreJson): TrustStore {
  const keys = new Map<string, Uint8Array>();
  for (const [kid, pubHex] of Object.entries(obj.platform_keys)) {
    const pub = hexToBytes(pubHex);
    if (pub.length !== 32) throw new Error(`platform key ${kid} must be 32 bytes`);
    keys.set(kid, pub);
  }
  const measurements = new Set<string>();
  for (const hex of obj.expected_measurements) {
    if (hexToBytes(hex).length !== HASH_LEN) {
      throw new Error("measurement digest must be 32 bytes");
    }
    measurements.add(hex.toLowerCase());
  }
  return { platformKeys: keys, expectedMeasurements: measurements };
}

/** Returns the verified measurement digest as lowercase hex. */
export async function verifyQuote(
  store: TrustStore,
  quote: AttestationQuote,
  expectedReportData: Uint8Array
): Promise<string> {
  const pub = store.platformKeys.get(quote.platformKeyId);
  if (pub === undefined) {
    throw new UnknownPlatformKey(
      `platform key '${quote.platformKeyId}' not trusted`
    );
  }
  const signed = concatBytes(quote.measurementDigest, quote.reportData);
  if (!(await ed25519Verify(pub, quote.platformSignature, signed))) {
    throw new BadSignature("platform signature does not verify");
  }
  const hex = bytesToHex(quote.measurementDigest);
  if (!store.expectedMeasurements.has(hex)) {
    throw new UnknownMeasurement(
      `measurement ${hex} is not an expected component`
    );
  }
  if (!bytesEqual(quote.reportData, expectedReportData)) {
    throw new ReportMismatch("quote does not bind this handshake's transcript");
  }
  return hex;
}
