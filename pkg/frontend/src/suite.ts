// Cryptographic primitives on top of the runtime's built-in WebCrypto.
// Everything here must match the server suite bit for bit: SHA-256,
// HKDF-SHA256, AES-256-GCM with the tag appended to the ciphertext,
// Ed25519 signatures over raw messages, X25519 key agreement.

import { bytesEqual, concatBytes, hexToBytes } from "./bytes.js";

export const HASH_LEN = 32;
export const KEY_LEN = 32;
export const AEAD_NONCE_LEN = 12;

const subtle = globalThis.crypto.subtle;

export async function sha256(data: Uint8Array): Promise<Uint8Array> {
  return new Uint8Array(await subtle.digest("SHA-256", data as BufferSource));
}

export async function hkdfSha256(
  ikm: Uint8Array,
  salt: Uint8Array,
  info: Uint8Array,
  length: number
): Promise<Uint8Array> {
  const key = await subtle.importKey("raw", ikm as BufferSource, "HKDF", false, [
    "deriveBits",
  ]);
  const bits = await subtle.deriveBits(
    {
      name: "HKDF",
      hash: "SHA-256",
      salt: salt as BufferSource,
      info: info as BufferSource,
    },
    key,
    length * 8
  );
  return new Uint8Array(bits);
}

async function gcmKey(key: Uint8Array, usage: KeyUsage): Promise<CryptoKey> {
  if (key.length !== KEY_LEN) throw new Error("AEAD key must be 32 bytes");
  return subtle.importKey("raw", key as BufferSource, { name: "AES-GCM" }, false, [
    usage,
  ]);
}

export async function aeadSeal(
  key: Uint8Array,
  nonce: Uint8Array,
  plaintext: Uint8Array,
  ad: Uint8Array
): Promise<Uint8Array> {
  const k = await gcmKey(key, "encrypt");
  const ct = await subtle.encrypt(
    {
      name: "AES-GCM",
      iv: nonce as BufferSource,
      additionalData: ad as BufferSource,
    },
    k,
    plaintext as BufferSource
  );
  return new Uint8Array(ct);
}

export async function aeadOpen(
  key: Uint8Array,
  nonce: Uint8Array,
  ciphertext: Uint8Array,
  ad: Uint8Array
): Promise<Uint8Array | null> {
  const k = await gcmKey(key, "decrypt");
  try {
    const pt = await subtle.decrypt(
      {
        name: "AES-GCM",
        iv: nonce as BufferSource,
        additionalData: ad as BufferSource,
      },
      k,
      ciphertext as BufferSource
    );
    return new Uint8Array(pt);
  } catch {
    return null;
  }
}

export async function ed25519Verify(
  publicKey: Uint8Array,
  signature: Uint8Array,
  message: Uint8Array
): Promise<boolean> {
  if (publicKey.length !== 32) return false;
  let key: CryptoKey;
  try {
    key = await subtle.importKey(
      "raw",
      publicKey as BufferSource,
      { name: "Ed25519" },
      false,
      ["verify"]
    );
  } catch {
    return false;
  }
  return subtle.verify(
    { name: "Ed25519" },
    key,
    signature as BufferSource,
    message as BufferSource
  );
}

export interface KexKeyPair {
  privateKey: CryptoKey;
  publicRaw: Uint8Array;
}

export async function kexGenerate(): Promise<KexKeyPair> {
  const pair = (await subtle.generateKey({ name: "X25519" }, true, [
    "deriveBits",
  ])) as CryptoKeyPair;
  const pub = new Uint8Array(await subtle.exportKey("raw", pair.publicKey));
  return { privateKey: pair.privateKey, publicRaw: pub };
}

// WebCrypto imports raw X25519 seeds only via PKCS#8; this is the fixed
// DER prefix for a 32-byte curve25519 private key.
const X25519_PKCS8_PREFIX = hexToBytes("302e020100300506032b656e04220420");

// WebCrypto has no way to derive the public half from an imported private
// key, so seed-based construction (used by the golden tests) must be given
// the matching public key explicitly.
export async function kexFromSeed(
  seed: Uint8Array,
  publicRaw: Uint8Array
): Promise<KexKeyPair> {
  if (seed.length !== 32 || publicRaw.length !== 32) {
    throw new Error("X25519 seed and public key must be 32 bytes");
  }
  const pkcs8 = concatBytes(X25519_PKCS8_PREFIX, seed);
  const privateKey = await subtle.importKey(
    "pkcs8",
    pkcs8 as BufferSource,
    { name: "X25519" },
    false,
    ["deriveBits"]
  );
  return { privateKey, publicRaw };
}

export async function kexShared(
  pair: KexKeyPair,
  peerPublic: Uint8Array
): Promise<Uint8Array> {
  const pub = await subtle.importKey(
    "raw",
    peerPublic as BufferSource,
    { name: "X25519" },
    false,
    []
  );
  const bits = await subtle.deriveBits(
    { name: "X25519", public: pub },
    pair.privateKey,
    256
  );
  const shared = new Uint8Array(bits);
  // all-zero shared secret means a low-order peer key; refuse it
  if (bytesEqual(shared, new Uint8Array(32))) {
    throw new Error("degenerate X25519 shared secret");
  }
  return shared;
}

export function randomBytes(n: number): Uint8Array {
  const out = new Uint8Array(n);
  globalThis.crypto.getRandomValues(out);
  return out;
}
