"""Pinned cryptographic suite, protocol version 1.

Everything that hashes, signs, seals, or derives keys goes through this
module so the whole protocol is fixed by one constant. Changing any
primitive here invalidates golden files and is a protocol version bump.

All primitives were chosen to be available in browser WebCrypto as well,
so non-Python clients can interoperate bit-exactly.
"""

from __future__ import annotations

import hashlib
import hmac

from cryptography.exceptions import InvalidSignature, InvalidTag
from cryptography.hazmat.primitives.ciphers.aead import AESGCM
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)
from cryptography.hazmat.primitives.asymmetric.x25519 import (
    X25519PrivateKey,
    X25519PublicKey,
)
from cryptography.hazmat.primitives.serialization import (
    Encoding,
    NoEncryption,
    PrivateFormat,
    PublicFormat,
)

SUITE_V1 = "sha256 / hmac-sha256 / hkdf-sha256 / x25519 / ed25519 / aes-256-gcm"

HASH_LEN = 32
KEY_LEN = 32
SIG_LEN = 64
GCM_NONCE_LEN = 12


def hash256(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()


def mac256(key: bytes, data: bytes) -> bytes:
    return hmac.new(key, data, hashlib.sha256).digest()


def hkdf_sha256(ikm: bytes, salt: bytes, info: bytes, length: int) -> bytes:
    """RFC 5869 extract-and-expand; sha256 via hmac, no backend objects."""
    prk = hmac.new(salt, ikm, hashlib.sha256).digest()
    okm = b""
    block = b""
    counter = 1
    while len(okm) < length:
        block = hmac.new(prk, block + info + bytes([counter]), hashlib.sha256).digest()
        okm += block
        counter += 1
    return okm[:length]


# --- signatures (ed25519, raw 32-byte keys) ---------------------------------

def sign_key_generate() -> Ed25519PrivateKey:
    return Ed25519PrivateKey.generate()

def sign_key_from_seed(seed: bytes) -> Ed25519PrivateKey:
    return Ed25519PrivateKey.from_private_bytes(seed)

def sign_key_seed(key: Ed25519PrivateKey) -> bytes:
    return key.private_bytes(Encoding.Raw, PrivateFormat.Raw, NoEncryption())

def sign_pub_bytes(key: Ed25519PrivateKey) -> bytes:
    return key.public_key().public_bytes(Encoding.Raw, PublicFormat.Raw)

def sign(key: Ed25519PrivateKey, message: bytes) -> bytes:
    return key.sign(message)

def verify(pub: bytes, signature: bytes, message: bytes) -> bool:
    try:
        Ed25519PublicKey.from_public_bytes(pub).verify(signature, message)
        return True
    except (InvalidSignature, ValueError):
        return False


# --- key agreement (x25519, raw 32-byte keys) --------------------------------

def kex_generate() -> X25519PrivateKey:
    return X25519PrivateKey.generate()

def kex_from_seed(seed: bytes) -> X25519PrivateKey:
    return X25519PrivateKey.from_private_bytes(seed)

def kex_pub_bytes(key: X25519PrivateKey) -> bytes:
    return key.public_key().public_bytes(Encoding.Raw, PublicFormat.Raw)

def kex_shared(key: X25519PrivateKey, peer_pub: bytes) -> bytes:
    return key.exchange(X25519PublicKey.from_public_bytes(peer_pub))


# --- AEAD (aes-256-gcm) ------------------------------------------------------

def aead_seal(key: bytes, nonce: bytes, plaintext: bytes, ad: bytes) -> bytes:
    return AESGCM(key).encrypt(nonce, plaintext, ad)

def aead_open(key: bytes, nonce: bytes, ciphertext: bytes, ad: bytes) -> bytes | None:
    """Returns plaintext, or None when authentication fails."""
    try:
        return AESGCM(key).decrypt(nonce, ciphertext, ad)
    except InvalidTag:
        return None
