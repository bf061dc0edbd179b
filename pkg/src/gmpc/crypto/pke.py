"""Public-key encryption for star mode: X25519 key agreement, HKDF-SHA256 and
AES-GCM. Ciphertext = ephemeral public key || nonce || sealed payload."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives import hashes, serialization
from cryptography.hazmat.primitives.asymmetric.x25519 import X25519PrivateKey, X25519PublicKey
from cryptography.hazmat.primitives.ciphers.aead import AESGCM
from cryptography.hazmat.primitives.kdf.hkdf import HKDF

_RAW = dict(encoding=serialization.Encoding.Raw, format=serialization.PublicFormat.Raw)
_NONCE = 12


@dataclass(frozen=True)
class EncKeypair:
    pk: bytes
    sk: bytes


def pke_gen(rng: np.random.Generator) -> EncKeypair:
    seed = rng.bytes(32)
    public = X25519PrivateKey.from_private_bytes(seed).public_key().public_bytes(**_RAW)
    return EncKeypair(pk=public, sk=seed)


def _key(shared: bytes, ephemeral: bytes, recipient: bytes) -> bytes:
    return HKDF(hashes.SHA256(), 32, salt=None, info=b"gmpc/pke" + ephemeral + recipient).derive(shared)


def pke_enc(pk: bytes, message: bytes, rng: np.random.Generator) -> bytes:
    ephemeral = X25519PrivateKey.from_private_bytes(rng.bytes(32))
    ephemeral_pk = ephemeral.public_key().public_bytes(**_RAW)
    key = _key(ephemeral.exchange(X25519PublicKey.from_public_bytes(pk)), ephemeral_pk, pk)
    nonce = rng.bytes(_NONCE)
    return ephemeral_pk + nonce + AESGCM(key).encrypt(nonce, message, None)


def pke_dec(sk: bytes, ciphertext: bytes) -> bytes | None:
    if len(ciphertext) < 32 + _NONCE + 16:
        return None
    private = X25519PrivateKey.from_private_bytes(sk)
    recipient = private.public_key().public_bytes(**_RAW)
    ephemeral_pk, nonce, body = ciphertext[:32], ciphertext[32:32 + _NONCE], ciphertext[32 + _NONCE:]
    try:
        key = _key(private.exchange(X25519PublicKey.from_public_bytes(ephemeral_pk)), ephemeral_pk, recipient)
        return AESGCM(key).decrypt(nonce, body, None)
    except (InvalidTag, ValueError):
        return None
