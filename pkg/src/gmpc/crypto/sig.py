"""Ed25519 signatures with keys derived deterministically from the caller's rng."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives import serialization
from cryptography.hazmat.primitives.asymmetric.ed25519 import Ed25519PrivateKey, Ed25519PublicKey

KEY_BITS = 256
_RAW = dict(encoding=serialization.Encoding.Raw, format=serialization.PublicFormat.Raw)


@dataclass(frozen=True)
class SigKeypair:
    pk: bytes
    sk: bytes


def sig_gen(kappa: int, rng: np.random.Generator) -> SigKeypair:
    if kappa > KEY_BITS:
        raise ValueError(f"Ed25519 keys have {KEY_BITS} bits; kappa={kappa} is larger")
    seed = rng.bytes(32)
    public = Ed25519PrivateKey.from_private_bytes(seed).public_key().public_bytes(**_RAW)
    return SigKeypair(pk=public, sk=seed)


def sig_sign(sk: bytes, message: bytes) -> bytes:
    return Ed25519PrivateKey.from_private_bytes(sk).sign(b"gmpc/sig" + message)


def sig_verify(pk: bytes, message: bytes, signature: bytes) -> bool:
    try:
        Ed25519PublicKey.from_public_bytes(pk).verify(signature, b"gmpc/sig" + message)
    except (InvalidSignature, ValueError):
        return False
    return True
