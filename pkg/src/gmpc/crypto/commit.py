"""Hash-based hiding commitment: H(tag || msg || 256-bit salt)."""
from __future__ import annotations

import hashlib
import hmac

import numpy as np

SALT_BYTES = 32


def hiding_commit(msg: bytes, rng: np.random.Generator) -> tuple[bytes, bytes]:
    salt = rng.bytes(SALT_BYTES)
    return _commitment(msg, salt), salt


def hiding_verify(com: bytes, msg: bytes, decom: bytes) -> bool:
    if len(decom) != SALT_BYTES:
        return False
    return hmac.compare_digest(com, _commitment(msg, decom))


def _commitment(msg: bytes, salt: bytes) -> bytes:
    return hashlib.sha256(b"gmpc/commit" + len(msg).to_bytes(8, "little") + msg + salt).digest()
