"""Seed-split PRG: block i is SHAKE-256(tag || seed || i), so G_i depends only
on (seed, i)."""
from __future__ import annotations

import hashlib


def pack_bits(bits) -> bytes:
    """Pack a 0/1 sequence into bytes (bit j is bit j%8 of byte j//8) with a
    length prefix so different-length seeds never collide."""
    bits = [int(b) & 1 for b in bits]
    body = bytearray((len(bits) + 7) // 8)
    for j, b in enumerate(bits):
        body[j >> 3] |= b << (j & 7)
    return len(bits).to_bytes(8, "little") + bytes(body)


def prg_block(seed: bytes, index: int, s_len_bits: int) -> bytes:
    nbytes = (s_len_bits + 7) // 8
    out = bytearray(hashlib.shake_256(b"gmpc/prg" + seed + index.to_bytes(8, "little")).digest(nbytes))
    spare = 8 * nbytes - s_len_bits
    if spare and out:
        out[-1] &= 0xFF >> spare
    return bytes(out)


def prg_expand(seed_bits, s_len_bits: int) -> list[bytes]:
    """Expand a bit string of length n+1 into n+1 blocks of s_len_bits each."""
    seed_bits = list(seed_bits)
    seed = pack_bits(seed_bits)
    return [prg_block(seed, i, s_len_bits) for i in range(len(seed_bits))]
