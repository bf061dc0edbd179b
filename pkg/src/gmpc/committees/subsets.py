"""Mapping random strings to committees and sampling distinct index sets."""
from __future__ import annotations

import hashlib
import math

import numpy as np


def chunk_bits(n: int) -> int:
    return max(1, math.ceil(math.log2(n)))


def subset_from_string(string: bytes, n: int, kappa: int) -> tuple[int, ...]:
    """Read `string` as chunks of ceil(log2 n) bits, each naming a user 1..n,
    keeping the first kappa distinct in-range ones. If the string runs out,
    further chunks come from a SHAKE-256 stream seeded with the string, so
    both sides derive the same committee."""
    if kappa > n:
        raise ValueError("committee larger than the population")
    width = chunk_bits(n)
    value = int.from_bytes(string, "little")
    available = 8 * len(string) // width
    chosen: list[int] = []
    seen: set[int] = set()

    def offer(chunk: int) -> None:
        if chunk < n and chunk not in seen:
            seen.add(chunk)
            chosen.append(chunk)

    for k in range(available):
        offer((value >> (k * width)) & ((1 << width) - 1))
        if len(chosen) == kappa:
            break
    counter = 0
    while len(chosen) < kappa:
        block = hashlib.shake_256(b"gmpc/subset" + counter.to_bytes(8, "little") + string).digest(64)
        stream = int.from_bytes(block, "little")
        for k in range(512 // width):
            offer((stream >> (k * width)) & ((1 << width) - 1))
            if len(chosen) == kappa:
                break
        counter += 1
    return tuple(sorted(c + 1 for c in chosen))


def xor_bytes(a: bytes, b: bytes) -> bytes:
    return bytes(x ^ y for x, y in zip(a, b, strict=True))


def sample_distinct(rng: np.random.Generator, owners: np.ndarray, population: int, k: int,
                    exclude_owner: bool = True) -> np.ndarray:
    """For each owner, a uniform k-subset of 1..population (optionally
    excluding the owner itself). Returns an (len(owners), k) int64 array,
    each row in sampling order."""
    owners = np.asarray(owners, dtype=np.int64)
    size = population - (1 if exclude_owner else 0)
    if k > size:
        raise ValueError("cannot sample more distinct elements than available")
    rows = len(owners)
    if rows == 0:
        return np.zeros((0, k), dtype=np.int64)
    if 4 * k > size:
        out = np.empty((rows, k), dtype=np.int64)
        for r in range(rows):
            out[r] = _shift_past_owner(rng.choice(size, k, replace=False) + 1, owners[r], exclude_owner)
        return out
    draws = 2 * k + 8
    samples = rng.integers(1, size + 1, size=(rows, draws))
    order = np.argsort(samples, axis=1, kind="stable")
    sorted_vals = np.take_along_axis(samples, order, axis=1)
    first_sorted = np.ones_like(sorted_vals, dtype=bool)
    first_sorted[:, 1:] = sorted_vals[:, 1:] != sorted_vals[:, :-1]
    first = np.zeros_like(first_sorted)
    np.put_along_axis(first, order, first_sorted, axis=1)
    rank = np.cumsum(first, axis=1)
    take = first & (rank <= k)
    short = take.sum(axis=1) < k
    out = np.empty((rows, k), dtype=np.int64)
    good = ~short
    out[good] = samples[good][take[good]].reshape(-1, k)
    for r in np.flatnonzero(short):
        out[r] = rng.choice(size, k, replace=False) + 1
    if exclude_owner:
        out = np.where(out >= owners[:, None], out + 1, out)
    return out


def _shift_past_owner(values: np.ndarray, owner: int, exclude_owner: bool) -> np.ndarray:
    return np.where(values >= owner, values + 1, values) if exclude_owner else values
