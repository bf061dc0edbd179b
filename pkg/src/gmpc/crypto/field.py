"""Arithmetic in the Mersenne prime field p = 2^61 - 1.

Scalars are plain Python ints in [0, P). Vector helpers operate on numpy
uint64 arrays whose entries are already reduced.
"""
from __future__ import annotations

import numpy as np

P = (1 << 61) - 1
ELEMENT_BYTES = 8
LIMB_BYTES = 7  # bytes packed per field element; 56 bits always fit below P

_P64 = np.uint64(P)
_MASK32 = np.uint64(0xFFFFFFFF)
_MASK29 = np.uint64((1 << 29) - 1)
_S32 = np.uint64(32)
_S29 = np.uint64(29)
_S61 = np.uint64(61)
_EIGHT = np.uint64(8)
_ZERO = np.uint64(0)


def add(a: int, b: int) -> int:
    return (a + b) % P


def sub(a: int, b: int) -> int:
    return (a - b) % P


def mul(a: int, b: int) -> int:
    return (a * b) % P


def neg(a: int) -> int:
    return (-a) % P


def inv(a: int) -> int:
    if a % P == 0:
        raise ZeroDivisionError("zero has no inverse in the field")
    return pow(a, P - 2, P)


def random_element(rng: np.random.Generator) -> int:
    return int(rng.integers(0, P, dtype=np.int64))


def random_vector(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.integers(0, P, size=shape, dtype=np.int64).astype(np.uint64)


def to_bytes(x: int) -> bytes:
    return int(x % P).to_bytes(ELEMENT_BYTES, "little")


def from_bytes(data: bytes) -> int:
    if len(data) != ELEMENT_BYTES:
        raise ValueError("field element encoding must be 8 bytes")
    value = int.from_bytes(data, "little")
    if value >= P:
        raise ValueError("encoded value is not reduced")
    return value


def pack_bytes(data: bytes) -> list[int]:
    """Split bytes into 7-byte little-endian limbs, one field element each."""
    return [int.from_bytes(data[i:i + LIMB_BYTES], "little") for i in range(0, len(data), LIMB_BYTES)]


def unpack_bytes(limbs, length: int) -> bytes:
    out = b"".join(int(x).to_bytes(LIMB_BYTES, "little") for x in limbs)
    if len(out) < length:
        raise ValueError("not enough limbs for requested length")
    return out[:length]


def limb_count(length: int) -> int:
    return -(-length // LIMB_BYTES)


# -- vectorised helpers -----------------------------------------------------

def _reduce_lazy(x: np.ndarray) -> np.ndarray:
    """Fold bits above 61 once; result < 2^61 + 8 for x < 2^64."""
    return (x & _P64) + (x >> _S61)


def _reduce_full(x: np.ndarray) -> np.ndarray:
    x = _reduce_lazy(_reduce_lazy(x))
    return x - np.where(x >= _P64, _P64, _ZERO)


def as_field_array(values) -> np.ndarray:
    arr = np.asarray(values)
    if arr.dtype == object:
        arr = np.array([int(v) % P for v in arr.ravel()], dtype=np.uint64).reshape(arr.shape)
    return arr.astype(np.uint64)


def vadd(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    s = np.asarray(a, dtype=np.uint64) + np.asarray(b, dtype=np.uint64)
    return s - np.where(s >= _P64, _P64, _ZERO)


def vsub(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.uint64)
    b = np.asarray(b, dtype=np.uint64)
    return a + (_P64 - b) - np.where(a >= b, _P64, _ZERO)


def vmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Elementwise product mod P using a 32-bit limb split (no overflow)."""
    a = np.asarray(a, dtype=np.uint64)
    b = np.asarray(b, dtype=np.uint64)
    a_hi, a_lo = a >> _S32, a & _MASK32
    b_hi, b_lo = b >> _S32, b & _MASK32
    low = a_lo * b_lo
    mid = a_hi * b_lo + a_lo * b_hi  # < 2^62
    high = a_hi * b_hi  # < 2^58; weight 2^64 = 8 mod P
    mid_hi, mid_lo = mid >> _S29, mid & _MASK29  # mid*2^32 = mid_hi*2^61 + mid_lo*2^32
    total = high * _EIGHT + mid_hi + (mid_lo << _S32) + _reduce_lazy(low)
    return _reduce_full(total)


def vsum(a: np.ndarray, axis: int = 0) -> np.ndarray:
    """Sum mod P along an axis by pairwise folding."""
    x = np.moveaxis(np.asarray(a, dtype=np.uint64), axis, 0)
    if x.shape[0] == 0:
        return np.zeros(x.shape[1:], dtype=np.uint64)
    while x.shape[0] > 1:
        if x.shape[0] % 2:
            x = np.concatenate([x, np.zeros((1,) + x.shape[1:], dtype=np.uint64)])
        x = _reduce_lazy(x[0::2] + x[1::2])
    return _reduce_full(x[0])


def vmatmul(a: np.ndarray, b: np.ndarray, inner_block: int = 2048) -> np.ndarray:
    """Matrix product mod P for (r, k) @ (k, c) arrays.

    Operands are split into 21-bit limbs so every limb product sum over at
    most 2048 terms stays below 2^53 and float64 BLAS is exact.
    """
    a = np.asarray(a, dtype=np.uint64)
    b = np.asarray(b, dtype=np.uint64)
    rows, inner = a.shape
    if rows * inner * b.shape[1] <= 4096:
        # tiny products: exact Python integers beat the limb split
        return (np.dot(a.astype(object), b.astype(object)) % P).astype(np.uint64).reshape(rows, b.shape[1])
    out = np.zeros((rows, b.shape[1]), dtype=np.uint64)
    for lo in range(0, inner, inner_block):
        a_limbs = _limbs21(a[:, lo:lo + inner_block])
        b_limbs = _limbs21(b[lo:lo + inner_block])
        for weight in range(5):
            acc = np.zeros_like(out)
            for s in range(max(0, weight - 2), min(2, weight) + 1):
                acc += (a_limbs[s] @ b_limbs[weight - s]).astype(np.uint64)
            out = vadd(out, _times_pow2(_reduce_full(acc), 21 * weight))
    return out


def _times_pow2(x: np.ndarray, shift: int) -> np.ndarray:
    """x * 2^shift mod P for reduced x: a 61-bit rotation."""
    shift %= 61
    if shift == 0:
        return x
    rotated = ((x << np.uint64(shift)) & _P64) | (x >> np.uint64(61 - shift))
    return rotated - np.where(rotated >= _P64, _P64, _ZERO)


def _limbs21(x: np.ndarray) -> list[np.ndarray]:
    mask = np.uint64((1 << 21) - 1)
    return [((x >> np.uint64(21 * i)) & mask).astype(np.float64) for i in range(3)]


def vpow_table(points: np.ndarray, degree: int) -> np.ndarray:
    """Vandermonde rows [x^0, x^1, ..., x^degree] for each point."""
    points = np.asarray(points, dtype=np.uint64)
    table = np.empty((len(points), degree + 1), dtype=np.uint64)
    table[:, 0] = 1
    for e in range(1, degree + 1):
        table[:, e] = vmul(table[:, e - 1], points)
    return table
