"""Systematic Reed-Solomon code over GF(P) with closed-form generator entries.

The message x_0..x_{k-1} sits at evaluation points 1..k and the codeword is
the interpolating polynomial evaluated at points 1..3k, so codeword position
j (point j + 1) equals x_j for j < k. Entry G(j, i) is the Lagrange
coefficient of point i + 1 at point j + 1; with factorial tables it costs a
constant number of field multiplications.

Byte strings are packed into 7-byte limbs and each limb index is an
independent code instance, so messages are (k, L) arrays.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import cached_property

import numpy as np

from ..crypto import field
from ..crypto.field import P
from ..crypto.poly import berlekamp_welch, poly_eval

SLICE = 3  # codeword positions per holder when c = 0


@dataclass(frozen=True)
class LeccParams:
    k: int
    c: int = 0
    _tables: dict = dc_field(default_factory=dict, compare=False, repr=False)

    @property
    def length(self) -> int:
        return SLICE * self.k

    @property
    def distance(self) -> int:
        return self.length - self.k + 1

    @property
    def max_errors(self) -> int:
        return (self.distance - 1) // 2

    @cached_property
    def factorials(self) -> tuple[np.ndarray, np.ndarray]:
        size = self.length + 1
        fact = [1] * size
        for v in range(1, size):
            fact[v] = fact[v - 1] * v % P
        inv_fact = [1] * size
        inv_fact[-1] = pow(fact[-1], P - 2, P)
        for v in range(size - 1, 0, -1):
            inv_fact[v - 1] = inv_fact[v] * v % P
        return np.array(fact, dtype=np.uint64), np.array(inv_fact, dtype=np.uint64)


def lecc_params(holders: int, c: int = 0) -> LeccParams:
    """Code for `holders` parties holding one message element each (c = 0)."""
    if c != 0:
        raise ValueError("only c = 0 is implemented: one field element per holder and instance")
    return LeccParams(holders, c)


def lecc_rows(params: LeccParams, rows, cols=None) -> np.ndarray:
    """G restricted to codeword positions `rows` and message indices `cols`."""
    k = params.k
    rows = np.asarray(rows, dtype=np.int64).ravel()
    cols = np.arange(k, dtype=np.int64) if cols is None else np.asarray(cols, dtype=np.int64).ravel()
    if rows.size and (rows.min() < 0 or rows.max() >= params.length):
        raise IndexError("codeword position out of range")
    if cols.size and (cols.min() < 0 or cols.max() >= k):
        raise IndexError("message index out of range")
    fact, inv_fact = params.factorials
    x = rows + 1
    parity = x > k
    out = np.zeros((rows.size, cols.size), dtype=np.uint64)
    # systematic rows are indicator vectors
    sys_rows = np.flatnonzero(~parity)
    if sys_rows.size:
        out[sys_rows] = (rows[sys_rows][:, None] == cols[None, :]).astype(np.uint64)
    par_rows = np.flatnonzero(parity)
    if par_rows.size:
        xp = x[par_rows][:, None]
        # prod_m (x - m) for m = 1..k  = (x - 1)! / (x - 1 - k)!
        node = field.vmul(fact[xp - 1], inv_fact[xp - 1 - k])
        # 1 / prod_{m != i} (i - m) = (-1)^(k-1-i) / (i! (k-1-i)!)
        weight = field.vmul(inv_fact[cols], inv_fact[k - 1 - cols])[None, :]
        sign_neg = ((k - 1 - cols) % 2 == 1)[None, :]
        # 1 / (x - (i + 1)) = (x - i - 2)! / (x - i - 1)!
        inverse = field.vmul(fact[xp - cols[None, :] - 2], inv_fact[xp - cols[None, :] - 1])
        value = field.vmul(field.vmul(node, weight), inverse)
        value = np.where(sign_neg & (value != 0), np.uint64(P) - value, value)
        out[par_rows] = value
    return out


def lecc_row(params: LeccParams, j: int, i: int) -> int:
    return int(lecc_rows(params, [j], [i])[0, 0])


def lecc_encode(params: LeccParams, message: np.ndarray, block_rows: int = 256) -> np.ndarray:
    """Codeword (3k, L) for a (k, L) message (a 1-d message is one instance)."""
    message = field.as_field_array(message)
    flat = message.ndim == 1
    if flat:
        message = message[:, None]
    if message.shape[0] != params.k:
        raise ValueError(f"message must have {params.k} elements per instance")
    out = np.empty((params.length, message.shape[1]), dtype=np.uint64)
    out[:params.k] = message
    for start in range(params.k, params.length, block_rows):
        rows = np.arange(start, min(start + block_rows, params.length))
        out[rows] = field.vmatmul(lecc_rows(params, rows), message)
    return out[:, 0] if flat else out


def lecc_decode(params: LeccParams, word) -> np.ndarray | None:
    """Recover the message from a word with at most k errors per instance."""
    word = field.as_field_array(word)
    flat = word.ndim == 1
    if flat:
        word = word[:, None]
    xs = range(1, params.length + 1)
    out = np.empty((params.k, word.shape[1]), dtype=np.uint64)
    for limb in range(word.shape[1]):
        coeffs = berlekamp_welch(list(zip(xs, (int(v) for v in word[:, limb]))), params.k - 1, params.max_errors)
        if coeffs is None:
            return None
        out[:, limb] = [poly_eval(coeffs, x) for x in range(1, params.k + 1)]
    return out[:, 0] if flat else out


def slices_of(codeword: np.ndarray) -> np.ndarray:
    """Partition a (3k, L) codeword into (k, 3, L) per-holder slices."""
    codeword = np.asarray(codeword)
    return codeword.reshape(codeword.shape[0] // SLICE, SLICE, *codeword.shape[1:])


def slice_rows(holders) -> np.ndarray:
    """Codeword positions held by each holder: (len, 3)."""
    holders = np.asarray(holders, dtype=np.int64).ravel()
    return holders[:, None] * SLICE + np.arange(SLICE)[None, :]


def pack_blocks(blocks: list[bytes], width: int | None = None) -> np.ndarray:
    """(k, L) limbs from k byte blocks, zero-padded to a common width."""
    width = max((len(b) for b in blocks), default=0) if width is None else width
    limbs = field.limb_count(max(width, 1))
    out = np.zeros((len(blocks), limbs), dtype=np.uint64)
    for i, block in enumerate(blocks):
        if len(block) > width:
            raise ValueError("block longer than the declared width")
        values = field.pack_bytes(block)
        out[i, :len(values)] = values
    return out
