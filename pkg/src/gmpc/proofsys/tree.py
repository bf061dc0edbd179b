"""Binary helper tree rooted at the verifier, message transports, and the
random-row check that the prover encoded the statement correctly.

Tree parties are 0..n: party 0 is the verifier, party i has children 2i+1
and 2i+2. The tree is padded to 2^h - 1 nodes with virtual helpers that hold
zero and never send. The prover is the server, id PROVER.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol

import numpy as np

from ..crypto import field
from ..netsim import SERVER, EnvelopeBatch, Network
from .lecc import SLICE, LeccParams, lecc_rows, slice_rows

PROVER = -1
ELEMENT_BYTES = 8


class Transport(Protocol):
    def send(self, kind: str, src, dst, length: int) -> np.ndarray: ...
    def charge_ops(self, parties, ops) -> None: ...


class PerfectTransport:
    """Delivers everything and records nothing (pure computation)."""

    def send(self, kind: str, src, dst, length: int) -> np.ndarray:
        src, _ = np.broadcast_arrays(np.asarray(src), np.asarray(dst))
        return np.ones(src.size, dtype=bool)

    def charge_ops(self, parties, ops) -> None:
        pass


class UserTransport:
    """Tree party i is network user `offset + i`; the prover is the server."""

    def __init__(self, net: Network, offset: int = 1):
        self.net, self.offset = net, offset

    def _ids(self, parties) -> np.ndarray:
        parties = np.asarray(parties, dtype=np.int64)
        return np.where(parties == PROVER, SERVER, parties + self.offset)

    def send(self, kind: str, src, dst, length: int) -> np.ndarray:
        src, dst = np.broadcast_arrays(self._ids(src), self._ids(dst))
        if src.size == 0:
            return np.zeros(0, dtype=bool)
        return self.net.exchange_one(EnvelopeBatch(kind, src.ravel(), dst.ravel(), length))

    def charge_ops(self, parties, ops) -> None:
        self.net.metrics.charge_ops(self._ids(parties), ops)


class CommitteeTransport:
    """Tree party i is committee i of a (n + 1, size) member matrix; messages
    are committee-level virtual messages charged per member."""

    def __init__(self, net: Network, members: np.ndarray):
        self.net, self.members = net, members

    def send(self, kind: str, src, dst, length: int) -> np.ndarray:
        from ..committees.flood import virtual_exchange
        src, dst = np.broadcast_arrays(np.asarray(src, dtype=np.int64), np.asarray(dst, dtype=np.int64))
        if src.size == 0:
            return np.zeros(0, dtype=bool)
        return virtual_exchange(self.net, kind, src.ravel(), dst.ravel(), self.members, length, server=PROVER)

    def charge_ops(self, parties, ops) -> None:
        parties = np.asarray(parties, dtype=np.int64).ravel()
        ops = np.broadcast_to(np.asarray(ops, dtype=np.float64), parties.shape)
        keep = parties != PROVER
        server_ops = ops[~keep].sum()
        rows = self.members[parties[keep]]
        valid = rows >= 0
        per_member = np.broadcast_to(ops[keep][:, None], rows.shape)
        self.net.metrics.charge_ops(rows[valid], per_member[valid])
        if server_ops:
            self.net.metrics.charge_ops([SERVER], server_ops)


@dataclass(frozen=True)
class HelperTree:
    n: int  # helpers 1..n plus the verifier 0

    @property
    def width(self) -> int:
        """n + 2 rounded up to a power of two."""
        return 1 << max(1, (self.n + 1).bit_length())

    @staticmethod
    def parent(i):
        return (np.asarray(i) - 1) // 2

    def children(self, i: int) -> tuple[int, ...]:
        return tuple(c for c in (2 * i + 1, 2 * i + 2) if c <= self.n)

    @staticmethod
    def depth(i) -> np.ndarray:
        i = np.asarray(i, dtype=np.int64)
        return np.floor(np.log2(i + 1 + 0.5)).astype(np.int64)

    def levels(self) -> list[np.ndarray]:
        """Existing parties by depth, root first."""
        out, start = [], 0
        while start <= self.n:
            stop = min(self.n, 2 * start)
            out.append(np.arange(start, stop + 1))
            start = 2 * start + 1
        return out


def broadcast_down(tree: HelperTree, transport: Transport, kind: str, length: int,
                   start: np.ndarray | None = None) -> np.ndarray:
    """Flood a message from the root down the tree; returns who holds it."""
    has = np.zeros(tree.n + 1, dtype=bool)
    has[0] = True if start is None else bool(start[0])
    for level in tree.levels()[1:]:
        parents = tree.parent(level)
        sending = has[parents]
        got = transport.send(kind, parents[sending], level[sending], length)
        has[level[sending][got]] = True
    return has


def gather_up(tree: HelperTree, transport: Transport, kind: str, sources, length: int) -> np.ndarray:
    """Route one message from each source to the root, hop by hop."""
    sources = np.asarray(sources, dtype=np.int64).ravel()
    at = sources.copy()
    alive = np.ones(sources.size, dtype=bool)
    while True:
        moving = alive & (at > 0)
        if not moving.any():
            break
        got = transport.send(kind, at[moving], tree.parent(at[moving]), length)
        index = np.flatnonzero(moving)
        alive[index[~got]] = False
        at[index[got]] = tree.parent(at[index[got]])
    return alive


def route_down(tree: HelperTree, transport: Transport, kind: str, targets, length: int) -> np.ndarray:
    """Route one message from the root to each target along its path."""
    targets = np.asarray(targets, dtype=np.int64).ravel()
    delivered = np.ones(targets.size, dtype=bool)
    depth = tree.depth(targets)
    for d in range(1, int(depth.max(initial=0)) + 1):
        moving = delivered & (depth >= d)
        # ancestor of each target at depth d and its parent
        here = _ancestor(targets[moving], depth[moving], d)
        got = transport.send(kind, tree.parent(here), here, length)
        index = np.flatnonzero(moving)
        delivered[index[~got]] = False
    return delivered


def _ancestor(nodes: np.ndarray, depth: np.ndarray, d: int) -> np.ndarray:
    """Ancestor at depth d in heap numbering."""
    return ((nodes + 1) >> (depth - d)) - 1


@dataclass
class EncodingCheck:
    accepted: bool
    reason: str          # "ok", "mismatch", "missing-slice", "missing-contribution"
    rows: np.ndarray     # sampled slice indices S
    mismatched: np.ndarray
    sums: np.ndarray     # aggregated values at the verifier, (|S|, 3, L)


def sample_rows(n: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """S: `size` distinct slice indices from {0..n}, sorted."""
    return np.sort(rng.choice(n + 1, size=min(size, n + 1), replace=False))


def aggregate_rows(params: LeccParams, tree: HelperTree, inputs: np.ndarray, rows: np.ndarray,
                   contributes: np.ndarray | None = None, limb_chunk: int | None = None) -> np.ndarray:
    """Tree-summed encodings of the sampled slices: entry (s, r, l) is
    sum_i G(3 rows[s] + r, i) x_i[l], accumulated leaf to root. Parties with
    contributes == False add nothing (their subtree is cut)."""
    inputs = field.as_field_array(inputs)
    k, width = inputs.shape
    positions = slice_rows(rows).ravel()
    g = lecc_rows(params, positions)  # (R, k)
    r_count = positions.size
    contributes = np.ones(k, dtype=bool) if contributes is None else contributes
    limb_chunk = limb_chunk or max(1, (1 << 21) // max(1, k * r_count))
    total = np.zeros((r_count, width), dtype=np.uint64)
    levels = tree.levels()
    for lo in range(0, width, limb_chunk):
        hi = min(width, lo + limb_chunk)
        sums = np.zeros((k, r_count, hi - lo), dtype=np.uint64)
        for level in reversed(levels):
            term = field.vmul(g[:, level].T[:, :, None], inputs[level, None, lo:hi])
            for child in (2 * level + 1, 2 * level + 2):
                real = child <= tree.n
                add = np.zeros_like(term)
                add[real] = sums[child[real]]
                term = field.vadd(term, add)
            term[~contributes[level]] = 0
            sums[level] = term
        total[:, lo:hi] = sums[0]
    return total.reshape(len(rows), SLICE, width)


def tree_encoding_check(params: LeccParams, inputs: np.ndarray, slices: np.ndarray, rows: np.ndarray,
                        transport: Transport | None = None, tree: HelperTree | None = None,
                        has_slice: np.ndarray | None = None) -> EncodingCheck:
    """The verifier (party 0) and helpers check purported slices at rows S.

    inputs: (n + 1, L) the parties' own message limbs; slices: (n + 1, 3, L)
    the purported codeword slices they received; rows: S.
    """
    transport = transport or PerfectTransport()
    inputs = field.as_field_array(inputs)
    n = inputs.shape[0] - 1
    tree = tree or HelperTree(n)
    width = inputs.shape[1]
    has_slice = np.ones(n + 1, dtype=bool) if has_slice is None else has_slice
    rows = np.asarray(rows, dtype=np.int64)
    empty = np.zeros((len(rows), SLICE, width), dtype=np.uint64)
    r_bytes = SLICE * len(rows) * ELEMENT_BYTES * width

    informed = broadcast_down(tree, transport, "lecc-rows", 4 * len(rows))
    senders = rows[rows > 0]
    arrived = gather_up(tree, transport, "lecc-slice", senders[has_slice[senders]], SLICE * width * ELEMENT_BYTES)
    transport.charge_ops(np.arange(1, n + 1), r_bytes // ELEMENT_BYTES * 2)

    # partial sums travel leaf to root; a party that misses a child's sum
    # (or never learned S) stops and the verifier rejects
    complete = informed.copy()
    for level in reversed(tree.levels()[1:]):
        for child in (2 * level + 1, 2 * level + 2):
            real = child <= n
            complete[level[real]] &= complete[child[real]]
        sending = level[complete[level]]
        got = transport.send("lecc-sum", sending, tree.parent(sending), r_bytes)
        lost = np.ones(n + 1, dtype=bool)
        lost[sending[got]] = False
        complete[level[lost[level]]] = False
    root_ok = all(complete[c] for c in tree.children(0))
    if not root_ok:
        return EncodingCheck(False, "missing-contribution", rows, np.zeros(0, dtype=np.int64), empty)
    if not (has_slice[0] and arrived.all() and has_slice[senders].all()):
        return EncodingCheck(False, "missing-slice", rows, np.zeros(0, dtype=np.int64), empty)

    sums = aggregate_rows(params, tree, inputs, rows)
    transport.charge_ops([0], r_bytes // ELEMENT_BYTES * 2)
    mismatch = np.any(sums != slices[rows], axis=(1, 2))
    bad = rows[mismatch]
    if bad.size:
        broadcast_down(tree, transport, "lecc-bottom", 1)
        return EncodingCheck(False, "mismatch", rows, bad, sums)
    return EncodingCheck(True, "ok", rows, bad, sums)
