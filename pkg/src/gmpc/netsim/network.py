"""Synchronous round-based network with server-controlled delivery.

Every envelope passes the server. A corrupted server sees (src, dst, length)
of every envelope and chooses which to drop; an honest server only applies
the flood guard. Blocked envelopes are logged on the server side only, so a
receiver cannot tell a block from a sender that went silent.
"""
from __future__ import annotations

import numpy as np

from .metrics import Metrics
from .transcript import Transcript
from .types import SERVER, AdversarySpec, Envelope, EnvelopeBatch


def ddos_guard_arrays(src: np.ndarray, dst: np.ndarray, delta: int,
                      already_blocked: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Return (keep mask, newly blocked parties) for one round of intents.

    Any user receiving from more than delta**3 distinct senders is a victim;
    all of its contactors are blocked and their envelopes removed.
    """
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    limit = delta ** 3
    user_dst = dst != SERVER
    newly = np.zeros(0, dtype=np.int64)
    if int(user_dst.sum()) > limit:
        width = int(max(src.max(), dst.max())) + 1
        keys = np.unique(dst[user_dst] * width + src[user_dst])
        victims, counts = np.unique(keys // width, return_counts=True)
        flooded = victims[counts > limit]
        if len(flooded):
            newly = np.unique(keys[np.isin(keys // width, flooded)] % width)
            newly = newly[newly != SERVER]
    blocked = set(newly.tolist())
    if already_blocked is not None:
        blocked |= set(np.flatnonzero(already_blocked).tolist())
    if not blocked:
        return np.ones(len(src), dtype=bool), newly
    marked = np.array(sorted(blocked), dtype=np.int64)
    keep = ~(np.isin(src, marked) | np.isin(dst, marked))
    return keep, newly


def ddos_guard(intents: list[Envelope], delta: int) -> tuple[list[Envelope], set[int]]:
    src = np.array([e.src for e in intents], dtype=np.int64)
    dst = np.array([e.dst for e in intents], dtype=np.int64)
    keep, newly = ddos_guard_arrays(src, dst, delta)
    return [e for e, k in zip(intents, keep) if k], set(newly.tolist())


class Network:
    def __init__(self, n_users: int, adversary: AdversarySpec | None = None, *,
                 delta: int | None = None, record: str = "full"):
        self.n = n_users
        self.adversary = adversary or AdversarySpec()
        self.delta = delta if delta is not None else max(2, n_users)
        self.round = 0
        self.metrics = Metrics(n_users + 1)
        self.transcript = Transcript(record)
        self.aborted = np.zeros(n_users + 1, dtype=bool)
        self.blocked = np.zeros(n_users + 1, dtype=bool)  # permanently, by the flood guard

    # -- bookkeeping --------------------------------------------------------
    def abort(self, parties, reason: str = "abort") -> None:
        parties = np.atleast_1d(np.asarray(parties, dtype=np.int64))
        parties = parties[~self.aborted[parties]]
        if parties.size == 0:
            return
        self.aborted[parties] = True
        for party in parties.tolist():
            self.metrics.record_abort(self.round, party)
        self.transcript.log(self.round, reason, parties, SERVER, 0)

    def log_event(self, kind: str, src, dst=SERVER, length=0) -> None:
        self.transcript.log(self.round, kind, src, dst, length)

    def advance(self, rounds: int = 1) -> None:
        self.round += rounds

    # -- delivery -----------------------------------------------------------
    def run_round(self, intents: list[Envelope]) -> list[Envelope]:
        for env in intents:
            if env.round != self.round:
                raise ValueError(f"intent stamped for round {env.round}, current round is {self.round}")
        if not intents:
            self.round += 1
            return []
        kinds = sorted({e.kind for e in intents})
        batches = [EnvelopeBatch.from_envelopes([e for e in intents if e.kind == k], k) for k in kinds]
        grouped = [[e for e in intents if e.kind == k] for k in kinds]
        masks = self.exchange(batches)
        delivered = [e for group, mask in zip(grouped, masks) for e, ok in zip(group, mask) if ok]
        delivered.sort(key=lambda e: (e.src, e.dst))
        return delivered

    def exchange(self, batches: list[EnvelopeBatch]) -> list[np.ndarray]:
        """Deliver several batches in one round; returns one delivered mask per batch."""
        masks = [self._deliver_batch(b) for b in self._validated(batches)]
        self.round += 1
        return masks

    def exchange_one(self, batch: EnvelopeBatch) -> np.ndarray:
        return self.exchange([batch])[0]

    def _validated(self, batches: list[EnvelopeBatch]) -> list[EnvelopeBatch]:
        for batch in batches:
            if np.any(batch.src == batch.dst):
                raise ValueError("an envelope cannot be addressed to its sender")
            if np.any(self.aborted[batch.src]):
                raise ValueError("an aborted party cannot send")
        if not self.adversary.server_corrupted and batches:
            src = np.concatenate([b.src for b in batches])
            dst = np.concatenate([b.dst for b in batches])
            _, newly = ddos_guard_arrays(src, dst, self.delta)
            if newly.size:
                self.blocked[newly] = True
                self.transcript.log(self.round, "ddos-block", newly, SERVER, 0)
        return batches

    def _deliver_batch(self, batch: EnvelopeBatch) -> np.ndarray:
        src, dst, length = batch.src, batch.dst, batch.length
        if src.size == 0:
            return np.zeros(0, dtype=bool)
        if self.adversary.server_corrupted:
            chosen = self.adversary.strategy.block(self.round, batch.kind, src, dst, length)
            dropped = np.zeros(src.shape, dtype=bool) if chosen is None else np.asarray(chosen, dtype=bool)
        else:
            dropped = self.blocked[src] | self.blocked[dst]
        dead = self.aborted[dst] & ~dropped
        delivered = ~dropped & ~dead
        self.metrics.record_delivery(src[delivered], dst[delivered], length[delivered])
        self.metrics.record_blocks(self.round, int(dropped.sum()))
        self.transcript.log(self.round, f"deliver:{batch.kind}", src[delivered], dst[delivered], length[delivered])
        self.transcript.log(self.round, f"block:{batch.kind}", src[dropped], dst[dropped], length[dropped])
        # the sender of a message to an aborted user learns that it aborted
        self.transcript.log(self.round, "notice", dst[dead], src[dead], 0)
        return delivered

    def virtual_round(self, kind: str, src, dst) -> np.ndarray:
        """One round of committee-level messages; returns the delivered mask.

        Member-level costs are charged by the caller. A corrupted server
        decides drops through Strategy.block_virtual.
        """
        src, dst = np.broadcast_arrays(np.asarray(src, dtype=np.int64), np.asarray(dst, dtype=np.int64))
        src, dst = src.ravel().copy(), dst.ravel().copy()
        dropped = np.zeros(src.shape, dtype=bool)
        if self.adversary.server_corrupted and src.size:
            chosen = self.adversary.strategy.block_virtual(self.round, kind, src, dst)
            if chosen is not None:
                dropped = np.asarray(chosen, dtype=bool)
        self.transcript.log(self.round, f"virtual:{kind}", src[~dropped], dst[~dropped], 0)
        self.transcript.log(self.round, f"vblock:{kind}", src[dropped], dst[dropped], 0)
        self.metrics.record_blocks(self.round, int(dropped.sum()))
        self.round += 1
        return ~dropped

    # -- views --------------------------------------------------------------
    def adversary_view(self) -> list[tuple]:
        """Metadata the adversary observes: everything if the server is
        corrupted, otherwise only envelopes touching corrupted users."""
        corrupted = self.adversary.corrupted_users
        out = []
        for r, t, s, d, l in self.transcript.records():
            if self.adversary.server_corrupted or s in corrupted or d in corrupted:
                out.append((r, t, s, d, l))
        return out
