"""Per-party communication and computation counters."""
from __future__ import annotations

import numpy as np


class Metrics:
    def __init__(self, parties: int):
        self.parties = parties
        self.messages_sent = np.zeros(parties, dtype=np.int64)
        self.messages_received = np.zeros(parties, dtype=np.int64)
        self.bytes_sent = np.zeros(parties, dtype=np.int64)
        self.bytes_received = np.zeros(parties, dtype=np.int64)
        self.compute_ops = np.zeros(parties, dtype=np.int64)
        self.block_events: list[tuple[int, int]] = []  # (round, blocked count)
        self.abort_events: list[tuple[int, int]] = []  # (round, party)

    def _bins(self, index, weights=None) -> np.ndarray:
        index = np.asarray(index, dtype=np.int64)
        if index.size == 0:
            return np.zeros(self.parties, dtype=np.int64)
        counts = np.bincount(index, weights=weights, minlength=self.parties)
        return np.rint(counts).astype(np.int64) if weights is not None else counts

    def record_delivery(self, src, dst, length) -> None:
        length = np.asarray(length, dtype=np.float64)
        self.messages_sent += self._bins(src)
        self.messages_received += self._bins(dst)
        self.bytes_sent += self._bins(src, length)
        self.bytes_received += self._bins(dst, length)

    def charge_messages(self, sent, received, bytes_sent=None, bytes_received=None) -> None:
        """Add precomputed per-party counts (used for hybrid-model messages)."""
        self.messages_sent += np.asarray(sent, dtype=np.int64)
        self.messages_received += np.asarray(received, dtype=np.int64)
        if bytes_sent is not None:
            self.bytes_sent += np.asarray(bytes_sent, dtype=np.int64)
        if bytes_received is not None:
            self.bytes_received += np.asarray(bytes_received, dtype=np.int64)

    def charge_ops(self, parties, ops) -> None:
        parties = np.asarray(parties, dtype=np.int64).ravel()
        ops = np.broadcast_to(np.asarray(ops, dtype=np.float64), parties.shape)
        self.compute_ops += self._bins(parties, ops)

    def charge_ops_vector(self, ops) -> None:
        self.compute_ops += np.asarray(ops, dtype=np.int64)

    def record_blocks(self, round_index: int, count: int) -> None:
        if count:
            self.block_events.append((round_index, int(count)))

    def record_abort(self, round_index: int, party: int) -> None:
        self.abort_events.append((round_index, int(party)))

    def user_messages(self) -> np.ndarray:
        return (self.messages_sent + self.messages_received)[1:]

    def summary(self) -> dict:
        users = slice(1, None)
        msgs = self.messages_sent[users] + self.messages_received[users]
        return {
            "max_user_msgs": int(msgs.max()) if msgs.size else 0,
            "max_user_ops": int(self.compute_ops[users].max()) if msgs.size else 0,
            "max_user_bytes": int((self.bytes_sent[users] + self.bytes_received[users]).max()) if msgs.size else 0,
            "server_msgs": int(self.messages_sent[0] + self.messages_received[0]),
            "server_bytes": int(self.bytes_sent[0] + self.bytes_received[0]),
            "server_ops": int(self.compute_ops[0]),
            "blocked": int(sum(c for _, c in self.block_events)),
            "aborts": len(self.abort_events),
        }
