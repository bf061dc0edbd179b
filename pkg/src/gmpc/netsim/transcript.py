"""Event log of a run, stored as numpy chunks and serialized as
tab-separated lines (round, type, src, dst, length)."""
from __future__ import annotations

import hashlib
from collections import defaultdict

import numpy as np

HEADER = "round\ttype\tsrc\tdst\tlength"


class Transcript:
    """mode "full" keeps every record; "summary" keeps one aggregate record per
    (round, type) whose type is suffixed with the event count and whose length
    is the byte total; "off" keeps nothing."""

    def __init__(self, mode: str = "full"):
        if mode not in ("full", "summary", "off"):
            raise ValueError(f"unknown transcript mode {mode!r}")
        self.mode = mode
        self._chunks: list[tuple[int, str, np.ndarray, np.ndarray, np.ndarray]] = []
        self._summary: dict[tuple[int, str], list[int]] = defaultdict(lambda: [0, 0])
        self._order: list[tuple[int, str]] = []

    def log(self, round_index: int, kind: str, src, dst, length) -> None:
        if self.mode == "off":
            return
        src = np.atleast_1d(np.asarray(src, dtype=np.int64))
        dst = np.broadcast_to(np.asarray(dst, dtype=np.int64), src.shape)
        length = np.broadcast_to(np.asarray(length, dtype=np.int64), src.shape)
        if src.size == 0:
            return
        if self.mode == "summary":
            key = (round_index, kind)
            if key not in self._summary:
                self._order.append(key)
            entry = self._summary[key]
            entry[0] += int(src.size)
            entry[1] += int(length.sum())
            return
        order = np.lexsort((dst, src))
        self._chunks.append((round_index, kind, src[order].copy(), dst[order].copy(), length[order].copy()))

    def records(self):
        if self.mode == "summary":
            for key in self._order:
                count, total = self._summary[key]
                yield key[0], f"{key[1]}*{count}", -1, -1, total
            return
        for round_index, kind, src, dst, length in self._chunks:
            for s, d, l in zip(src.tolist(), dst.tolist(), length.tolist()):
                yield round_index, kind, s, d, l

    def __len__(self) -> int:
        if self.mode == "summary":
            return len(self._order)
        return sum(len(c[2]) for c in self._chunks)

    def events(self, kind: str):
        return [r for r in self.records() if r[1] == kind]

    def dumps(self) -> str:
        lines = [HEADER]
        lines.extend(f"{r}\t{t}\t{s}\t{d}\t{l}" for r, t, s, d, l in self.records())
        return "\n".join(lines) + "\n"

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())

    def digest(self) -> str:
        return hashlib.sha256(self.dumps().encode()).hexdigest()

    def view_of(self, party: int, kinds=("deliver", "notice")) -> str:
        """Events observable by one user: deliveries and notices addressed to it."""
        rows = [
            f"{r}\t{t}\t{s}\t{l}" for r, t, s, d, l in self.records()
            if d == party and t.split(":", 1)[0] in kinds
        ]
        return "\n".join(rows)
