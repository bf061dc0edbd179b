"""Core network types: party identifiers, envelopes and adversary configuration."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..params import as_fraction
from .adversary import HONEST, Strategy

SERVER = 0


class PartyId(int):
    """Index of a party: 0 is the server, 1..n are users."""

    def __new__(cls, index: int, n: int | None = None):
        if index < 0 or (n is not None and index > n):
            raise ValueError(f"party index {index} outside 0..{n}")
        return super().__new__(cls, index)

    @property
    def is_server(self) -> bool:
        return self == SERVER

    @property
    def role(self) -> str:
        return "server" if self == SERVER else "user"


@dataclass(frozen=True)
class Envelope:
    src: int
    dst: int
    round: int
    payload: bytes
    kind: str = "msg"

    def __post_init__(self):
        if self.src == self.dst:
            raise ValueError("an envelope cannot be addressed to its sender")
        if not isinstance(self.payload, (bytes, bytearray)):
            raise TypeError("payload must be bytes")
        if self.round < 0:
            raise ValueError("round must be non-negative")

    @property
    def length(self) -> int:
        return len(self.payload)


@dataclass
class EnvelopeBatch:
    """Struct-of-arrays form of many envelopes of one kind.

    Protocol steps that involve thousands of parties send batches; party
    logic keeps the payload contents and reads them only for delivered
    entries. `payloads` is optional and, when given, aligned with src.
    """

    kind: str
    src: np.ndarray
    dst: np.ndarray
    length: np.ndarray
    payloads: list[bytes] | None = None

    def __post_init__(self):
        src = np.asarray(self.src, dtype=np.int64)
        dst = np.asarray(self.dst, dtype=np.int64)
        if src.ndim == 0 or dst.ndim == 0:
            src, dst = np.broadcast_arrays(src, dst)
        self.src = np.array(src, dtype=np.int64).ravel()
        self.dst = np.array(dst, dtype=np.int64).ravel()
        self.length = np.broadcast_to(np.asarray(self.length, dtype=np.int64), self.src.shape).copy()
        if not (self.src.shape == self.dst.shape):
            raise ValueError("src and dst must align")
        if self.payloads is not None and len(self.payloads) != len(self.src):
            raise ValueError("payloads must align with src")

    def __len__(self) -> int:
        return len(self.src)

    @classmethod
    def from_envelopes(cls, envelopes: list[Envelope], kind: str = "msg") -> "EnvelopeBatch":
        return cls(
            kind,
            np.array([e.src for e in envelopes], dtype=np.int64),
            np.array([e.dst for e in envelopes], dtype=np.int64),
            np.array([e.length for e in envelopes], dtype=np.int64),
            [bytes(e.payload) for e in envelopes],
        )


@dataclass
class AdversarySpec:
    corrupted_users: frozenset[int] = frozenset()
    server_corrupted: bool = False
    strategy: Strategy = field(default_factory=lambda: HONEST)
    alpha: Fraction | float = Fraction(1, 10)

    def __post_init__(self):
        self.alpha = as_fraction(self.alpha)
        self.corrupted_users = frozenset(int(u) for u in self.corrupted_users)
        if SERVER in self.corrupted_users:
            raise ValueError("use server_corrupted for the server")

    def validate(self, n: int) -> None:
        if not self.alpha < Fraction(1, 6):
            raise ValueError("alpha must be below 1/6")
        if len(self.corrupted_users) > self.alpha * n:
            raise ValueError(f"{len(self.corrupted_users)} corrupted users exceed alpha*n = {float(self.alpha * n)}")
        if any(not 1 <= u <= n for u in self.corrupted_users):
            raise ValueError("corrupted users must be in 1..n")

    @property
    def server(self) -> Strategy:
        """The server's behaviour: the strategy when corrupted, honest otherwise."""
        return self.strategy if self.server_corrupted else HONEST

    @property
    def users_silent(self) -> bool:
        return self.strategy.user_behaviour == "silent"

    def corrupted_mask(self, n: int) -> np.ndarray:
        mask = np.zeros(n + 1, dtype=bool)
        mask[list(self.corrupted_users)] = True
        return mask

    def is_corrupted(self, party: int) -> bool:
        return (party == SERVER and self.server_corrupted) or party in self.corrupted_users

    @classmethod
    def sample(cls, n: int, alpha, rng: np.random.Generator, *, server_corrupted: bool = False,
               strategy: Strategy | None = None, count: int | None = None) -> "AdversarySpec":
        alpha = as_fraction(alpha)
        if count is None:
            count = math.floor(alpha * n)
        chosen = rng.choice(np.arange(1, n + 1), size=count, replace=False) if count else []
        return cls(frozenset(int(u) for u in chosen), server_corrupted, strategy or HONEST, alpha)
