"""Star topology: users talk only through the server, with a Board PKI.

Payloads are signed by the sender and encrypted to the receiver. The server
relays opaque bytes; a payload that fails to decrypt or verify is treated by
the receiver exactly like a blocked message.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..crypto.encoding import frame, unframe
from ..crypto.pke import EncKeypair, pke_dec, pke_enc, pke_gen
from ..crypto.sig import SigKeypair, sig_gen, sig_sign, sig_verify
from .network import Network
from .types import AdversarySpec, Envelope


@dataclass(frozen=True)
class BoardRecord:
    owner: int
    pk_sig: bytes
    pk_enc: bytes


@dataclass(frozen=True)
class UserKeys:
    owner: int
    sig: SigKeypair
    enc: EncKeypair

    @classmethod
    def generate(cls, owner: int, kappa: int, rng: np.random.Generator) -> "UserKeys":
        return cls(owner, sig_gen(kappa, rng), pke_gen(rng))


class Board:
    """Registration functionality the server cannot influence."""

    def __init__(self):
        self.records: dict[int, BoardRecord] = {}
        self.requests: list[tuple[int, int]] = []

    def __len__(self) -> int:
        return len(self.records)


def board_register(board: Board, owner: int, pk_sig: bytes, pk_enc: bytes) -> bool:
    """Store the first registration per owner; later ones are ignored."""
    if owner in board.records:
        return False
    board.records[owner] = BoardRecord(owner, pk_sig, pk_enc)
    return True


def board_get(board: Board, target: int, requester: int) -> tuple[bytes, bytes] | None:
    board.requests.append((target, requester))
    record = board.records.get(target)
    return None if record is None else (record.pk_sig, record.pk_enc)


def secure_envelope(src: int, dst: int, payload: bytes, keys: UserKeys, board: Board,
                    round_index: int, rng: np.random.Generator, kind: str = "msg") -> Envelope:
    if keys.owner != src:
        raise ValueError("keys do not belong to the sender")
    if src not in board.records:
        raise ValueError(f"sender {src} is not registered")
    found = board_get(board, dst, src)
    if found is None:
        raise ValueError(f"receiver {dst} is not registered")
    signature = sig_sign(keys.sig.sk, _signed_bytes(src, dst, payload))
    sealed = pke_enc(found[1], frame([signature, payload]), rng)
    return Envelope(src, dst, round_index, sealed, kind)


def open_envelope(envelope: Envelope, keys: UserKeys, board: Board) -> bytes | None:
    """Receiver side: None means "treat as blocked"."""
    found = board_get(board, envelope.src, envelope.dst)
    if found is None or keys.owner != envelope.dst:
        return None
    plain = pke_dec(keys.enc.sk, envelope.payload)
    if plain is None:
        return None
    try:
        signature, payload = unframe(plain)
    except ValueError:
        return None
    if not sig_verify(found[0], _signed_bytes(envelope.src, envelope.dst, payload), signature):
        return None
    return payload


def _signed_bytes(src: int, dst: int, payload: bytes) -> bytes:
    return b"star" + src.to_bytes(4, "little") + dst.to_bytes(4, "little") + payload


class StarNetwork(Network):
    """Network wrapper that seals every user-to-user payload.

    Protocols call run_round with plaintext envelopes exactly as on the full
    network. Each party's keys are registered on the Board at construction.
    """

    def __init__(self, n_users: int, adversary: AdversarySpec | None = None, *, kappa: int = 128,
                 rng: np.random.Generator | None = None, **kwargs):
        super().__init__(n_users, adversary, **kwargs)
        self.rng = rng if rng is not None else np.random.default_rng(0)
        self.board = Board()
        self.keys = {p: UserKeys.generate(p, kappa, self.rng) for p in range(n_users + 1)}
        for p, k in self.keys.items():
            board_register(self.board, p, k.sig.pk, k.enc.pk)
        self.rejected = 0

    def run_round(self, intents: list[Envelope]) -> list[Envelope]:
        sealed = [secure_envelope(e.src, e.dst, e.payload, self.keys[e.src], self.board, e.round, self.rng, e.kind)
                  for e in intents]
        if self.adversary.server_corrupted:
            strategy = self.adversary.strategy
            sealed = [Envelope(e.src, e.dst, e.round, strategy.tamper(e.src, e.dst, e.payload), e.kind)
                      for e in sealed]
        delivered = super().run_round(sealed)
        opened = []
        for env in delivered:
            payload = open_envelope(env, self.keys[env.dst], self.board)
            if payload is None:
                self.rejected += 1
                continue
            opened.append(Envelope(env.src, env.dst, env.round, payload, env.kind))
        return opened
