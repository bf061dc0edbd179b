"""Shipped corrupted-server strategies.

Each attack names the protocol it targets. Running it must end either in a
global abort or in an outcome the ideal world also allows.
"""
from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from ..crypto.field import P
from ..netsim import EnvelopeBatch, Strategy
from ..protocols.functions import get_function


class BlockLightestBin(Strategy):
    name = "block-lightest-bin"
    description = "announce corrupted users as the elected committee instead of the lightest bin"

    def announce_committee(self, pc, committee, bin_index, bins):
        return tuple(sorted(self.corrupted))[:max(1, len(committee))], bin_index


class InconsistentCommitment(Strategy):
    name = "inconsistent-commitment"
    description = "commit to a different committee vector for every other user"

    def committed_vector(self, user, vector):
        if user % 2:
            return vector
        return [bytes(len(v)) for v in vector]


class KeySubstitution(Strategy):
    name = "key-substitution"
    description = "relay a substituted verification key to the personal committees of C_0 members"

    def relay_pk(self, pc, pk):
        return bytes(b ^ 0xFF for b in pk)


class WrongEvaluation(Strategy):
    name = "wrong-evaluation"
    description = "evaluate a different function and prove the result"

    def __init__(self, substitute: str = "identity", **params):
        super().__init__(substitute=substitute, **params)
        self.substitute = substitute

    def evaluation_function(self, function):
        return get_function(self.substitute, function.block_bytes)


class CorruptEncoding(Strategy):
    name = "corrupt-encoding"
    description = "hand wrong codeword slices to a quarter of the holders"

    def __init__(self, fraction: float = 0.25, **params):
        super().__init__(fraction=fraction, **params)
        self.fraction = fraction
        self.damaged = np.zeros(0, dtype=np.int64)

    def corrupt_codeword(self, slices):
        holders = slices.shape[0]
        count = int(self.fraction * (holders - 1))
        self.damaged = np.sort(self.rng.choice(holders, size=count, replace=False))
        out = slices.copy()
        out[self.damaged, 0, 0] = (out[self.damaged, 0, 0] + np.uint64(1)) % np.uint64(P)
        return out


class InputBlocking(Strategy):
    name = "input-blocking"
    description = "drop the input messages of a chosen set of users"

    def __init__(self, count: int | None = None, fraction: float | None = None, **params):
        super().__init__(count=count, fraction=fraction, **params)
        self.count, self.fraction = count, fraction
        self.targets: frozenset[int] = frozenset()

    def choose(self, n: int, alpha) -> frozenset[int]:
        count = self.count if self.count is not None else int(float(alpha) * n * (self.fraction or 1.0))
        picked = self.rng.choice(np.arange(1, n + 1), size=min(count, n), replace=False)
        self.targets = frozenset(int(u) for u in picked)
        return self.targets

    def blocked_inputs(self, n):
        return self.targets

    def block_virtual(self, round_index, kind, src, dst):
        if kind != "main-input" or not self.targets:
            return None
        return np.isin(src, np.fromiter(self.targets, dtype=np.int64))


class Flood(Strategy):
    """Corrupted users flood one honest user; the server stays honest, so its
    guard blocks the flooders."""

    name = "flood"
    description = "corrupted users message one victim from more than delta^3 distinct senders"

    def launch(self, net, victim: int) -> np.ndarray:
        """One round in which every corrupted user messages `victim`;
        returns the users the guard blocked."""
        flooders = np.array(sorted(self.corrupted - {victim}), dtype=np.int64)
        if flooders.size:
            net.exchange_one(EnvelopeBatch("flood", flooders, victim, 1))
        return np.flatnonzero(net.blocked)


@dataclass(frozen=True)
class Attack:
    name: str
    description: str
    protocol: str                    # protocol the runner drives for this attack
    factory: Callable[..., Strategy]
    server_corrupted: bool = True


ATTACKS: dict[str, Attack] = {
    a.name: a for a in (
        Attack("block-lightest-bin", BlockLightestBin.description, "election", BlockLightestBin),
        Attack("inconsistent-commitment", InconsistentCommitment.description, "setup", InconsistentCommitment),
        Attack("key-substitution", KeySubstitution.description, "many", KeySubstitution),
        Attack("wrong-evaluation", WrongEvaluation.description, "main", WrongEvaluation),
        Attack("corrupt-encoding", CorruptEncoding.description, "general", CorruptEncoding),
        Attack("input-blocking", InputBlocking.description, "main", InputBlocking),
        Attack("flood", Flood.description, "main", Flood, server_corrupted=False),
    )
}


def make_attack(name: str, **params) -> tuple[Attack, Strategy]:
    if name not in ATTACKS:
        raise KeyError(f"unknown attack {name!r}; known: {sorted(ATTACKS)}")
    attack = ATTACKS[name]
    return attack, attack.factory(**params)
