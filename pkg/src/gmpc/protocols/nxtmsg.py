"""The NxtMsg hybrid oracle and the two ways of running virtual parties.

A committee holds its private state as Shamir shares, one per member. Each
protocol step calls the oracle, which reconstructs the state from the shares
of the members that are present, runs the step, and re-shares the new state.
With fewer shares than the threshold every member gets bottom instead.
"""
from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from .. import params
from ..committees.personal import at_least
from ..crypto import field
from ..crypto.sharing import reconstruct_limbs, share_limbs
from ..netsim import Network

# step(party, state) -> (new state, outgoing message)
StepFn = Callable[[int, bytes], tuple[bytes, bytes]]


@dataclass
class SharedState:
    shares: np.ndarray   # (B, size, L) field elements
    lengths: np.ndarray  # (B,) byte length of each secret
    degree: int


def share_states(values: list[bytes], size: int, degree: int, rng: np.random.Generator) -> SharedState:
    limbs = max(1, max((field.limb_count(len(v)) for v in values), default=1))
    packed = np.zeros((len(values), limbs), dtype=np.uint64)
    for k, v in enumerate(values):
        body = field.pack_bytes(v)
        packed[k, :len(body)] = body
    shares = share_limbs(packed, degree, size, rng)
    return SharedState(shares, np.array([len(v) for v in values], dtype=np.int64), degree)


def open_states(state: SharedState, present: np.ndarray) -> list[bytes | None]:
    secrets, ok = reconstruct_limbs(state.shares, present, state.degree)
    return [field.unpack_bytes(secrets[k], int(state.lengths[k])) if ok[k] else None
            for k in range(len(state.lengths))]


@dataclass
class NxtMsgCall:
    committees: np.ndarray   # (B,) committee ids
    state: SharedState
    present: np.ndarray      # (B, size) members whose share reaches the oracle
    step: str
    threshold: int | np.ndarray   # per committee, or one for all


@dataclass
class NxtMsgResult:
    messages: list[bytes | None]
    state: SharedState
    bottom: np.ndarray       # (B,) committees that got bottom


def nxtmsg_oracle(call: NxtMsgCall, step_fn: StepFn, rng: np.random.Generator,
                  dictated: dict[int, tuple[bytes, bytes]] | None = None) -> NxtMsgResult:
    """Run one step for a batch of committees. `dictated` maps committees
    whose output the adversary chooses to that output."""
    dictated = dictated or {}
    enough = call.present.sum(axis=1) >= call.threshold
    views = open_states(call.state, call.present & enough[:, None])
    new_states, messages = [], []
    bottom = np.zeros(len(views), dtype=bool)
    for k, (committee, view) in enumerate(zip(call.committees.tolist(), views)):
        if committee in dictated:
            state, message = dictated[committee]
        elif not enough[k] or view is None:
            bottom[k] = True
            state, message = b"", None
        else:
            state, message = step_fn(committee, view)
        new_states.append(state)
        messages.append(message)
    size = call.state.shares.shape[1]
    return NxtMsgResult(messages, share_states(new_states, size, call.state.degree, rng), bottom)


class DirectParties:
    """Virtual parties that are single honest processes (no sharing)."""

    def __init__(self, count: int):
        self.states = [b""] * count

    @property
    def count(self) -> int:
        return len(self.states)

    def load(self, parties, values) -> None:
        for p, v in zip(np.asarray(parties).tolist(), values):
            self.states[p] = v

    def step(self, kind: str, parties, step_fn: StepFn) -> tuple[list[bytes | None], np.ndarray]:
        parties = np.asarray(parties, dtype=np.int64)
        messages = []
        for p in parties.tolist():
            self.states[p], message = step_fn(p, self.states[p])
            messages.append(message)
        return messages, np.zeros(parties.size, dtype=bool)


class CommitteeParties:
    """Virtual party i is committee i of a member matrix; its state is shared
    among the members and every step goes through the NxtMsg oracle."""

    def __init__(self, net: Network, members: np.ndarray, rng: np.random.Generator, *, alpha=None,
                 threshold: int | None = None, degree: int | None = None):
        self.net, self.members, self.rng = net, members, rng
        spec = net.adversary
        size = members.shape[1]
        sizes = (members >= 0).sum(axis=1)
        self.beta = self.estimate_beta()
        alpha = spec.alpha if alpha is None else alpha
        # thresholds are relative to each committee's own size
        self.thresholds = np.array([threshold if threshold is not None else
                                    at_least(params.committee_share_threshold(self.beta, alpha, int(s)))
                                    for s in sizes], dtype=np.int64)
        self.degree = degree if degree is not None else max(0, (int(sizes.min()) - 1) // 3)
        self.states = SharedState(np.zeros((members.shape[0], size, 1), dtype=np.uint64),
                                  np.zeros(members.shape[0], dtype=np.int64), self.degree)
        self.calls = 0

    @property
    def count(self) -> int:
        return self.members.shape[0]

    def estimate_beta(self) -> float:
        """Malicious fraction among alive users (supplied by the simulator)."""
        alive = ~self.net.aborted[1:]
        corrupted = self.net.adversary.corrupted_mask(self.net.n)[1:]
        return float((alive & corrupted).sum() / max(1, alive.sum()))

    def present(self, parties: np.ndarray) -> np.ndarray:
        rows = self.members[parties]
        spec = self.net.adversary
        silent = spec.corrupted_mask(self.net.n) & (spec.strategy.user_behaviour == "silent")
        safe = np.where(rows >= 0, rows, 0)
        return (rows >= 0) & ~self.net.aborted[safe] & ~silent[safe]

    def load(self, parties, values) -> None:
        parties = np.asarray(parties, dtype=np.int64)
        fresh = share_states(list(values), self.members.shape[1], self.degree, self.rng)
        self._store(parties, fresh)

    def step(self, kind: str, parties, step_fn: StepFn,
             dictated: dict[int, tuple[bytes, bytes]] | None = None) -> tuple[list[bytes | None], np.ndarray]:
        parties = np.asarray(parties, dtype=np.int64)
        if parties.size == 0:
            return [], np.zeros(0, dtype=bool)
        state = SharedState(self.states.shares[parties], self.states.lengths[parties], self.degree)
        present = self.present(parties)
        call = NxtMsgCall(parties, state, present, kind, self.thresholds[parties])
        result = nxtmsg_oracle(call, step_fn, self.rng, dictated)
        self._store(parties, result.state)
        self.calls += parties.size
        rows = self.members[parties]
        valid = rows >= 0
        limbs = result.state.shares.shape[2]
        self.net.metrics.charge_ops(rows[valid], 2 * rows.shape[1] * limbs)
        self.net.log_event(f"nxtmsg:{kind}", parties, -1, 0)
        return result.messages, result.bottom

    def _store(self, parties: np.ndarray, fresh: SharedState) -> None:
        width = max(self.states.shares.shape[2], fresh.shares.shape[2])
        if width > self.states.shares.shape[2]:
            pad = np.zeros(self.states.shares.shape[:2] + (width - self.states.shares.shape[2],), dtype=np.uint64)
            self.states.shares = np.concatenate([self.states.shares, pad], axis=2)
        block = np.zeros((parties.size,) + self.states.shares.shape[1:], dtype=np.uint64)
        block[:, :, :fresh.shares.shape[2]] = fresh.shares
        self.states.shares[parties] = block
        self.states.lengths[parties] = fresh.lengths
