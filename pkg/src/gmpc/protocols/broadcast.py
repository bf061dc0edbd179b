"""Broadcast inside a committee through the server.

The sender hands its value to the server, which relays it to every member.
Members echo what they received to each other and abort when too many echoes
disagree; a second exchange of abort flags makes everyone abort when too
many members did.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .. import params
from ..netsim import SERVER, EnvelopeBatch, Network


@dataclass
class BroadcastOutcome:
    members: tuple[int, ...]
    outputs: dict[int, bytes | None]    # member -> value, None if it aborted
    aborted: dict[int, bool]
    sender_aborted: bool
    disagreements: dict[int, int]

    @property
    def all_aborted(self) -> bool:
        return all(self.aborted.values())

    def honest_outputs(self, corrupted) -> set[bytes | None]:
        return {v for m, v in self.outputs.items() if m not in corrupted}


def echo_threshold(alpha, size: int) -> Fraction:
    """A member aborts past (3 alpha + eps_b / 2) * size disagreeing echoes."""
    a = params.as_fraction(alpha)
    return (3 * a + params.broadcast_slack(a) / 2) * size


def abort_threshold(alpha, size: int) -> Fraction:
    """Everyone aborts past (alpha + eps_b / 2) * size aborted members."""
    a = params.as_fraction(alpha)
    return (a + params.broadcast_slack(a) / 2) * size


def committee_broadcast(net: Network, sender: int, value: bytes, members, alpha=None) -> BroadcastOutcome:
    """Broadcast `value` from user `sender` to the committee `members`."""
    spec = net.adversary
    alpha = spec.alpha if alpha is None else alpha
    members = tuple(int(m) for m in members)
    size = len(members)
    ids = np.array(members, dtype=np.int64)
    corrupted = spec.corrupted_users
    server = spec.server
    length = len(value)

    got_value = net.exchange_one(EnvelopeBatch("bc-send", sender, SERVER, length))[0]
    relay = [server.relay_broadcast(m, value) if got_value else None for m in members]
    relay_ok = net.exchange_one(EnvelopeBatch("bc-relay", SERVER, ids, length))
    received = [v if ok else None for v, ok in zip(relay, relay_ok)]

    # echoes between members, and from members back to the sender
    src, dst = np.meshgrid(ids, ids, indexing="ij")
    pair = src != dst
    src, dst = src[pair], dst[pair]
    to_sender = ids[ids != sender]
    batch_src = np.concatenate([src, to_sender])
    batch_dst = np.concatenate([dst, np.full(to_sender.size, sender)])
    delivered = net.exchange_one(EnvelopeBatch("bc-echo", batch_src, batch_dst, length))
    index = {m: k for k, m in enumerate(members)}
    disagree = {m: 0 for m in members}
    for s, d, ok in zip(src.tolist(), dst.tolist(), delivered[:src.size].tolist()):
        # a missing echo counts as disagreement
        if not ok or received[index[s]] is None or received[index[s]] != received[index[d]]:
            disagree[d] += 1
    for m in members:
        if received[index[m]] is None:
            disagree[m] = size
    sender_disagree = sum(1 for s, ok in zip(to_sender.tolist(), delivered[src.size:].tolist())
                          if not ok or received[index[s]] != value)
    if sender in index and received[index[sender]] != value:
        sender_disagree += 1
    limit = echo_threshold(alpha, size)
    aborted = {m: m not in corrupted and disagree[m] > limit for m in members}
    sender_aborted = sender not in corrupted and sender_disagree >= limit

    # abort flags; a missing flag counts as an abort
    flags = net.exchange_one(EnvelopeBatch("bc-flag", src, dst, 1))
    votes = {m: 0 for m in members}
    for s, d, ok in zip(src.tolist(), dst.tolist(), flags.tolist()):
        if not ok or aborted[s]:
            votes[d] += 1
    cutoff = abort_threshold(alpha, size)
    for m in members:
        if m not in corrupted and votes[m] > cutoff:
            aborted[m] = True
    net.metrics.charge_ops(ids, 2 * size)
    stopped = [m for m in members if aborted[m]] + ([sender] if sender_aborted else [])
    if stopped:
        net.abort(stopped, "bc-abort")
    outputs = {m: None if aborted[m] else received[index[m]] for m in members}
    return BroadcastOutcome(members, outputs, aborted, sender_aborted, disagree)
