"""Committee-level messaging over the personal-committee graph.

Every message here is a virtual message between committees (or between a
committee and the server). The network decides delivery per virtual
message; the member-level cost is charged analytically: a message from
committee A to committee B costs each member of A one share per member of B.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..netsim import SERVER, Network


@dataclass
class PcGraph:
    """Directed holder -> neighbor pairs: `neighbor` is in the holder's N."""

    parties: int
    holder: np.ndarray
    neighbor: np.ndarray

    @classmethod
    def from_pairs(cls, parties: int, holder, neighbor) -> "PcGraph":
        holder = np.asarray(holder, dtype=np.int64)
        neighbor = np.asarray(neighbor, dtype=np.int64)
        keys = np.unique(holder * parties + neighbor)
        return cls(parties, keys // parties, keys % parties)

    def neighbors_of(self, pc: int) -> np.ndarray:
        lo, hi = np.searchsorted(self.holder, [pc, pc + 1])
        return self.neighbor[lo:hi]

    def degree(self) -> np.ndarray:
        return np.bincount(self.holder, minlength=self.parties)

    def undirected_edges(self) -> tuple[np.ndarray, np.ndarray]:
        a = np.minimum(self.holder, self.neighbor)
        b = np.maximum(self.holder, self.neighbor)
        keys = np.unique(a * self.parties + b)
        return keys // self.parties, keys % self.parties


def charge_virtual(net: Network, members: np.ndarray, src: np.ndarray, dst: np.ndarray, length: int = 1, *,
                   server: int = SERVER) -> None:
    """Charge the member-level cost of delivered virtual messages.

    `members` is a (committees, size) array indexed by committee id, padded
    with -1; the id `server` stands for the server and owns no row (for
    personal committees the server id is 0 and row 0 is unused).
    """
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    if src.size == 0:
        return
    rows, size = members.shape
    n_total = net.metrics.parties
    to_server = dst == server
    from_server = src == server
    between = ~to_server & ~from_server
    send_weight = size * np.bincount(src[between], minlength=rows)[:rows] \
        + np.bincount(src[to_server], minlength=rows)[:rows]
    recv_weight = size * np.bincount(dst[between], minlength=rows)[:rows] \
        + np.bincount(dst[from_server], minlength=rows)[:rows]
    send_weight = send_weight.astype(np.float64)
    recv_weight = recv_weight.astype(np.float64)
    if server == SERVER:
        send_weight[SERVER] = recv_weight[SERVER] = 0
    flat = members.ravel()
    valid = flat >= 0
    sent = np.bincount(flat[valid], weights=np.repeat(send_weight, size)[valid], minlength=n_total)[:n_total]
    received = np.bincount(flat[valid], weights=np.repeat(recv_weight, size)[valid], minlength=n_total)[:n_total]
    sent[SERVER] += size * int(from_server.sum())
    received[SERVER] += size * int(to_server.sum())
    sent = np.rint(sent).astype(np.int64)
    received = np.rint(received).astype(np.int64)
    net.metrics.charge_messages(sent, received, sent * length, received * length)


def virtual_exchange(net: Network, kind: str, src, dst, members: np.ndarray, length: int = 1, *,
                     server: int = SERVER) -> np.ndarray:
    src, dst = np.broadcast_arrays(np.asarray(src, dtype=np.int64), np.asarray(dst, dtype=np.int64))
    delivered = net.virtual_round(kind, src, dst)
    charge_virtual(net, members, src[delivered], dst[delivered], length, server=server)
    return delivered


def missing_expected(graph: PcGraph, src: np.ndarray, dst: np.ndarray, delivered: np.ndarray,
                     expecting: np.ndarray) -> np.ndarray:
    """PCs (mask) that hold a neighbor whose message did not arrive."""
    parties = graph.parties
    got = np.unique(src[delivered] * parties + dst[delivered])
    watch = expecting[graph.holder]
    keys = graph.neighbor[watch] * parties + graph.holder[watch]
    missing = ~np.isin(keys, got, assume_unique=False)
    out = np.zeros(parties, dtype=bool)
    out[graph.holder[watch][missing]] = True
    return out


def alive_iterations(net: Network, graph: PcGraph, alive: np.ndarray, iterations: int, members: np.ndarray, *,
                     kind: str = "pc-alive", steadfast: np.ndarray | None = None,
                     abort_round: np.ndarray | None = None, first_round: int = 1) -> np.ndarray:
    """Run the alive iterations: each alive PC messages every neighbor, and a
    PC that misses the message of any neighbor aborts. PCs in `steadfast`
    (adversarial ones) keep sending and never abort. Returns the new alive
    mask; abort_round (if given) records the iteration of each abort."""
    alive = alive.copy()
    steadfast = np.zeros_like(alive) if steadfast is None else steadfast
    for t in range(iterations):
        sending = alive[graph.holder]
        src, dst = graph.holder[sending], graph.neighbor[sending]
        delivered = virtual_exchange(net, kind, src, dst, members)
        failed = missing_expected(graph, src, dst, delivered, alive & ~steadfast)
        record_aborts(failed & alive, abort_round, first_round + t)
        alive &= ~failed | steadfast
    return alive


def record_aborts(mask: np.ndarray, abort_round: np.ndarray | None, round_index: int) -> None:
    if abort_round is not None:
        fresh = mask & (abort_round < 0)
        abort_round[fresh] = round_index


def committee_user_exchange(net: Network, kind: str, committees, users, members: np.ndarray, length: int = 1, *,
                            to_user: bool = True) -> np.ndarray:
    """Virtual messages between committee `committees[k]` and user `users[k]`.

    Each member of the committee exchanges one message with the user.
    """
    committees, users = np.broadcast_arrays(np.asarray(committees, dtype=np.int64),
                                            np.asarray(users, dtype=np.int64))
    committees, users = committees.ravel(), users.ravel()
    src, dst = (committees, users) if to_user else (users, committees)
    delivered = net.virtual_round(kind, src, dst)
    rows = members[committees[delivered]]
    valid = rows >= 0
    parties = net.metrics.parties
    member_side = np.bincount(rows[valid], minlength=parties)[:parties]
    user_side = np.bincount(users[delivered], weights=valid.sum(axis=1), minlength=parties)[:parties]
    user_side = np.rint(user_side).astype(np.int64)
    sent, received = (member_side, user_side) if to_user else (user_side, member_side)
    net.metrics.charge_messages(sent, received, sent * length, received * length)
    return delivered
