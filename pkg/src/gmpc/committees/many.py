"""Committee tree: the elected committee C_0 spreads a verification key over
the personal-committee graph, then spawns C_1..C_n pairwise; each C_j proves
itself to user j with a signed nonce and alive answers are summed up the tree.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import params
from ..crypto import sig_gen, sig_sign, sig_verify
from ..netsim import SERVER, Network
from .flood import committee_user_exchange, missing_expected, virtual_exchange
from .personal import at_least
from .setup import PcsgWitness
from .subsets import sample_distinct

TREE_SERVER = -1  # id of the server among committee ids 0..n
UNKNOWN, BOTTOM = 0, 1


@dataclass
class CommitteeTree:
    committees: tuple[tuple[int, ...], ...]   # C_0..C_n
    pk: bytes
    sk: bytes

    @property
    def n(self) -> int:
        return len(self.committees) - 1

    @staticmethod
    def children(index: int, n: int) -> tuple[int, ...]:
        return tuple(c for c in (2 * index + 1, 2 * index + 2) if c <= n)

    @staticmethod
    def parent(index: int) -> int | None:
        return (index - 1) // 2 if index > 0 else None

    def member_matrix(self) -> np.ndarray:
        width = max(len(c) for c in self.committees)
        out = np.full((len(self.committees), width), -1, dtype=np.int64)
        for i, c in enumerate(self.committees):
            out[i, :len(c)] = c
        return out

    def memberships(self) -> np.ndarray:
        """Number of committees each user (index 1..n) belongs to."""
        flat = self.member_matrix().ravel()
        return np.bincount(flat[flat > 0], minlength=self.n + 1)

    def view_of(self, user: int) -> set[int]:
        """Committee indices user holds: its own, and those adjacent to its memberships."""
        held = {user}
        for j, c in enumerate(self.committees):
            if user in c:
                held.add(j)
                held.update(self.children(j, self.n))
                if j > 0:
                    held.add(self.parent(j))
        return held


@dataclass
class ManyOutcome:
    tree: CommitteeTree | None        # None on abort
    pk_accepted: np.ndarray           # (n + 1,) PCs that accepted the key
    nonce_accepted: np.ndarray        # (n + 1,) users that verified a nonce from their committee
    forged_accepted: int              # fabricated committees a user accepted (expected 0)
    total_alive: int | None           # aggregated at C_0, None if the aggregation broke
    aborted: bool


def _tree_levels(n: int) -> list[np.ndarray]:
    levels, start = [], 1
    while start <= n:
        stop = min(n, 2 * start)
        levels.append(np.arange(start, stop + 1))
        start = stop + 1
    return levels


def sample_tree(n: int, kappa: int, root: tuple[int, ...], rng: np.random.Generator) -> tuple[tuple[int, ...], ...]:
    rows = sample_distinct(rng, np.zeros(n, dtype=np.int64), n, kappa, exclude_owner=False)
    return (tuple(root),) + tuple(tuple(sorted(r)) for r in rows.tolist())


def many_committees(elected: tuple[int, ...], witness: PcsgWitness, net: Network, rng: np.random.Generator,
                    steadfast: np.ndarray | None = None) -> ManyOutcome:
    n, kappa, graph = witness.n, witness.kappa, witness.graph
    spec = net.adversary
    server = spec.server
    pc_members = witness.members
    steadfast = np.zeros(n + 1, dtype=bool) if steadfast is None else steadfast
    corrupted = spec.corrupted_mask(n)
    silent = corrupted & (spec.strategy.user_behaviour == "silent")
    alive_pc = witness.alive.copy()
    alive_pc[SERVER] = False
    c0 = np.array(sorted(elected), dtype=np.int64)
    size0 = len(c0)
    keys = sig_gen(kappa, rng)
    pk = keys.pk

    # C_0 hands pk to the server and to its own users; each user and the
    # server forward it to the user's PC
    c0_matrix = np.full((1, kappa), -1, dtype=np.int64)
    c0_matrix[0, :size0] = c0
    to_users = committee_user_exchange(net, "cm-pk", 0, c0, c0_matrix, len(pk))
    relayed = {int(i): (server.relay_pk(int(i), pk) if spec.server_corrupted else pk) for i in c0}
    from_server = virtual_exchange(net, "pk-relay", SERVER, c0, pc_members, len(pk))
    from_user = committee_user_exchange(net, "pk-user", c0, c0, pc_members, len(pk), to_user=False)
    values: dict[bytes, int] = {}
    table = np.zeros((n + 1, size0), dtype=np.int8)
    for k, i in enumerate(c0.tolist()):
        if not alive_pc[i]:
            continue
        user_value = None
        if from_user[k] and not silent[i]:
            if corrupted[i] and spec.server_corrupted:
                user_value = relayed[i]
            elif to_users[k]:
                user_value = pk
        server_value = relayed[i] if from_server[k] else None
        if user_value is not None and user_value == server_value:
            table[i, k] = 2 + values.setdefault(user_value, len(values))
        else:
            table[i, k] = BOTTOM

    # flood the key tables: one initial send plus ell + 1 iterations
    for t in range(witness.iterations + 1):
        sending = alive_pc[graph.holder]
        src, dst = graph.holder[sending], graph.neighbor[sending]
        delivered = virtual_exchange(net, "pk-flood", src, dst, pc_members, 33 * size0)
        failed = missing_expected(graph, src, dst, delivered, alive_pc & ~steadfast)
        table = _merge(table, src[delivered], dst[delivered])
        alive_pc &= ~failed | steadfast
    need = at_least(params.pk_accept_min(witness.alpha, size0))
    accepted_code = np.zeros(n + 1, dtype=np.int64)
    for code in range(2, 2 + len(values)):
        hits = (table == code).sum(axis=1) >= need
        accepted_code[hits & (accepted_code == 0)] = code
    pk_accepted = alive_pc & (accepted_code > 0)
    by_code = {2 + v: k for k, v in values.items()}
    owners = np.flatnonzero(pk_accepted)
    told = committee_user_exchange(net, "pk-accept", owners, owners, pc_members, len(pk))
    user_pk: dict[int, bytes] = {int(i): by_code[int(accepted_code[i])] for i in owners[told]}

    # spawn the tree level by level; sk travels shared from parent to child
    committees = sample_tree(n, kappa, tuple(c0.tolist()), rng)
    tree = CommitteeTree(committees, pk, keys.sk)
    matrix = tree.member_matrix()
    has_sk = np.zeros(n + 1, dtype=bool)
    has_sk[0] = True
    for level in _tree_levels(n):
        parents = (level - 1) // 2
        got = virtual_exchange(net, "cm-spawn", parents[has_sk[parents]], level[has_sk[parents]], matrix,
                               64 + 4 * kappa, server=TREE_SERVER)
        has_sk[level[has_sk[parents]][got]] = True

    # signed nonces; fabricated committees sign with a key of their own
    users = np.arange(1, n + 1)
    senders = users[has_sk[1:]]
    delivered = committee_user_exchange(net, "cm-nonce", senders, senders, matrix, kappa // 8 + 64)
    nonce_accepted = np.zeros(n + 1, dtype=bool)
    for j in senders[delivered].tolist():
        if j not in user_pk or net.aborted[j] or silent[j]:
            continue
        nonce = rng.bytes(max(1, kappa // 8))
        nonce_accepted[j] = sig_verify(user_pk[j], nonce, sig_sign(keys.sk, nonce))
    net.metrics.charge_ops(users, 2)
    forged_accepted = 0
    forged = server.forged_committees(n) if spec.server_corrupted else {}
    if forged:
        rogue = sig_gen(kappa, rng)
        for j in sorted(forged):
            nonce = rng.bytes(max(1, kappa // 8))
            if j in user_pk and sig_verify(user_pk[j], nonce, sig_sign(rogue.sk, nonce)):
                forged_accepted += 1
    # users that never received a valid signed nonce abort
    net.abort(users[~nonce_accepted[1:] & ~silent[1:] & ~net.aborted[1:]])

    # alive replies and aggregation up the tree
    repliers = users[nonce_accepted[1:]]
    replied = np.zeros(n + 1, dtype=np.int64)
    replied[repliers[committee_user_exchange(net, "cm-alive", repliers, repliers, matrix, to_user=False)]] = 1
    subtotal = replied.copy()
    broken = ~has_sk.copy()
    for level in reversed(_tree_levels(n)):
        parents = (level - 1) // 2
        senders_ok = ~broken[level]
        got = np.zeros(len(level), dtype=bool)
        got[senders_ok] = virtual_exchange(net, "cm-aggregate", level[senders_ok], parents[senders_ok], matrix, 8,
                                           server=TREE_SERVER)
        np.add.at(subtotal, parents[got], subtotal[level[got]])
        broken[parents[~got]] = True
    total = None if broken[0] else int(subtotal[0])
    aborted = total is None or total < at_least(params.many_alive_min(witness.alpha, n))
    if aborted:
        holders = users[has_sk[1:]]
        committee_user_exchange(net, "cm-abort", holders, holders, matrix)
        net.abort(users[~net.aborted[1:] & ~silent[1:]])
    return ManyOutcome(None if aborted else tree, pk_accepted, nonce_accepted, forged_accepted, total, aborted)


def _merge(table: np.ndarray, src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    """Fill unknown entries of each receiver with what its senders hold."""
    if src.size == 0:
        return table
    order = np.argsort(dst, kind="stable")
    src, dst = src[order], dst[order]
    starts = np.flatnonzero(np.r_[True, dst[1:] != dst[:-1]])
    incoming = np.maximum.reduceat(table[src], starts, axis=0)
    receivers = dst[starts]
    current = table[receivers]
    table = table.copy()
    table[receivers] = np.where(current == UNKNOWN, incoming, current)
    return table


def ideal_many_committees(n: int, kappa: int, alive: np.ndarray, rng: np.random.Generator) -> CommitteeTree:
    """Ideal sampler: lightest bin over the alive users as C_0 and uniform
    kappa-subsets of the alive users for C_1..C_n."""
    alive_users = np.flatnonzero(alive[1:]) + 1
    bins = max(1, -(-len(alive_users) // kappa))
    choices = rng.integers(1, bins + 1, size=len(alive_users))
    occupancy = np.bincount(choices, minlength=bins + 1)[1:]
    lightest = int(np.argmin(occupancy)) + 1
    root = tuple(int(u) for u in alive_users[choices == lightest])
    rows = sample_distinct(rng, np.zeros(n, dtype=np.int64), len(alive_users), kappa, exclude_owner=False)
    committees = (root,) + tuple(tuple(sorted(alive_users[r - 1].tolist())) for r in rows)
    keys = sig_gen(kappa, rng)
    return CommitteeTree(committees, keys.pk, keys.sk)
