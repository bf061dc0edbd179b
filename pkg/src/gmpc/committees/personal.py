"""Personal committees: every user and the server jointly sample a random
committee for the user, the server commits to the vector of all
committees, and users cross-check that commitment before trusting it.

Users act in batches: one network exchange per protocol step, with the
per-user logic vectorized over numpy arrays. The committed vectors are real
Merkle trees; an honest server builds one tree, a corrupted one may commit
to a different vector per user (Strategy.committed_vector).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .. import params
from ..crypto import hiding_commit, hiding_verify
from ..crypto.encoding import encode_ints
from ..crypto.merkle import MerkleCommitment, MerkleTree, Opening, VcParams, vc_commit, vc_setup, vc_verify, verify_cost
from ..netsim import HONEST, SERVER, EnvelopeBatch, Network, Strategy
from .subsets import sample_distinct, subset_from_string, xor_bytes

BOT = b"\x00"
ENTRY_WIDTH = 4


def encode_members(members) -> bytes:
    return encode_ints(members, ENTRY_WIDTH)


def at_least(threshold) -> int:
    """Smallest integer count satisfying count >= threshold."""
    return math.ceil(threshold)


def more_than(threshold) -> int:
    """Smallest integer count satisfying count > threshold."""
    return math.floor(threshold) + 1


@dataclass
class PersonalCommittee:
    owner: int
    members: tuple[int, ...]
    alive: bool
    commit_handle: MerkleCommitment | None


@dataclass
class CoinToss:
    owner: int
    members: tuple[int, ...] | None
    status: str  # "ok", "withheld" (user outputs bottom) or "inactive" (bad decommitment)


def coin_bytes(n: int, kappa: int) -> int:
    return math.ceil(params.coin_bits(n, kappa) / 8)


def pc_coin_toss(user: int, n: int, kappa: int, rng: np.random.Generator, *, server: Strategy = HONEST,
                 behaviour: str = "passive") -> CoinToss:
    """One user's committee coin toss with the server (no network)."""
    size = coin_bytes(n, kappa)
    r = rng.bytes(size)
    com, salt = hiding_commit(r, rng)
    if server.withhold_coin(user):
        return CoinToss(user, None, "withheld")
    s = rng.bytes(size)
    members = subset_from_string(xor_bytes(r, s), n, kappa)
    opened = r if behaviour != "bad-decommit" else bytes([r[0] ^ 1]) + r[1:]
    if not hiding_verify(com, opened, salt):
        return CoinToss(user, members, "inactive")
    return CoinToss(user, members, "ok")


@dataclass
class CommittedVectors:
    """The distinct vectors the server committed to, as integer entry codes."""

    pp: VcParams
    trees: list[MerkleTree]
    codes: np.ndarray                      # (vectors, n) entry codes
    group_of: np.ndarray                   # (n + 1,) vector index per user, -1 if none
    verified: dict = field(default_factory=dict)

    def verify(self, group: int, position: int) -> bool:
        """Check a server opening of vector `group` at a 0-based position."""
        key = (group, position)
        ok = self.verified.get(key)
        if ok is None:
            tree = self.trees[group]
            opening = Opening((position,), (tree.path(position),))
            ok = self.verified[key] = vc_verify(self.pp, tree.root, [tree.values[position]], [position], opening)
        return ok

    def verify_many(self, groups, positions) -> np.ndarray:
        """Vectorized verify over aligned (group, 0-based position) arrays."""
        groups = np.asarray(groups, dtype=np.int64)
        positions = np.asarray(positions, dtype=np.int64)
        if groups.size == 0:
            return np.zeros(groups.shape, dtype=bool)
        n = self.codes.shape[1]
        keys, inverse = np.unique(groups * n + positions, return_inverse=True)
        ok = np.array([self.verify(int(k // n), int(k % n)) for k in keys], dtype=bool)
        return ok[inverse].reshape(groups.shape)


class PersonalCommitteeRun:
    """State of one execution of the personal-committee protocol."""

    def __init__(self, n: int, kappa: int, net: Network, rng: np.random.Generator, alpha=None):
        if kappa > n - 1:
            raise ValueError("kappa must be smaller than n")
        self.n, self.kappa, self.net, self.rng = n, kappa, net, rng
        self.spec = net.adversary
        self.alpha = params.as_fraction(alpha if alpha is not None else self.spec.alpha)
        self.server = self.spec.server
        corrupted = self.spec.corrupted_mask(n)
        behaviour = self.spec.strategy.user_behaviour
        self.corrupted = corrupted
        self.silent = corrupted & (behaviour == "silent")
        self.bad_decommit = corrupted & (behaviour == "bad-decommit")
        self.members = np.zeros((n + 1, kappa), dtype=np.int64)
        self.has_pc = np.zeros(n + 1, dtype=bool)
        self.inactive = np.zeros(n + 1, dtype=bool)
        self.pc_active = np.zeros(n + 1, dtype=bool)
        self.accepted = np.zeros((n + 1, kappa), dtype=bool)   # member slot holds (i, P_i)
        self.vectors: CommittedVectors | None = None
        self.ops = np.zeros(n + 1, dtype=np.int64)
        self.depth = vc_setup(kappa, n).depth

    # -- helpers -----------------------------------------------------------------
    @property
    def users(self) -> np.ndarray:
        return np.arange(1, self.n + 1)

    def remaining(self) -> np.ndarray:
        """Users still taking part: not aborted, not inactive, holding a PC."""
        mask = self.has_pc & ~self.inactive & ~self.net.aborted
        mask[SERVER] = False
        return mask

    def acting(self) -> np.ndarray:
        """Remaining users that send messages (silent corrupted users do not)."""
        return self.remaining() & ~self.silent

    def abort(self, users, reason: str = "abort") -> None:
        users = np.asarray(users, dtype=np.int64)
        users = users[~self.silent[users]]
        self.net.abort(users, reason)

    def _flush_ops(self) -> None:
        self.net.metrics.charge_ops_vector(self.ops)
        self.ops[:] = 0

    # -- step 1: coin toss -----------------------------------------------------------
    def coin_toss(self) -> None:
        n, kappa, net = self.n, self.kappa, self.net
        size = coin_bytes(n, kappa)
        users = self.users
        r = [self.rng.bytes(size) for _ in users]
        commitments = [hiding_commit(x, self.rng) for x in r]
        sent = net.exchange_one(EnvelopeBatch("coin-commit", users, SERVER, 32))
        withhold = np.array([self.server.withhold_coin(int(u)) for u in users], dtype=bool) \
            if self.spec.server_corrupted else np.zeros(n, dtype=bool)
        answer = users[sent & ~withhold]
        got = net.exchange_one(EnvelopeBatch("coin-share", SERVER, answer, size))
        has_share = np.zeros(n + 1, dtype=bool)
        has_share[answer[got]] = True
        self.abort(users[~has_share[1:]])
        openers = users[has_share[1:] & ~net.aborted[1:]]
        opened = net.exchange_one(EnvelopeBatch("coin-open", openers, SERVER, size + 32))
        for user, delivered in zip(openers.tolist(), opened.tolist()):
            s = self.rng.bytes(size)
            rv = r[user - 1]
            self.members[user] = subset_from_string(xor_bytes(rv, s), n, kappa)
            self.has_pc[user] = True
            claimed = rv if not self.bad_decommit[user] else bytes([rv[0] ^ 1]) + rv[1:]
            com, salt = commitments[user - 1]
            if not delivered or not hiding_verify(com, claimed, salt):
                self.inactive[user] = True
        self.ops[openers] += 2 + kappa
        self.ops[SERVER] += 2 * len(openers)
        self._flush_ops()

    # -- steps 2-4: vector commitment --------------------------------------------------
    def commit(self) -> None:
        n, net = self.n, self.net
        entries = [encode_members(self.members[u]) if self.has_pc[u] and not self.inactive[u] else BOT
                   for u in range(1, n + 1)]
        pp = vc_setup(self.kappa, n, b"gmpc/pc")
        receivers = self.users[self.remaining()[1:]]
        groups: dict[tuple, int] = {}
        vectors: list[list[bytes]] = []
        group_of = np.full(n + 1, -1, dtype=np.int64)
        for user in receivers.tolist():
            vec = self.server.committed_vector(user, entries) if self.spec.server_corrupted else entries
            key = tuple(vec)
            if key not in groups:
                groups[key] = len(vectors)
                vectors.append(list(vec))
            group_of[user] = groups[key]
        codebook: dict[bytes, int] = {}
        codes = np.array([[codebook.setdefault(e, len(codebook)) for e in vec] for vec in vectors],
                         dtype=np.int64).reshape(len(vectors), n)
        trees = [vc_commit(pp, vec)[0] for vec in vectors]
        self.true_codes = np.array([codebook.setdefault(e, len(codebook)) for e in entries], dtype=np.int64)
        self.vectors = CommittedVectors(pp, trees, codes, group_of)
        self.ops[SERVER] += len(trees) * 2 * n
        got = net.exchange_one(EnvelopeBatch("vc-commit", SERVER, receivers, 32 * (self.depth + 1) + 64))
        self.abort(receivers[~got])
        ok = receivers[got]
        bad = [u for u in ok.tolist() if not self._opening_matches(group_of[u], u, u)]
        self.ops[ok] += verify_cost(pp, 1)
        self.abort(np.array(bad, dtype=np.int64))
        self._flush_ops()

    def _opening_matches(self, group: int, position_user: int, expected_user: int) -> bool:
        """Does vector `group` hold the true committee of expected_user at position_user?"""
        vectors = self.vectors
        return bool(vectors.verify(int(group), position_user - 1)) and \
            vectors.codes[group, position_user - 1] == self.true_codes[expected_user - 1]

    # -- step 5: cross-check with sampled users ----------------------------------------
    def crosscheck(self) -> None:
        n, kappa, net, vectors = self.n, self.kappa, self.net, self.vectors
        senders = self.users[self.acting()[1:]]
        sampled = sample_distinct(self.rng, senders, n, kappa)
        src = np.repeat(senders, kappa)
        dst = sampled.ravel()
        delivered, _ = net.exchange([EnvelopeBatch("notify", src, dst, 4),
                                     EnvelopeBatch("notify-server", senders, SERVER, 4 * kappa)])
        sampled_by = np.bincount(dst[delivered], minlength=n + 1)
        self.abort(np.flatnonzero(sampled_by > 3 * kappa))
        responders = self.acting()
        answer = delivered & responders[dst]
        replies = net.exchange_one(EnvelopeBatch("pc-commitment", dst[answer], src[answer], 64))
        responded = np.zeros(len(src), dtype=bool)
        responded[np.flatnonzero(answer)[replies]] = True
        self.sampled, self.responded = sampled, responded.reshape(-1, kappa)
        self.sample_owner = senders
        listening = ~net.aborted[senders] & self.responded.any(axis=1)
        got = np.zeros(len(senders), dtype=bool)
        got[listening] = net.exchange_one(EnvelopeBatch(
            "open-at-self", SERVER, senders[listening],
            self.responded[listening].sum(axis=1) * 32 * (self.depth + 1)))
        positions = np.broadcast_to(senders[:, None], sampled.shape)
        responder_group = vectors.group_of[sampled]
        consistent = self.responded & got[:, None]
        rows, cols = np.nonzero(consistent)
        consistent[rows, cols] = vectors.verify_many(responder_group[rows, cols], positions[rows, cols] - 1)
        consistent &= vectors.codes[np.maximum(responder_group, 0), positions - 1] \
            == self.true_codes[positions - 1]
        self.ops[senders] += consistent.sum(axis=1) * verify_cost(vectors.pp, 1)
        need = at_least(params.crosscheck_min(self.alpha, kappa))
        failing = senders[(consistent.sum(axis=1) < need) & ~net.aborted[senders]]
        self.abort(failing)
        self._flush_ops()

    # -- step 6: query sets -------------------------------------------------------------
    def query(self) -> None:
        n, kappa, net, vectors = self.n, self.kappa, self.net, self.vectors
        keep = self.acting()[self.sample_owner]
        owners = self.sample_owner[keep]
        responded = self.responded[keep]
        sampled = self.sampled[keep]
        queries = sample_distinct(self.rng, owners, n, kappa, exclude_owner=False)
        net.exchange_one(EnvelopeBatch("query", owners, SERVER, 4 * kappa))
        size = (responded.sum(axis=1) + 1) * kappa * (32 * self.depth + 4 * kappa)
        got = net.exchange_one(EnvelopeBatch("query-open", SERVER, owners, size))
        self.abort(owners[~got])
        owners, responded, sampled, queries = owners[got], responded[got], sampled[got], queries[got]
        groups = np.where(responded, vectors.group_of[sampled], -1)
        groups = np.concatenate([vectors.group_of[owners][:, None], groups], axis=1)
        opened = vectors.verify_many(np.broadcast_to(vectors.group_of[owners][:, None], queries.shape), queries - 1)
        self.abort(owners[~opened.all(axis=1)])
        self.ops[owners] += (responded.sum(axis=1) + 1) * verify_cost(vectors.pp, kappa)
        if len(vectors.trees) > 1:
            claimed = vectors.codes[groups[:, :1, None], queries[:, None, :] - 1]
            seen = vectors.codes[np.maximum(groups, 0)[:, :, None], queries[:, None, :] - 1]
            mismatch = ((seen != claimed) & (groups >= 0)[:, :, None]).any(axis=(1, 2))
            self.abort(owners[mismatch])
        self._flush_ops()

    # -- steps 7-10: membership claims ---------------------------------------------------
    def claims(self) -> None:
        n, kappa, net, vectors = self.n, self.kappa, self.net, self.vectors
        owners = self.users[self.acting()[1:]]
        slots = self.members[owners]
        self_slot = slots == owners[:, None]
        src = np.repeat(owners, kappa)[~self_slot.ravel()]
        dst = slots.ravel()[~self_slot.ravel()]
        slot_index = np.flatnonzero(~self_slot.ravel())
        delivered = net.exchange_one(EnvelopeBatch("pc-claim", src, dst, 4 * kappa))
        load = np.bincount(dst[delivered], minlength=n + 1)
        self.abort(np.flatnonzero(load > 3 * kappa))
        listening = self.acting()
        receivers = np.unique(dst[delivered & listening[dst]])
        got = np.zeros(n + 1, dtype=bool)
        got[receivers] = net.exchange_one(EnvelopeBatch(
            "claim-open", SERVER, receivers, load[receivers] * 32 * (self.depth + 1)))
        accept = delivered & got[dst]
        group = vectors.group_of[dst]
        accept[accept] = vectors.verify_many(group[accept], src[accept] - 1)
        accept &= vectors.codes[np.maximum(group, 0), src - 1] == self.true_codes[src - 1]
        np.add.at(self.ops, dst[delivered], verify_cost(vectors.pp, 1))
        accepted = np.zeros(len(owners) * kappa, dtype=bool)
        accepted[slot_index[accept]] = True
        accepted |= self_slot.ravel()
        self.accepted[:] = False
        self.accepted[owners] = accepted.reshape(-1, kappa)
        self._flush_ops()

    # -- steps 11-12: liveness inside each PC -----------------------------------------------
    def pc_liveness(self) -> None:
        n, kappa, net = self.n, self.kappa, self.net
        owners = self.users[self.remaining()[1:]]
        slots = self.members[owners]
        speaking = self.accepted[owners] & ~net.aborted[slots] & ~self.silent[slots]
        own = slots == owners[:, None]
        src = slots[speaking & ~own]
        dst = np.broadcast_to(owners[:, None], slots.shape)[speaking & ~own]
        delivered = net.virtual_round("pc-alive", src, dst)
        counted = np.zeros(slots.shape, dtype=bool)
        counted[speaking & ~own] = delivered
        counted |= speaking & own
        silent = kappa - counted.sum(axis=1)
        inactive = silent >= more_than(params.silent_max(self.alpha, kappa))
        self.pc_active[:] = False
        self.pc_active[owners[~inactive]] = True
        self.abort(owners[inactive])
        # every speaking member broadcasts alive inside the PC
        alive_count = counted.sum(axis=1)
        per_member = np.repeat(np.maximum(alive_count - 1, 0), kappa)[counted.ravel()]
        members_flat = slots.ravel()[counted.ravel()]
        traffic = np.bincount(members_flat, weights=per_member, minlength=n + 1).astype(np.int64)
        net.metrics.charge_messages(traffic, traffic, traffic, traffic)

    # -- steps 13-14: global liveness pings ---------------------------------------------------
    def ping(self) -> None:
        n, kappa, net = self.n, self.kappa, self.net
        senders = self.users[(self.acting() & self.pc_active)[1:]]
        sampled = sample_distinct(self.rng, senders, n, kappa)
        src = np.repeat(senders, kappa)
        dst = sampled.ravel()
        delivered = net.exchange_one(EnvelopeBatch("ping", src, dst, 1))
        answer = delivered & ~net.aborted[dst] & ~self.silent[dst]
        replies = net.exchange_one(EnvelopeBatch("pong", dst[answer], src[answer], 1))
        got = np.zeros(len(src), dtype=bool)
        got[np.flatnonzero(answer)[replies]] = True
        count = got.reshape(-1, kappa).sum(axis=1)
        self.abort(senders[count < at_least(params.crosscheck_min(self.alpha, kappa))])

    # -- output -----------------------------------------------------------------------------
    def alive(self) -> np.ndarray:
        """L: users whose PC is active and who did not abort."""
        return self.remaining() & self.pc_active & ~self.silent

    def committees(self) -> list[PersonalCommittee]:
        alive = self.alive()
        out = []
        for user in range(1, self.n + 1):
            if not self.has_pc[user]:
                continue
            group = self.vectors.group_of[user] if self.vectors is not None else -1
            handle = MerkleCommitment(self.vectors.trees[group].root, self.n, self.vectors.pp) if group >= 0 else None
            out.append(PersonalCommittee(user, tuple(self.members[user].tolist()), bool(alive[user]), handle))
        return out

    def run(self) -> "PersonalCommitteeRun":
        self.coin_toss()
        self.commit()
        self.crosscheck()
        self.query()
        self.claims()
        self.pc_liveness()
        self.ping()
        return self


def pc_crosscheck(run: PersonalCommitteeRun) -> np.ndarray:
    """Commitment, cross-check and query steps for all users; returns the alive-user mask."""
    run.commit()
    run.crosscheck()
    run.query()
    return run.remaining()


def pc_finalize(run: PersonalCommitteeRun) -> list[PersonalCommittee]:
    """Membership claims, in-PC liveness and global pings; returns the alive PCs."""
    run.claims()
    run.pc_liveness()
    run.ping()
    return [pc for pc in run.committees() if pc.alive]


def run_personal_committees(n: int, kappa: int, net: Network, rng: np.random.Generator) -> PersonalCommitteeRun:
    return PersonalCommitteeRun(n, kappa, net, rng).run()
