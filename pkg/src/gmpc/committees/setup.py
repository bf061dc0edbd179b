"""Committee setup: personal committees plus a sampled low-diameter graph
between them, and the checker for the resulting good event."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .. import params
from ..netsim import SERVER, EnvelopeBatch, Network
from .flood import PcGraph, alive_iterations, missing_expected, record_aborts, virtual_exchange
from .graph import diameter_from_edges
from .personal import PersonalCommitteeRun, at_least
from .subsets import sample_distinct


@dataclass
class NeighborSet:
    owner: int
    out: frozenset[int]
    incoming: frozenset[int]

    @property
    def total(self) -> frozenset[int]:
        return self.out | self.incoming


@dataclass
class PcsgWitness:
    n: int
    kappa: int
    alpha: Fraction
    server_corrupted: bool
    alive: np.ndarray            # (n + 1,) users in L whose PC is active after setup
    honest: np.ndarray           # (n + 1,) uncorrupted users
    members: np.ndarray          # (n + 1, kappa) PC of each user
    graph: PcGraph               # neighbor sets N_i as holder -> neighbor pairs
    agreement: np.ndarray        # (n + 1,) PC i and its neighbors hold each other's committees
    honest_counts: np.ndarray    # (n + 1,) honest members per PC
    diameter: float              # of the induced graph the event constrains
    iterations: int              # ell + 1
    abort_round: np.ndarray      # (n + 1,) setup round in which the PC aborted, -1 if never
    pc_alive_before: np.ndarray  # L as output by the personal-committee phase
    extras: dict = field(default_factory=dict)

    def neighbor_set(self, owner: int) -> NeighborSet:
        table = self.extras["out"]
        row = np.searchsorted(table["owners"], owner)
        out = set(table["sampled"][row][table["keep"][row]].tolist())
        total = set(self.graph.neighbors_of(owner).tolist())
        return NeighborSet(owner, frozenset(out), frozenset(total - out))

    def records(self):
        """Line-delimited witness dump: pc, edge and diameter records."""
        for i in np.flatnonzero(self.pc_alive_before).tolist():
            yield {"record": "pc", "pc": i, "members": self.members[i].tolist(),
                   "alive": bool(self.alive[i]), "honest_count": int(self.honest_counts[i])}
        a, b = self.graph.undirected_edges()
        for u, v in zip(a.tolist(), b.tolist()):
            yield {"record": "edge", "u": u, "v": v}
        yield {"record": "diameter", "value": None if math.isinf(self.diameter) else int(self.diameter)}

    def dumps(self) -> str:
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in self.records())


@dataclass
class PcsgCheck:
    holds: bool
    violated: list[str]
    details: dict


def pcsg_check(witness: PcsgWitness, adversary=None) -> PcsgCheck:
    """Evaluate every conjunct of the good event after setup: the honest
    variant when the server is honest, the malicious one otherwise."""
    w = witness
    malicious = w.server_corrupted if adversary is None else adversary.server_corrupted
    kappa, n = w.kappa, w.n
    users = np.arange(n + 1) > 0
    alive = w.alive & users
    honest = w.honest & users
    violated = []
    honest_alive = int((alive & honest).sum())
    if malicious:
        if honest_alive < at_least(params.survivors_min(w.alpha, n)):
            violated.append("honest-alive-count")
        scope = alive & honest
    else:
        if (honest & ~alive).any():
            violated.append("honest-alive")
        scope = alive
    sizes = np.array([len(set(row)) for row in w.members[scope].tolist()], dtype=np.int64)
    if (sizes != kappa).any():
        violated.append("pc-size")
    degree = w.graph.degree()
    if (degree[alive] > 4 * kappa).any():
        violated.append("neighbor-bound")
    floor_honest = Fraction(5, 6) * kappa
    if (w.honest_counts[scope] <= floor_honest).any():
        violated.append("pc-honest")
    if not w.agreement[alive].all():
        violated.append("neighbor-agreement")
    if w.diameter > w.iterations:
        violated.append("diameter")
    definition_bar = at_least(params.pc_share_threshold(w.alpha, kappa))
    details = {
        "alive": int(alive.sum()),
        "honest_alive": honest_alive,
        "min_honest_members": int(w.honest_counts[scope].min()) if scope.any() else 0,
        "pcs_below_definition_bar": int((w.honest_counts[scope] < definition_bar).sum()),
        "diameter": w.diameter,
        "iterations": w.iterations,
        "lemma_ell": params.lemma_ell(n, kappa),
    }
    return PcsgCheck(not violated, violated, details)


class CommitteeSetupRun:
    """One execution of the setup protocol on top of the personal committees."""

    def __init__(self, n: int, kappa: int, net: Network, rng: np.random.Generator, alpha=None):
        self.n, self.kappa, self.net, self.rng = n, kappa, net, rng
        self.spec = net.adversary
        self.server = self.spec.server
        self.pc = PersonalCommitteeRun(n, kappa, net, rng, alpha)
        self.alpha = self.pc.alpha
        self.iterations = params.flood_rounds(n, kappa)
        corrupted = self.spec.corrupted_mask(n)
        self.honest = ~corrupted
        self.honest[SERVER] = False
        # PCs whose owner and the server are both corrupted act for the adversary
        self.steadfast = corrupted & self.spec.server_corrupted
        self.abort_round = np.full(n + 1, -1, dtype=np.int64)

    def run(self) -> PcsgWitness:
        n, kappa, net, pc = self.n, self.kappa, self.net, self.pc
        pc.run()
        listed = pc.alive()
        self.listed = listed.copy()
        alive = listed.copy()
        owners = np.flatnonzero(listed)
        members = pc.members
        vectors = pc.vectors

        # neighbor sampling, reported to the server
        sampled = sample_distinct(self.rng, owners, n, kappa)
        told = virtual_exchange(net, "pc-neighbors", owners, SERVER, members, 4 * kappa)
        self._fail(owners[~told], alive, 0)
        keep = listed[sampled]  # users outside L are reported dead by the server and dropped

        # the server opens each member's commitment at every sampled position
        slot_members = members[owners]
        participating = pc.accepted[owners] & ~net.aborted[slot_members] & ~pc.silent[slot_members]
        falsified = np.zeros(len(owners), dtype=bool)
        if self.spec.server_corrupted:
            for row, owner in enumerate(owners.tolist()):
                falsified[row] = any(self.server.falsify_opening(owner, int(j)) for j in sampled[row][keep[row]])
        receivers = slot_members[participating]
        sizes = np.broadcast_to(keep.sum(axis=1)[:, None], participating.shape)[participating]
        opened = net.exchange_one(EnvelopeBatch("neighbor-open", SERVER, receivers,
                                                sizes * 32 * (pc.depth + 1)))
        valid = np.zeros(participating.shape, dtype=bool)
        valid[participating] = opened
        valid &= ~falsified[:, None]
        count = valid.sum(axis=1)
        self._fail(owners[count < at_least(params.pc_share_threshold(self.alpha, kappa))], alive, 0)
        # members whose commitment disagrees with the true committee of a neighbor
        if len(vectors.trees) > 1:
            groups = vectors.group_of[slot_members]
            seen = vectors.codes[np.maximum(groups, 0)[:, :, None], sampled[:, None, :] - 1]
            truth = pc.true_codes[sampled - 1][:, None, :]
            wrong = ((seen != truth) & valid[:, :, None] & keep[:, None, :]).any(axis=(1, 2))
            self._fail(owners[wrong], alive, 0)
        net.metrics.charge_ops(receivers[opened], sizes[opened] * (pc.depth + 1))

        # notify sampled neighbors; N_in is who got through
        notifier = alive[owners]
        src = np.repeat(owners[notifier], kappa)[keep[notifier].ravel()]
        dst = sampled[notifier][keep[notifier]]
        delivered = virtual_exchange(net, "pc-notify", src, dst, members)
        arrived = delivered & alive[dst]
        incoming = np.bincount(dst[arrived], minlength=n + 1)
        self._fail(np.flatnonzero((incoming > 3 * kappa) & ~self.steadfast), alive, 0)
        holder = np.concatenate([src, dst[arrived]])
        neighbor = np.concatenate([dst, src[arrived]])
        graph = PcGraph.from_pairs(n + 1, holder, neighbor)

        # exchange committees with all neighbors
        sending = alive[graph.holder]
        info_src, info_dst = graph.holder[sending], graph.neighbor[sending]
        got = virtual_exchange(net, "pc-info", info_src, info_dst, members, 4 * kappa)
        missing = missing_expected(graph, info_src, info_dst, got, alive & ~self.steadfast)
        self._fail(np.flatnonzero(missing), alive, 0)

        alive = alive_iterations(net, graph, alive, self.iterations, members,
                                 steadfast=self.steadfast, abort_round=self.abort_round)
        self.alive, self.graph = alive, graph

        agreement = np.ones(n + 1, dtype=bool)
        agreement[np.flatnonzero(missing)] = False
        if self.spec.server_corrupted:
            agreement[owners[falsified]] = False
        honest_counts = np.zeros(n + 1, dtype=np.int64)
        honest_counts[1:] = self.honest[members[1:]].sum(axis=1)
        scope = alive & (self.honest if self.spec.server_corrupted else np.ones(n + 1, dtype=bool))
        scope[SERVER] = False
        diam = diameter_from_edges(np.flatnonzero(scope), graph.holder, graph.neighbor)
        out = {"owners": owners, "sampled": sampled, "keep": keep}
        return PcsgWitness(n, kappa, self.alpha, self.spec.server_corrupted, alive, self.honest, members, graph,
                           agreement, honest_counts, diam, self.iterations, self.abort_round, listed,
                           {"out": out})

    def _fail(self, pcs, alive: np.ndarray, round_index: int) -> None:
        pcs = np.asarray(pcs, dtype=np.int64)
        pcs = pcs[~self.steadfast[pcs]]
        mask = np.zeros_like(alive)
        mask[pcs] = True
        record_aborts(mask & alive, self.abort_round, round_index)
        alive[pcs] = False


def setup_run(n: int, kappa: int, net: Network, rng: np.random.Generator, alpha=None) -> tuple[PcsgWitness, CommitteeSetupRun]:
    run = CommitteeSetupRun(n, kappa, net, rng, alpha)
    return run.run(), run
