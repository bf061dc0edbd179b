"""Lightest-bin committee election run by personal committees over the
setup graph, with neighbor cross-checks and alive flooding."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..netsim import SERVER, Network
from .flood import PcGraph, alive_iterations, missing_expected, record_aborts, virtual_exchange
from .setup import PcsgWitness


@dataclass(frozen=True)
class ElectionResult:
    committee: tuple[int, ...]
    bin: int
    bins: int


@dataclass
class ElectionOutcome:
    result: ElectionResult | None      # None: at least one honest PC aborted
    alive: np.ndarray                  # PCs alive at the end
    abort_round: np.ndarray            # round of the detection phase in which a PC aborted, -1 if never
    detected: np.ndarray               # PCs whose own checks failed on the announcement
    choices: np.ndarray                # bin chosen by each PC (0 if none)
    occupancy: np.ndarray              # bins as counted by the server, index 0 unused
    honest_fraction: float | None
    iterations: int


def feige_err(n: int, n_prime: int, alpha: float, alpha_prime: float) -> float:
    """Closed-form failure bound (n/n') exp(-(alpha' - alpha)^2 n' / (2 (1 - alpha)))."""
    return (n / n_prime) * math.exp(-((alpha_prime - alpha) ** 2) * n_prime / (2 * (1 - alpha)))


def lightest_bin(choices: np.ndarray, bins: int) -> int:
    """Least occupied bin in 1..bins, ties to the smallest index."""
    occupancy = np.bincount(choices, minlength=bins + 1)[1:bins + 1]
    return int(np.argmin(occupancy)) + 1


def elect_committee(witness: PcsgWitness, net: Network, rng: np.random.Generator,
                    steadfast: np.ndarray | None = None) -> ElectionOutcome:
    """Elect a committee among the PCs alive after setup."""
    n, kappa, graph = witness.n, witness.kappa, witness.graph
    server = net.adversary.server
    corrupted_server = net.adversary.server_corrupted
    members = witness.members
    steadfast = np.zeros(n + 1, dtype=bool) if steadfast is None else steadfast
    alive = witness.alive.copy()
    alive[SERVER] = False
    honest_pc = alive & ~steadfast
    abort_round = np.full(n + 1, -1, dtype=np.int64)
    iterations = witness.iterations
    count_round = np.full(n + 1, -1, dtype=np.int64)

    def fail(mask, table, round_index):
        mask = mask & alive & ~steadfast
        record_aborts(mask, table, round_index)
        alive[mask] = False

    # agree on the number of alive users
    alive_count = int(alive.sum())
    owners = np.flatnonzero(alive)
    announced = np.zeros(n + 1, dtype=np.int64)
    announced[owners] = [server.announce_count(int(i), alive_count) for i in owners] \
        if corrupted_server else alive_count
    got = virtual_exchange(net, "pc-count", SERVER, owners, members, 8)
    fail(_mask(n, owners[~got]), count_round, 0)
    fail(_neighbor_disagreement(net, graph, alive, steadfast, announced, "pc-count-check", members),
         count_round, 1)
    alive[:] = alive_iterations(net, graph, alive, iterations, members, steadfast=steadfast,
                                abort_round=count_round, first_round=2)

    # bins
    owners = np.flatnonzero(alive)
    bins_of = np.maximum(1, -(-announced // kappa))
    choices = np.zeros(n + 1, dtype=np.int64)
    choices[owners] = rng.integers(1, bins_of[owners] + 1)
    reported = virtual_exchange(net, "pc-bin", owners, SERVER, members, 8)
    server_bins = max(1, -(-int(alive.sum()) // kappa))
    counted = owners[reported]
    occupancy = np.bincount(choices[counted], minlength=server_bins + 1)[:server_bins + 1]
    x = lightest_bin(choices[counted], server_bins)
    committee = tuple(int(i) for i in counted[choices[counted] == x])
    bins = {b: int(occupancy[b]) for b in range(1, server_bins + 1)}

    # announcement: each PC gets (C, x); codes identify distinct announcements
    codebook: dict[tuple, int] = {}
    code = np.full(n + 1, -1, dtype=np.int64)
    sizes = np.zeros(n + 1, dtype=np.int64)
    claimed_bin = np.zeros(n + 1, dtype=np.int64)
    member_of = np.zeros(n + 1, dtype=bool)
    views = {}
    for i in owners.tolist():
        view = server.announce_committee(i, committee, x, bins) if corrupted_server else (committee, x)
        key = (tuple(view[0]), int(view[1]))
        views[i] = key
        code[i] = codebook.setdefault(key, len(codebook))
        sizes[i] = len(key[0])
        claimed_bin[i] = key[1]
        member_of[i] = i in key[0]
    got = virtual_exchange(net, "pc-committee", SERVER, owners, members, 4 * (kappa + 1))
    detected = np.zeros(n + 1, dtype=bool)
    detected[owners[~got]] = True
    bad = (sizes > kappa) | ((choices == claimed_bin) != member_of)
    detected |= bad & alive
    detected &= ~steadfast

    # forward (C, x) to neighbors; detectors send bottom instead and abort
    fail(detected, abort_round, 0)
    sending = (alive | detected)[graph.holder]
    src, dst = graph.holder[sending], graph.neighbor[sending]
    delivered = virtual_exchange(net, "pc-committee-check", src, dst, members, 4 * (kappa + 1))
    bottom = detected[src] & delivered
    differs = delivered & ~detected[src] & (code[src] != code[dst])
    failing = _mask(n, dst[bottom | differs])
    failing |= missing_expected(graph, src, dst, delivered, alive & ~steadfast)
    fail(failing, abort_round, 1)
    alive[:] = alive_iterations(net, graph, alive, iterations, members, steadfast=steadfast,
                                abort_round=abort_round, first_round=2)

    survived = honest_pc & alive
    result = None
    if (survived == honest_pc).all() and (count_round < 0).all():
        keys = {views[i] for i in np.flatnonzero(honest_pc).tolist()}
        if len(keys) == 1:
            c, b = keys.pop()
            result = ElectionResult(tuple(sorted(c)), b, server_bins)
    honest_fraction = None
    if result is not None and result.committee:
        honest_users = witness.honest
        honest_fraction = float(np.mean(honest_users[list(result.committee)]))
    count_aborted = count_round >= 0
    abort_round[count_aborted & (abort_round < 0)] = -2  # aborted before the bin phase
    return ElectionOutcome(result, alive, abort_round, detected, choices, occupancy, honest_fraction, iterations)


def _mask(n: int, indices) -> np.ndarray:
    mask = np.zeros(n + 1, dtype=bool)
    mask[np.asarray(indices, dtype=np.int64)] = True
    return mask


def _neighbor_disagreement(net: Network, graph: PcGraph, alive: np.ndarray, steadfast: np.ndarray,
                           values: np.ndarray, kind: str, members: np.ndarray) -> np.ndarray:
    sending = alive[graph.holder]
    src, dst = graph.holder[sending], graph.neighbor[sending]
    delivered = virtual_exchange(net, kind, src, dst, members, 8)
    n = len(alive) - 1
    failing = _mask(n, dst[delivered & (values[src] != values[dst])])
    failing |= missing_expected(graph, src, dst, delivered, alive & ~steadfast)
    return failing
