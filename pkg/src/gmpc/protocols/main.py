"""End-to-end computation: committees emulate the virtual parties.

User i hands its input to committee C_i. The committees count the delivered
inputs up the tree and abort below (1 - alpha) n; then C_0..C_n run the
general protocol as virtual parties 0..n through the NxtMsg oracle.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import params
from ..committees import elect_committee, ideal_many_committees, many_committees, setup_run
from ..committees.flood import committee_user_exchange, virtual_exchange
from ..committees.many import TREE_SERVER, CommitteeTree, _tree_levels
from ..committees.personal import at_least
from ..crypto.fhe import DEFAULT_SCHEME, FheScheme
from ..netsim import Network
from ..proofsys import CommitteeTransport
from .functions import GmpcFunction
from .general import GeneralOutcome, general_protocol_run
from .nxtmsg import CommitteeParties


@dataclass
class MainOutcome:
    output: bytes | None
    stage: str
    reason: str
    delivered: np.ndarray             # (n + 1,) inputs that reached their committee (index 0: server)
    effective_inputs: list[bytes]
    tree: CommitteeTree | None
    general: GeneralOutcome | None

    @property
    def aborted(self) -> bool:
        return self.output is None

    @property
    def blocked(self) -> frozenset[int]:
        return frozenset(int(i) for i in np.flatnonzero(~self.delivered[1:]) + 1)


def establish_committees(net: Network, kappa: int, rng: np.random.Generator, mode: str = "ideal") -> CommitteeTree | None:
    """Committee tree C_0..C_n from the ideal sampler or the full setup,
    election and tree-spawning pipeline (None when any of them aborts)."""
    n = net.n
    if mode == "ideal":
        return ideal_many_committees(n, kappa, ~net.aborted, rng)
    if mode != "real":
        raise ValueError(f"unknown committee mode {mode!r}")
    witness, run = setup_run(n, kappa, net, rng)
    election = elect_committee(witness, net, rng, run.steadfast)
    if election.result is None:
        return None
    many = many_committees(election.result.committee, witness, net, rng, run.steadfast)
    return many.tree


def main_protocol_run(function: GmpcFunction, inputs: list[bytes], net: Network, rng: np.random.Generator,
                      kappa: int, *, committees: str = "ideal", tree: CommitteeTree | None = None,
                      scheme: FheScheme = DEFAULT_SCHEME) -> MainOutcome:
    """inputs[0] is the server's input, inputs[i] user i's."""
    n = net.n
    spec = net.adversary
    users = np.arange(1, n + 1)
    delivered = np.ones(n + 1, dtype=bool)
    effective = list(inputs)

    def abort(stage: str, reason: str, tree=None, general=None) -> MainOutcome:
        net.abort(users[~net.aborted[1:]], f"main-abort:{stage}")
        return MainOutcome(None, stage, reason, delivered, effective, tree, general)

    tree = tree or establish_committees(net, kappa, rng, committees)
    if tree is None:
        return abort("committees", "committee-abort")
    matrix = tree.member_matrix()

    # inputs to committees; blocked ones are replaced by the default
    delivered[1:] = committee_user_exchange(net, "main-input", users, users, matrix, function.block_bytes,
                                            to_user=False)
    delivered[1:] &= ~net.aborted[1:] & ~net.blocked[1:]
    effective = [x if delivered[i] or i == 0 else function.default_input() for i, x in enumerate(inputs)]
    parties = CommitteeParties(net, matrix, rng)
    parties.load(users, effective[1:])

    # count the inputs up the tree
    subtotal = delivered.astype(np.int64)
    subtotal[0] = 0
    broken = np.zeros(n + 1, dtype=bool)
    for level in reversed(_tree_levels(n)):
        parents = (level - 1) // 2
        sending = ~broken[level]
        got = np.zeros(level.size, dtype=bool)
        got[sending] = virtual_exchange(net, "main-count", level[sending], parents[sending], matrix, 8,
                                        server=TREE_SERVER)
        np.add.at(subtotal, parents[got], subtotal[level[got]])
        broken[parents[~got]] = True
    if broken[0]:
        return abort("count", "missing-count", tree)
    if subtotal[0] < at_least(params.input_min(spec.alpha, n)):
        return abort("count", "too-few-inputs", tree)

    general = general_protocol_run(function, inputs[0], parties, CommitteeTransport(net, matrix), net, rng, kappa,
                                   server=spec.server, scheme=scheme)
    if general.aborted:
        return abort(general.stage, general.reason, tree, general)
    return MainOutcome(general.server_output, "done", "ok", delivered, effective, tree, general)
