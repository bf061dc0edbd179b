"""Multi-verifier proof: the prover encodes the statement, hands each tree
party one slice, the parties check the encoding at random rows, and the
verifier runs the backend with oracle access routed through the tree."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import params
from ..netsim import HONEST, Strategy
from .backend import EvalStatement, PcppBackend, ProofHandle, QueryPlan, SpotCheckBackend
from .lecc import SLICE, lecc_encode, lecc_params, pack_blocks, slices_of
from .tree import (
    ELEMENT_BYTES,
    PROVER,
    EncodingCheck,
    HelperTree,
    PerfectTransport,
    Transport,
    broadcast_down,
    gather_up,
    route_down,
    sample_rows,
    tree_encoding_check,
)


@dataclass
class ProofOutcome:
    accepted: bool
    stage: str                  # where it ended: "codeword", "encoding", "commit", "pcpp", "done"
    reason: str
    plan: QueryPlan
    encoding: EncodingCheck | None
    handle: ProofHandle | None
    informed: np.ndarray        # tree parties that learned the verdict


def multiverifier_proof_run(pub: EvalStatement, held_blocks: list[bytes], bits: list[int], kappa: int,
                            rng: np.random.Generator, *, transport: Transport | None = None,
                            prover: Strategy = HONEST, backend: PcppBackend | None = None,
                            exponent: int = 1) -> ProofOutcome:
    """Prove (pub, held_blocks) in L to tree parties 0..n.

    held_blocks[i] is the block party i holds; bits are the seed bits the
    prover received. A corrupted prover acts through the Strategy hooks.
    """
    transport = transport or PerfectTransport()
    backend = backend or SpotCheckBackend(kappa, exponent)
    n = pub.n
    tree = HelperTree(n)
    code = lecc_params(n + 1)
    if any(len(b) > pub.width for b in held_blocks):
        # a holder whose block does not fit the public width reports bottom
        plan = QueryPlan(np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64), (), ())
        informed = broadcast_down(tree, transport, "proof-verdict", 1)
        return ProofOutcome(False, "codeword", "malformed-input", plan, None, None, informed)
    inputs = pack_blocks(held_blocks, pub.width)
    width = inputs.shape[1]
    rows = sample_rows(n, params.query_count(n, kappa, exponent), rng)
    plan = QueryPlan(rows, np.zeros(0, dtype=np.int64), (), ())

    def finish(accepted: bool, stage: str, reason: str, encoding=None, handle=None) -> ProofOutcome:
        informed = broadcast_down(tree, transport, "proof-verdict", 1)
        return ProofOutcome(accepted, stage, reason, plan, encoding, handle, informed)

    # codeword slices, one per party
    if prover.abort_proof("codeword"):
        return finish(False, "codeword", "prover-abort")
    prover_blocks = prover.proof_blocks(list(held_blocks))
    slices = slices_of(lecc_encode(code, pack_blocks(prover_blocks, pub.width)))
    slices = prover.corrupt_codeword(slices)
    transport.charge_ops([PROVER], code.length * code.k * width)
    has_slice = transport.send("lecc-codeword", PROVER, np.arange(n + 1), SLICE * width * ELEMENT_BYTES)

    encoding = tree_encoding_check(code, inputs, slices, rows, transport, tree, has_slice)
    if not encoding.accepted:
        return finish(False, "encoding", encoding.reason, encoding)

    # proof commitment
    if prover.abort_proof("commit"):
        return finish(False, "commit", "prover-abort", encoding)
    proof = backend.prove(pub, prover.proof_blocks(list(held_blocks)), prover.statement_bits(list(bits)))
    transport.charge_ops([PROVER], len(proof.leaves) * 2)
    asked = transport.send("pcpp-params", 0, PROVER, 32)
    sent = transport.send("pcpp-commit", PROVER, 0, 32)
    if not (asked.all() and sent.all()):
        return finish(False, "commit", "missing-commitment", encoding)
    handle = ProofHandle(pub.pub_bytes(), proof.commitment, backend.backend_id)
    opened_positions: list[tuple[int, ...]] = []
    input_positions: list[np.ndarray] = []

    def proof_oracle(positions):
        opened_positions.append(tuple(positions))
        if prover.abort_proof("open"):
            return None
        request = transport.send("pcpp-query", 0, PROVER, 8 * len(positions))
        answer = proof.open(positions)
        if answer is None or not request.all():
            return None
        size = sum(len(v) for v in answer[0]) + answer[1].size_bytes
        if not transport.send("pcpp-open", PROVER, 0, size).all():
            return None
        return answer

    def input_oracle(blocks: np.ndarray):
        input_positions.append(blocks)
        holders = blocks // SLICE
        asked = route_down(tree, transport, "oracle-query", holders, 8)
        answered = gather_up(tree, transport, "oracle-answer", holders[asked], width * ELEMENT_BYTES)
        if not (asked.all() and answered.all() and has_slice[holders].all()):
            return None
        return slices[holders, blocks % SLICE]

    verdict = backend.verify(pub, proof.commitment, input_oracle, proof_oracle, rng)
    transport.charge_ops([0], verdict.ops)
    plan.blocks = verdict.blocks
    plan.proof_positions = opened_positions[0] if opened_positions else ()
    plan.input_positions = tuple(input_positions[0].tolist()) if input_positions else ()
    if not verdict.accepted:
        return finish(False, "pcpp", verdict.reason, encoding, handle)
    return finish(True, "done", "ok", encoding, handle)
