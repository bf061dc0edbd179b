"""FHE-orchestrated computation among n + 1 virtual parties on a binary tree.

Party 0 takes the server's input, generates the keys and spreads them down
the tree. Every party sends an encryption of its input and one random bit to
the server, which evaluates all outputs homomorphically and proves to the
parties that it did so correctly. Only after the verdict is accepted do the
parties decrypt their output block and return it to the server.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..crypto.encoding import frame, unframe
from ..crypto.fhe import DEFAULT_SCHEME, FheScheme
from ..netsim import HONEST, Network, Strategy
from ..proofsys import PROVER, HelperTree, ProofOutcome, Transport, build_statement, multiverifier_proof_run
from ..proofsys.backend import decode_block, encode_block
from ..proofsys.tree import broadcast_down
from .functions import GmpcFunction
from .nxtmsg import CommitteeParties, DirectParties

RHO_BITS = 128


@dataclass
class GeneralOutcome:
    outputs: list[bytes] | None   # y_0..y_n as received by the server, None on abort
    stage: str                    # last stage reached
    reason: str
    proof: ProofOutcome | None
    decrypted: bool

    @property
    def aborted(self) -> bool:
        return self.outputs is None

    @property
    def server_output(self) -> bytes | None:
        return None if self.outputs is None else b"".join(self.outputs)


def general_protocol_run(function: GmpcFunction, server_input: bytes, parties: DirectParties | CommitteeParties,
                         transport: Transport, net: Network | None, rng: np.random.Generator, kappa: int, *,
                         server: Strategy = HONEST, scheme: FheScheme = DEFAULT_SCHEME) -> GeneralOutcome:
    """Parties 1..n must already hold their input as state; party 0 gets the
    server's input here."""
    n = parties.count - 1
    tree = HelperTree(n)
    everyone = np.arange(n + 1)

    def abort(stage: str, reason: str, proof=None) -> GeneralOutcome:
        if net is not None:
            net.log_event("gp-abort", everyone, -1, 0)
        return GeneralOutcome(None, stage, reason, proof, False)

    def failed(bottom: np.ndarray) -> bool:
        return bool(np.asarray(bottom).any())

    # 1. server input to party 0
    if not transport.send("gp-server-input", PROVER, 0, len(server_input)).all():
        return abort("input", "missing-server-input")
    parties.load([0], [server_input])

    # 2. keys at party 0, spread down the tree; pk to the server
    keys = scheme.gen(rng)

    def keygen(party: int, state: bytes):
        return frame([state, keys.pk, keys.sk]), frame([keys.pk, keys.sk])

    messages, bottom = parties.step("gp-keygen", [0], keygen)
    if failed(bottom):
        return abort("keys", "bottom")
    pk, sk = unframe(messages[0])
    has_keys = broadcast_down(tree, transport, "gp-keys", len(pk) + len(sk))
    if not has_keys.all():
        return abort("keys", "missing-keys")
    if not transport.send("gp-pk", 0, PROVER, len(pk)).all():
        return abort("keys", "missing-pk")

    def store_keys(party: int, state: bytes):
        return frame([state, pk, sk]), b""

    _, bottom = parties.step("gp-store-keys", everyone[1:], store_keys)
    if failed(bottom):
        return abort("keys", "bottom")

    # 3. encrypted inputs and seed bits to the server
    seeds = rng.integers(0, 2, n + 1)

    def encrypt(party: int, state: bytes):
        x, pk_, sk_ = unframe(state)
        x_hat = scheme.enc(pk_, x, rng)
        bit = bytes([int(seeds[party])])
        return frame([x, pk_, sk_, x_hat, bit]), frame([x_hat, bit])

    messages, bottom = parties.step("gp-encrypt", everyone, encrypt)
    if failed(bottom):
        return abort("encrypt", "bottom")
    sent = transport.send("gp-ciphertext", everyone, PROVER, max(len(m) for m in messages))
    # a ciphertext the server never received is replaced by an empty one
    x_hat = [unframe(m)[0] if ok else b"" for m, ok in zip(messages, sent)]
    bits = [unframe(m)[1][0] if ok else 0 for m, ok in zip(messages, sent)]

    # 4. the server evaluates, then hands each party its output block
    evaluated = server.evaluation_function(function)
    pub, blocks = build_statement(pk, function, x_hat, bits, rho_bits=RHO_BITS, scheme=scheme, evaluated=evaluated)
    y_hat = server.falsify_outputs([decode_block(b)[2] for b in blocks])
    got = transport.send("gp-output", PROVER, everyone, max(1, max(len(y) for y in y_hat)))
    if not got.all():
        return abort("outputs", "missing-output")

    def hold_output(party: int, state: bytes):
        x, pk_, sk_, own_hat, bit = unframe(state)
        return frame([x, pk_, sk_, own_hat, bit, y_hat[party]]), encode_block(bit[0], own_hat, y_hat[party])

    held, bottom = parties.step("gp-hold-output", everyone, hold_output)
    if failed(bottom):
        return abort("outputs", "bottom")

    # 5. the proof, with the parties as verifier and helpers
    proof = multiverifier_proof_run(pub, held, bits, kappa, rng, transport=transport, prover=server)
    if net is not None:
        net.log_event("proof-verdict", everyone, -1, int(proof.accepted))
    if not proof.accepted:
        return abort("proof", proof.reason, proof)

    # 6. decryption only after acceptance
    def decrypt(party: int, state: bytes):
        x, pk_, sk_, own_hat, bit, own_y = unframe(state)
        y = scheme.dec(sk_, own_y)
        return state, frame([b"\x01", y]) if y is not None else frame([b"\x00", b""])

    if net is not None:
        net.log_event("decrypt-share", everyone, -1, 0)
    plain, bottom = parties.step("gp-decrypt", everyone, decrypt)
    if failed(bottom):
        return abort("decrypt", "bottom", proof)
    outputs = [unframe(m) for m in plain]
    if any(ok != b"\x01" for ok, _ in outputs):
        return abort("decrypt", "undecryptable", proof)
    ys = [y for _, y in outputs]
    returned = transport.send("gp-result", everyone, PROVER, max(1, max(len(y) for y in ys)))
    if not returned.all():
        return GeneralOutcome(None, "result", "missing-result", proof, True)
    return GeneralOutcome(ys, "done", "ok", proof, True)
