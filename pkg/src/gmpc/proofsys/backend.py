"""Proximity-proof interface and the reference spot-check backend.

The statement is (pub, z_0..z_n) with z_i = (r_i, x̂_i, ŷ_i): the seed bit,
the encrypted input and the claimed encrypted output of party i. It holds
when every ŷ_i is the evaluation of output circuit i on the encrypted inputs
it depends on, with randomness G_i(r_0..r_n).

The spot-check backend commits to every block plus one leaf with all seed
bits, samples blocks, opens them, compares them with the implicit input (the
systematic codeword positions held by the helpers) and re-runs the
evaluation on the opened data.
"""
from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field as dc_field
from typing import Protocol

import numpy as np

from .. import params
from ..crypto import MerkleCommitment, MerkleTree, Opening, vc_commit, vc_open, vc_setup, vc_verify
from ..crypto.encoding import frame
from ..crypto.fhe import DEFAULT_SCHEME, FheScheme
from ..crypto.merkle import verify_cost
from ..crypto.prg import pack_bits, prg_block
from .lecc import pack_blocks


class CircuitFamily(Protocol):
    identifier: bytes

    def circuit(self, index: int, n: int):
        """Output circuit f_index for parties 0..n (has .dependencies)."""


@dataclass(frozen=True)
class EvalStatement:
    """Public part of the statement."""

    pk: bytes
    function: CircuitFamily
    n: int              # blocks 0..n
    width: int          # bytes per serialized block
    rho_bits: int       # randomness length of one evaluation
    scheme: FheScheme = DEFAULT_SCHEME

    def pub_bytes(self) -> bytes:
        return frame([self.pk, self.function.identifier, self.n.to_bytes(8, "little"),
                      self.width.to_bytes(8, "little"), self.rho_bits.to_bytes(8, "little"),
                      self.scheme.scheme_id.encode()])

    def circuit(self, index: int):
        return self.function.circuit(index, self.n)

    def rho(self, bits, index: int) -> bytes:
        """Evaluation randomness G_index(bits); `bits` may be pre-packed."""
        seed = bits if isinstance(bits, bytes) else pack_bits(bits)
        return prg_block(seed, index, self.rho_bits)


def encode_block(r: int, x_hat: bytes, y_hat: bytes) -> bytes:
    return frame([bytes([r & 1]), x_hat, y_hat])


def decode_block(block: bytes) -> tuple[int, bytes, bytes] | None:
    """Parse a (possibly zero-padded) block; None if malformed."""
    parts, pos = [], 0
    for _ in range(3):
        if pos + 4 > len(block):
            return None
        size = int.from_bytes(block[pos:pos + 4], "little")
        pos += 4
        if pos + size > len(block):
            return None
        parts.append(block[pos:pos + size])
        pos += size
    if any(block[pos:]) or len(parts[0]) != 1 or parts[0][0] > 1:
        return None
    return parts[0][0], parts[1], parts[2]


def block_width(blocks: list[bytes]) -> int:
    return max(len(b) for b in blocks)


def evaluate_output(pub: EvalStatement, index: int, inputs: dict[int, bytes], bits) -> bytes:
    return pub.scheme.eval(pub.pk, pub.circuit(index), inputs, pub.rho(bits, index))


def statement_holds(pub: EvalStatement, blocks: list[bytes]) -> bool:
    """Full membership check (reads everything; a test oracle)."""
    decoded = [decode_block(b) for b in blocks]
    if len(blocks) != pub.n + 1 or any(d is None for d in decoded):
        return False
    bits = pack_bits([d[0] for d in decoded])
    x_hat = {i: d[1] for i, d in enumerate(decoded)}
    return all(evaluate_output(pub, i, x_hat, bits) == decoded[i][2] for i in range(pub.n + 1))


@dataclass
class ProofHandle:
    pub: bytes
    commitment: MerkleCommitment
    backend_id: str


@dataclass
class QueryPlan:
    rows: np.ndarray                 # S for the encoding check
    blocks: np.ndarray               # sampled statement blocks
    proof_positions: tuple[int, ...]
    input_positions: tuple[int, ...]


@dataclass
class ProverProof:
    tree: MerkleTree
    commitment: MerkleCommitment
    leaves: list[bytes]

    def open(self, positions) -> tuple[list[bytes], Opening] | None:
        positions = tuple(int(p) for p in positions)
        if any(not 0 <= p < len(self.leaves) for p in positions):
            return None
        opening = vc_open(self.commitment.pp, self.leaves, self.commitment, positions, self.tree)
        return [self.leaves[p] for p in positions], opening


@dataclass
class Verdict:
    accepted: bool
    reason: str
    blocks: np.ndarray = dc_field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    ops: int = 0


InputOracle = Callable[[np.ndarray], "np.ndarray | None"]
ProofOracle = Callable[[tuple[int, ...]], "tuple[list[bytes], Opening] | None"]


class PcppBackend(Protocol):
    backend_id: str

    def prove(self, pub: EvalStatement, blocks: list[bytes], bits: list[int]) -> ProverProof: ...

    def verify(self, pub: EvalStatement, commitment: MerkleCommitment, input_oracle: InputOracle,
               proof_oracle: ProofOracle, rng: np.random.Generator) -> Verdict: ...


class SpotCheckBackend:
    backend_id = "spot-check-v1"

    def __init__(self, kappa: int, exponent: int = 1):
        self.kappa, self.exponent = kappa, exponent

    def proof_params(self, pub: EvalStatement):
        return vc_setup(self.kappa, pub.n + 2, b"gmpc/pcpp")

    def query_count(self, pub: EvalStatement) -> int:
        return params.query_count(pub.n, self.kappa, self.exponent)

    def prove(self, pub: EvalStatement, blocks: list[bytes], bits: list[int]) -> ProverProof:
        leaves = list(blocks) + [pack_bits(bits)]
        pp = vc_setup(self.kappa, len(leaves), b"gmpc/pcpp")
        tree, commitment = vc_commit(pp, leaves)
        return ProverProof(tree, commitment, leaves)

    def plan(self, pub: EvalStatement, rng: np.random.Generator) -> tuple[np.ndarray, tuple[int, ...]]:
        """Sampled blocks and every block their re-execution reads."""
        sampled = np.sort(rng.choice(pub.n + 1, size=min(self.query_count(pub), pub.n + 1), replace=False))
        needed = set(sampled.tolist())
        for i in sampled.tolist():
            needed.update(pub.circuit(i).dependencies)
        return sampled, tuple(sorted(needed))

    def verify(self, pub: EvalStatement, commitment: MerkleCommitment, input_oracle: InputOracle,
               proof_oracle: ProofOracle, rng: np.random.Generator) -> Verdict:
        pp = self.proof_params(pub)
        if commitment.leaf_count != pp.leaf_count:
            return Verdict(False, "proof-length")
        sampled, needed = self.plan(pub, rng)
        seed_leaf = pub.n + 1
        positions = needed + (seed_leaf,)
        answer = proof_oracle(positions)
        if answer is None:
            return Verdict(False, "proof-missing", sampled)
        values, opening = answer
        ops = verify_cost(pp, len(positions))
        if not vc_verify(pp, commitment, values, positions, opening):
            return Verdict(False, "proof-opening", sampled, ops)
        implicit = input_oracle(np.array(needed, dtype=np.int64))
        if implicit is None:
            return Verdict(False, "input-missing", sampled, ops)
        opened = dict(zip(needed, values[:-1]))
        if any(len(v) > pub.width for v in opened.values()):
            return Verdict(False, "malformed", sampled, ops)
        if not np.array_equal(pack_blocks([opened[i] for i in needed], pub.width), implicit):
            return Verdict(False, "input-mismatch", sampled, ops)
        bits = _unpack_bits(values[-1], pub.n + 1)
        decoded = {i: decode_block(opened[i]) for i in needed}
        if bits is None or any(d is None for d in decoded.values()):
            return Verdict(False, "malformed", sampled, ops)
        if any(decoded[i][0] != bits[i] for i in needed):
            return Verdict(False, "seed-mismatch", sampled, ops)
        x_hat = {i: d[1] for i, d in decoded.items()}
        seed = pack_bits(bits)
        for i in sampled.tolist():
            deps = pub.circuit(i).dependencies
            ops += 1 + len(deps)
            if evaluate_output(pub, i, {d: x_hat[d] for d in deps}, seed) != decoded[i][2]:
                return Verdict(False, "evaluation", sampled, ops)
        return Verdict(True, "ok", sampled, ops)


def _unpack_bits(data: bytes, count: int) -> list[int] | None:
    if len(data) != 8 + (count + 7) // 8 or int.from_bytes(data[:8], "little") != count:
        return None
    body = data[8:]
    return [(body[j >> 3] >> (j & 7)) & 1 for j in range(count)]


def build_statement(pk: bytes, function: CircuitFamily, x_hat: list[bytes], bits: list[int], *,
                    rho_bits: int = 128, scheme: FheScheme = DEFAULT_SCHEME,
                    evaluated: CircuitFamily | None = None) -> tuple[EvalStatement, list[bytes]]:
    """Evaluate every output block and serialize the statement.

    `evaluated` is the family actually run (a cheating server may differ
    from the declared `function`)."""
    n = len(x_hat) - 1
    evaluated = evaluated or function
    draft = EvalStatement(pk, function, n, 0, rho_bits, scheme)
    inputs = dict(enumerate(x_hat))
    seed = pack_bits(bits)
    y_hat = [scheme.eval(pk, evaluated.circuit(i, n), inputs, draft.rho(seed, i)) for i in range(n + 1)]
    blocks = [encode_block(bits[i], x_hat[i], y_hat[i]) for i in range(n + 1)]
    return EvalStatement(pk, function, n, block_width(blocks), rho_bits, scheme), blocks
