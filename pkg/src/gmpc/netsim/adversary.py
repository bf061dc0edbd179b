"""Server strategies.

A Strategy bundles every decision a corrupted server can make. Each hook's
default is the honest behaviour, so attacks override only what they change.
Protocols call hooks through AdversarySpec.server, which is the honest
instance whenever the server is not corrupted.
"""
from __future__ import annotations

import numpy as np


class Strategy:
    name = "honest"
    description = "follow the protocol"
    # "passive": corrupted users follow the protocol; "silent": they stop
    # answering after choosing their committee string; "bad-decommit": they
    # open their coin commitment to a different string.
    user_behaviour = "passive"

    def __init__(self, **params):
        self.params = params
        self.corrupted: frozenset[int] = frozenset()
        self.rng = np.random.default_rng(0)
        self.log: list[tuple] = []

    def attach(self, corrupted, rng: np.random.Generator) -> "Strategy":
        self.corrupted = frozenset(corrupted)
        self.rng = rng
        return self

    # -- network ----------------------------------------------------------
    def block(self, round_index: int, kind: str, src: np.ndarray, dst: np.ndarray,
              length: np.ndarray) -> np.ndarray | None:
        """Return a mask of envelopes to drop (None drops nothing)."""
        return None

    def block_virtual(self, round_index: int, kind: str, src: np.ndarray, dst: np.ndarray) -> np.ndarray | None:
        """Drop committee-level messages (same contract as block)."""
        return None

    def tamper(self, src: int, dst: int, sealed: bytes) -> bytes:
        """Star mode: bytes actually relayed for a sealed payload."""
        return sealed

    # -- personal committees ---------------------------------------------------
    def withhold_coin(self, user: int) -> bool:
        return False

    def committed_vector(self, user: int, vector: list[bytes]) -> list[bytes]:
        """Vector the server commits to when talking to `user`."""
        return vector

    def falsify_opening(self, pc: int, neighbor: int) -> bool:
        """Send the members of `pc` an invalid opening of the neighbor's entry."""
        return False

    # -- election and committee tree ------------------------------------------
    def announce_count(self, pc: int, alive_count: int) -> int:
        return alive_count

    def announce_committee(self, pc: int, committee: tuple[int, ...], bin_index: int,
                           bins: dict[int, int]) -> tuple[tuple[int, ...], int]:
        return committee, bin_index

    def relay_pk(self, pc: int, pk: bytes) -> bytes:
        return pk

    def forged_committees(self, n: int) -> dict[int, tuple[int, ...]]:
        """Fabricated committees C_j' the server introduces to user j."""
        return {}

    # -- computation ---------------------------------------------------------------
    def evaluation_function(self, function):
        return function

    def falsify_outputs(self, outputs: list[bytes]) -> list[bytes]:
        return outputs

    def statement_bits(self, bits: list[int]) -> list[int]:
        """Seed bits the prover commits to in its proof."""
        return bits

    def proof_blocks(self, blocks: list[bytes]) -> list[bytes]:
        """Statement blocks the prover commits to in its proof."""
        return blocks

    def abort_proof(self, stage: str) -> bool:
        """Stop answering during a proof stage ("codeword", "commit", "open")."""
        return False

    def corrupt_codeword(self, slices: np.ndarray) -> np.ndarray:
        """Slices (holders, 3, instances) handed to the holders."""
        return slices

    def blocked_inputs(self, n: int) -> frozenset[int]:
        return frozenset()

    def rewire(self, wiring: dict[str, list[str]]) -> dict[str, list[str]]:
        return wiring

    def relay_broadcast(self, member: int, value: bytes) -> bytes:
        return value


HONEST = Strategy()
