"""Named functions f = (f_0..f_n) over n + 1 input blocks.

Block 0 is the server's input and blocks 1..n are the users'. Each output
block f_i is a circuit with explicit dependencies so a verifier can
re-execute it from the blocks it reads.
"""
from __future__ import annotations

from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class BlockCircuit:
    identifier: bytes
    dependencies: tuple[int, ...]
    rule: Callable[[Mapping[int, bytes]], bytes]

    def __call__(self, inputs: Mapping[int, bytes]) -> bytes:
        return self.rule(inputs)


@dataclass(frozen=True)
class GmpcFunction:
    name: str
    block_bytes: int  # m / 8
    output_rule: Callable[[int, int, int], BlockCircuit]

    @property
    def identifier(self) -> bytes:
        return f"{self.name}/{self.block_bytes}".encode()

    def circuit(self, index: int, n: int) -> BlockCircuit:
        return self.output_rule(index, n, self.block_bytes)

    def default_input(self) -> bytes:
        return bytes(self.block_bytes)

    def evaluate(self, inputs: Sequence[bytes]) -> list[bytes]:
        """Plain evaluation y_0..y_n (the reference output)."""
        n = len(inputs) - 1
        table = dict(enumerate(inputs))
        return [self.circuit(i, n)({d: table[d] for d in self.circuit(i, n).dependencies}) for i in range(n + 1)]

    def server_output(self, inputs: Sequence[bytes]) -> bytes:
        return b"".join(self.evaluate(inputs))


def _tag(name: str, index: int, n: int) -> bytes:
    return f"{name}/{index}/{n}".encode()


def _identity(index: int, n: int, width: int) -> BlockCircuit:
    if index == 0:
        return BlockCircuit(_tag("identity", 0, n), (0,), lambda x: x[0])
    return BlockCircuit(_tag("identity", index, n), (), lambda x: b"")


def _concat(index: int, n: int, width: int) -> BlockCircuit:
    return BlockCircuit(_tag("concatenation", index, n), (index,), lambda x: x[index])


def _bit_sum(index: int, n: int, width: int) -> BlockCircuit:
    if index != 0:
        return BlockCircuit(_tag("bit-sum", index, n), (), lambda x: b"")
    deps = tuple(range(1, n + 1))
    rule = lambda x: sum(int.from_bytes(x[d], "little").bit_count() for d in deps).to_bytes(8, "little")
    return BlockCircuit(_tag("bit-sum", 0, n), deps, rule)


def _sort(index: int, n: int, width: int) -> BlockCircuit:
    """y_0 is empty; y_i is the i-th smallest user input."""
    if index == 0:
        return BlockCircuit(_tag("sort", 0, n), (), lambda x: b"")
    deps = tuple(range(1, n + 1))
    return BlockCircuit(_tag("sort", index, n), deps, lambda x: sorted(x[d] for d in deps)[index - 1])


FUNCTIONS: dict[str, Callable[[int], GmpcFunction]] = {
    "identity": lambda m: GmpcFunction("identity", m, _identity),
    "concatenation": lambda m: GmpcFunction("concatenation", m, _concat),
    "bit-sum": lambda m: GmpcFunction("bit-sum", m, _bit_sum),
    "sort": lambda m: GmpcFunction("sort", m, _sort),
}
ALIASES = {"concat": "concatenation", "sorted-concatenation": "sort"}


def get_function(name: str, block_bytes: int = 8) -> GmpcFunction:
    key = ALIASES.get(name, name)
    if key not in FUNCTIONS:
        raise KeyError(f"unknown function {name!r}; known: {sorted(FUNCTIONS)}")
    return FUNCTIONS[key](block_bytes)


def random_inputs(n: int, block_bytes: int, rng: np.random.Generator) -> list[bytes]:
    return [rng.bytes(block_bytes) for _ in range(n + 1)]
