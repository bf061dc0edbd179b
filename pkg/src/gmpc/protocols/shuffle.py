"""Shuffle: sort the inputs by fresh random keys inside the committees.

Each input committee draws a 2 kappa-bit key and the sorting network runs
on (key, input) pairs; the server sees only the inputs in key order, which
is a uniformly random order. Equal keys make the whole run start over.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..committees.many import CommitteeTree
from ..netsim import Network
from .circuits import CircuitOutcome, circuit_committees_run, sorting_circuit
from .sorting import bitonic_network


@dataclass
class ShuffleOutcome:
    output: list[bytes] | None
    attempts: int
    circuit: CircuitOutcome


def shuffle_run(inputs: list[bytes], tree: CommitteeTree, net: Network, rng: np.random.Generator, kappa: int,
                *, max_attempts: int = 8) -> ShuffleOutcome:
    """inputs[k] is user k + 1's block; all blocks share one length."""
    width = max(len(x) for x in inputs)
    key_bits = 2 * kappa
    network = bitonic_network(len(inputs))
    circuit = sorting_circuit(network)
    sentinel = 1 << (key_bits + 8 * width)  # above every (key, input) pair
    for attempt in range(1, max_attempts + 1):
        keys = [int.from_bytes(rng.bytes(key_bits // 8), "little") for _ in inputs]
        if len(set(keys)) < len(keys):
            continue
        wires = {}
        for k, name in enumerate(circuit.inputs):
            if k < len(inputs):
                wires[name] = (k + 1, (keys[k] << (8 * width)) | int.from_bytes(inputs[k], "big"))
            else:
                wires[name] = (1 + k % len(inputs), sentinel)
        out = circuit_committees_run(circuit, wires, tree, net, rng, value_bytes=key_bits // 8 + width + 1)
        if out.outputs is None:
            return ShuffleOutcome(None, attempt, out)
        mask = (1 << (8 * width)) - 1
        values = [(v & mask).to_bytes(width, "big") for v in out.outputs[:len(inputs)]]
        return ShuffleOutcome(values, attempt, out)
    raise RuntimeError("key collisions in every attempt")
