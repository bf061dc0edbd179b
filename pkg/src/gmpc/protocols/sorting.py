"""Bitonic sorting network as layers of compare-exchange pairs."""
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass


@dataclass(frozen=True)
class SortNetwork:
    width: int                                   # power of two
    layers: tuple[tuple[tuple[int, int], ...], ...]  # (low, high): min goes to low

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def size(self) -> int:
        return sum(len(layer) for layer in self.layers)

    def apply(self, values: Sequence, sentinel=None) -> list:
        """Sort `values`, padding to the width with a sentinel above every value."""
        if len(values) > self.width:
            raise ValueError("more values than network inputs")
        padded = [(0, v) for v in values] + [(1, sentinel)] * (self.width - len(values))
        for layer in self.layers:
            for lo, hi in layer:
                if padded[hi] < padded[lo]:
                    padded[lo], padded[hi] = padded[hi], padded[lo]
        return [v for flag, v in padded[:len(values)]]


def bitonic_network(n_inputs: int) -> SortNetwork:
    """Network for n_inputs values (rounded up to a power of two)."""
    if n_inputs < 1:
        raise ValueError("need at least one input")
    width = 1 << (n_inputs - 1).bit_length()
    layers = []
    k = 2
    while k <= width:
        j = k // 2
        while j >= 1:
            layer = []
            for i in range(width):
                partner = i ^ j
                if partner > i:
                    ascending = (i & k) == 0
                    layer.append((i, partner) if ascending else (partner, i))
            layers.append(tuple(layer))
            j //= 2
        k *= 2
    return SortNetwork(width, tuple(layers))
