"""Ideal-world reference: a trusted party computes f on the delivered inputs.

The server may block a set B of user inputs, which are replaced by the
default input. A block set larger than alpha * n lets the ideal world abort.
"""
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

from .. import params
from .functions import GmpcFunction


@dataclass(frozen=True)
class IdealResult:
    output: bytes | None
    effective_inputs: tuple[bytes, ...]
    may_abort: bool


def ideal_world(function: GmpcFunction, inputs: Sequence[bytes], blocked, alpha) -> IdealResult:
    n = len(inputs) - 1
    blocked = frozenset(int(b) for b in blocked)
    effective = tuple(function.default_input() if i in blocked else x for i, x in enumerate(inputs))
    may_abort = len(blocked) > params.as_fraction(alpha) * n
    return IdealResult(function.server_output(effective), effective, may_abort)


def legal_outcome(result: IdealResult, output: bytes | None) -> bool:
    """Real output is legal if it equals the ideal output, or is an abort
    the ideal world allows (any abort of a corrupted-server run)."""
    return output is None or output == result.output
