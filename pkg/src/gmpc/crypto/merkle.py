"""Merkle-tree vector commitments with position openings.

Leaves and inner nodes are hashed under distinct prefixes and a per-use
domain tag. A multi-position opening is the tuple of single-position sibling
paths, so its size is at most |S| * ceil(log2 m) digests.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import lru_cache

_LEAF, _NODE, _PAD = b"\x00", b"\x01", b"\x02"


def _digest(*parts: bytes) -> bytes:
    h = hashlib.sha256()
    for part in parts:
        h.update(part)
    return h.digest()


@dataclass(frozen=True)
class VcParams:
    kappa: int
    leaf_count: int
    domain: bytes = b""
    digest: str = "sha256"

    @property
    def depth(self) -> int:
        return max(0, (self.leaf_count - 1).bit_length())


@dataclass(frozen=True)
class MerkleCommitment:
    root: bytes
    leaf_count: int
    pp: VcParams


@dataclass(frozen=True)
class Opening:
    positions: tuple[int, ...]
    paths: tuple[tuple[bytes, ...], ...]

    @property
    def digest_count(self) -> int:
        return sum(len(p) for p in self.paths)

    @property
    def size_bytes(self) -> int:
        return 32 * self.digest_count + 8 * len(self.positions)


class MerkleTree:
    """Prover-side state: every level of the tree, leaves first."""

    def __init__(self, pp: VcParams, values):
        if len(values) != pp.leaf_count:
            raise ValueError(f"expected {pp.leaf_count} values, got {len(values)}")
        width = 1 << pp.depth
        level = [_leaf_hash(pp.domain, i, v) for i, v in enumerate(values)]
        level += [_digest(_PAD, pp.domain)] * (width - len(level))
        self.levels = [level]
        while len(level) > 1:
            level = [_digest(_NODE, pp.domain, level[i], level[i + 1]) for i in range(0, len(level), 2)]
            self.levels.append(level)
        self.values = tuple(values)
        self._paths: dict[int, tuple[bytes, ...]] = {}

    @property
    def root(self) -> bytes:
        return self.levels[-1][0]

    def path(self, position: int) -> tuple[bytes, ...]:
        cached = self._paths.get(position)
        if cached is None:
            siblings, index = [], position
            for level in self.levels[:-1]:
                siblings.append(level[index ^ 1])
                index >>= 1
            cached = self._paths[position] = tuple(siblings)
        return cached


def _leaf_hash(domain: bytes, index: int, value: bytes) -> bytes:
    return _digest(_LEAF, domain, index.to_bytes(8, "little"), value)


@lru_cache(maxsize=1 << 18)
def _path_root(domain: bytes, position: int, value: bytes, path: tuple[bytes, ...]) -> bytes:
    node, index = _leaf_hash(domain, position, value), position
    for sibling in path:
        node = _digest(_NODE, domain, sibling, node) if index & 1 else _digest(_NODE, domain, node, sibling)
        index >>= 1
    return node


def vc_setup(kappa: int, leaf_count: int, domain: bytes = b"") -> VcParams:
    if leaf_count < 1:
        raise ValueError("a commitment needs at least one position")
    return VcParams(kappa, leaf_count, domain)


def vc_commit(pp: VcParams, values) -> tuple[MerkleTree, MerkleCommitment]:
    tree = MerkleTree(pp, values)
    return tree, MerkleCommitment(tree.root, pp.leaf_count, pp)


def vc_open(pp: VcParams, values, commitment: MerkleCommitment, positions, tree: MerkleTree) -> Opening:
    positions = tuple(positions)
    for pos in positions:
        if not 0 <= pos < pp.leaf_count:
            raise IndexError(f"position {pos} outside [0, {pp.leaf_count})")
    return Opening(positions, tuple(tree.path(pos) for pos in positions))


def vc_verify(pp: VcParams, commitment: MerkleCommitment | bytes, values, positions, opening: Opening) -> bool:
    root = commitment.root if isinstance(commitment, MerkleCommitment) else commitment
    positions = tuple(positions)
    values = tuple(values)
    if opening.positions != positions or len(values) != len(positions):
        return False
    for pos, value, path in zip(positions, values, opening.paths):
        if not 0 <= pos < pp.leaf_count or len(path) != pp.depth:
            return False
        if _path_root(pp.domain, pos, value, path) != root:
            return False
    return True


def verify_cost(pp: VcParams, positions: int) -> int:
    """Hash evaluations a verifier spends on an opening of this many positions."""
    return positions * (pp.depth + 1)
