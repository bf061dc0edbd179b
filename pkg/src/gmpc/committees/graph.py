"""Union-of-stars random graphs and exact diameters of induced subgraphs."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .subsets import sample_distinct


@dataclass
class DirectedGraph:
    """Vertices 0..n-1; out[v] holds v's sampled out-neighbors (empty for bad v)."""

    n: int
    out: list[np.ndarray]

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        src = np.concatenate([np.full(len(o), v, dtype=np.int64) for v, o in enumerate(self.out)]) \
            if self.n else np.zeros(0, dtype=np.int64)
        dst = np.concatenate(self.out) if self.n else np.zeros(0, dtype=np.int64)
        return src, dst.astype(np.int64)

    def out_degree(self) -> np.ndarray:
        return np.array([len(o) for o in self.out], dtype=np.int64)

    def in_degree(self) -> np.ndarray:
        _, dst = self.edges()
        return np.bincount(dst, minlength=self.n)


def graph_sample(n: int, d: int, bad_set, rng: np.random.Generator) -> DirectedGraph:
    """Each vertex outside bad_set picks d distinct out-neighbors uniformly from all n vertices."""
    if not 1 <= d <= n:
        raise ValueError("degree must be in [1, n]")
    bad = np.zeros(n, dtype=bool)
    bad[np.asarray(sorted(bad_set), dtype=np.int64)] = True
    good = np.flatnonzero(~bad)
    rows = sample_distinct(rng, good, n, d, exclude_owner=False) - 1
    out = [np.zeros(0, dtype=np.int64) for _ in range(n)]
    for v, row in zip(good.tolist(), rows):
        out[v] = np.sort(row)
    return DirectedGraph(n, out)


def diameter_from_edges(vertices, src, dst) -> float:
    """Diameter of the undirected graph on `vertices` using edges with both
    endpoints in `vertices`; math.inf if disconnected.

    All-sources BFS in parallel: every vertex carries a bitset of the sources
    that have reached it, and one step ORs in the bitsets of its neighbors.
    """
    vertices = np.unique(np.asarray(vertices, dtype=np.int64))
    m = len(vertices)
    if m <= 1:
        return 0
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    inside = np.isin(src, vertices) & np.isin(dst, vertices) & (src != dst)
    a = np.searchsorted(vertices, src[inside])
    b = np.searchsorted(vertices, dst[inside])
    rows = np.concatenate([a, b])
    cols = np.concatenate([b, a])
    keys = np.unique(rows * m + cols)
    rows, cols = keys // m, keys % m
    words = (m + 63) // 64
    reach = np.zeros((m, words), dtype=np.uint64)
    reach[np.arange(m), np.arange(m) // 64] = np.left_shift(np.uint64(1), (np.arange(m) % 64).astype(np.uint64))
    full = np.full(words, np.uint64(0xFFFFFFFFFFFFFFFF))
    if m % 64:
        full[-1] = np.uint64((1 << (m % 64)) - 1)
    if rows.size == 0:
        return math.inf
    starts = np.flatnonzero(np.r_[True, rows[1:] != rows[:-1]])
    has_edges = rows[starts]
    steps = 0
    chunk = max(1, (1 << 22) // max(1, words))
    while not (reach == full).all():
        merged = reach.copy()
        for lo in range(0, len(starts), chunk):
            hi = min(len(starts), lo + chunk)
            first = starts[lo]
            last = starts[hi] if hi < len(starts) else len(cols)
            gathered = reach[cols[first:last]]
            merged[has_edges[lo:hi]] |= np.bitwise_or.reduceat(gathered, starts[lo:hi] - first, axis=0)
        if np.array_equal(merged, reach):
            return math.inf
        reach = merged
        steps += 1
    return steps


def diameter(graph: DirectedGraph, vertex_subset) -> float:
    src, dst = graph.edges()
    return diameter_from_edges(vertex_subset, src, dst)


def diameter_bound(n: int, d: int) -> float:
    """Failure bound n^2 (ell+1) e^{-d/8} with ell = log_{d/4}(n/3)."""
    ell = math.log(n / 3) / math.log(d / 4)
    return n * n * (ell + 1) * math.exp(-d / 8)
