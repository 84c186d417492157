"""Small-world trading topology.

The trader graph starts as a square 2-D lattice with open boundaries and a
von Neumann (4-cell) neighborhood. Edges are then rewired at random with a
fixed probability: a selected edge keeps one endpoint and moves the other to
a uniformly chosen node, which shortens paths while preserving the edge count
and the near-4 mean degree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class TraderNetwork:
    """Undirected trader graph as per-node sorted neighbor tuples.

    Node ids are row-major: node (r, c) has id r * cols + c. Instances are
    immutable and safe to share across concurrent simulation runs.
    """

    rows: int
    cols: int
    adjacency: tuple[tuple[int, ...], ...]
    rewire_prob: float
    edge_count: int

    @property
    def n_nodes(self) -> int:
        return self.rows * self.cols

    def degree(self, node: int) -> int:
        return len(self.adjacency[node])

    def edges(self) -> list[tuple[int, int]]:
        """All edges as (u, v) with u < v, in lexicographic order."""
        return [(u, v) for u, nbrs in enumerate(self.adjacency) for v in nbrs if u < v]


def build_lattice(rows: int, cols: int) -> TraderNetwork:
    """Pristine open-boundary lattice with 4-neighborhood adjacency.

    Corner nodes have degree 2, border nodes 3, interior nodes 4. The edge
    count is rows*(cols-1) + cols*(rows-1).
    """
    if rows < 2 or cols < 2:
        raise ConfigError(f"lattice must be at least 2x2, got {rows}x{cols}")
    adjacency: list[list[int]] = [[] for _ in range(rows * cols)]
    for r in range(rows):
        for c in range(cols):
            k = r * cols + c
            if c + 1 < cols:
                adjacency[k].append(k + 1)
                adjacency[k + 1].append(k)
            if r + 1 < rows:
                adjacency[k].append(k + cols)
                adjacency[k + cols].append(k)
    edge_count = rows * (cols - 1) + cols * (rows - 1)
    return TraderNetwork(
        rows=rows,
        cols=cols,
        adjacency=tuple(tuple(sorted(nbrs)) for nbrs in adjacency),
        rewire_prob=0.0,
        edge_count=edge_count,
    )


def rewire(net: TraderNetwork, p: float, rng: np.random.Generator) -> TraderNetwork:
    """Randomly rewire each edge with probability p.

    A selected edge keeps one endpoint (chosen at random) and reattaches the
    other to a uniformly random node. Self-loops, duplicate edges, and the
    original endpoint are rejected and resampled, so the edge count never
    changes and at p=1 every edge has exactly one endpoint moved. Pure
    function of (net, p, rng state).
    """
    if not 0.0 <= p <= 1.0:
        raise ConfigError(f"rewire probability must be in [0, 1], got {p}")
    n = net.n_nodes
    adj = [set(nbrs) for nbrs in net.adjacency]
    edge_list = net.edges()
    selected = np.flatnonzero(rng.random(len(edge_list)) < p)
    for ei in selected:
        u, v = edge_list[ei]
        keep, move = (u, v) if rng.random() < 0.5 else (v, u)
        adj[u].discard(v)
        adj[v].discard(u)
        target = -1
        for _ in range(64):
            t = int(rng.integers(n))
            if t != keep and t != move and t not in adj[keep]:
                target = t
                break
        else:
            # Dense neighborhoods only; enumerate what is left.
            candidates = [t for t in range(n) if t != keep and t != move and t not in adj[keep]]
            if not candidates:
                adj[u].add(v)
                adj[v].add(u)
                continue
            target = candidates[int(rng.integers(len(candidates)))]
        adj[keep].add(target)
        adj[target].add(keep)
    return TraderNetwork(
        rows=net.rows,
        cols=net.cols,
        adjacency=tuple(tuple(sorted(s)) for s in adj),
        rewire_prob=p,
        edge_count=net.edge_count,
    )


def lattice_block(net: TraderNetwork, anchor: int, size: int) -> list[int]:
    """Contiguous patch of `size` cells of the underlying lattice at `anchor`.

    The patch is the first `size` cells, in row-major order, of a roughly
    square ceil(sqrt(size))-wide rectangle anchored at `anchor` and shifted
    to fit inside the lattice. Used to place grouped random-trader
    communities; rewiring does not affect the patch geometry.
    """
    n = net.n_nodes
    if not 0 <= anchor < n:
        raise ConfigError(f"anchor {anchor} outside lattice of {n} nodes")
    if size < 0 or size > n:
        raise ConfigError(f"patch size {size} outside [0, {n}]")
    if size == 0:
        return []
    side = math.isqrt(size - 1) + 1  # ceil(sqrt(size))
    width = min(side, net.cols)
    height = min(-(-size // width), net.rows)
    width = -(-size // height)  # widen if the lattice has too few rows
    r0 = min(anchor // net.cols, net.rows - height)
    c0 = min(anchor % net.cols, net.cols - width)
    block = []
    for r in range(r0, r0 + height):
        for c in range(c0, c0 + width):
            block.append(r * net.cols + c)
            if len(block) == size:
                return block
    raise AssertionError("patch construction exhausted the lattice")


def write_edge_list(net: TraderNetwork, path: str | Path) -> None:
    """Export edges as one ``u v`` pair per line with 0-based node ids."""
    lines = [f"{u} {v}" for u, v in net.edges()]
    Path(path).write_text("\n".join(lines) + "\n")
