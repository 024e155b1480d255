"""Interaction networks: periodic square lattice and Watts-Strogatz small world.

Both generators return an immutable ``Network`` whose adjacency lists are
sorted, symmetric and free of self-loops and duplicate edges. Lattice node
ids are row-major (``id = y * side + x``); snapshots rely on that layout.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import InvalidParameterError

# Redraws allowed per rewired edge before the original edge is kept
MAX_REWIRE_RETRIES = 100


@dataclass(frozen=True)
class SquareLattice:
    """Von Neumann lattice with periodic boundaries."""
    side: int


@dataclass(frozen=True)
class SmallWorld:
    """Ring lattice of degree ``ring_degree`` with random rewiring."""
    ring_degree: int
    rewire_prob: float


NetworkKind = SquareLattice | SmallWorld


@dataclass(frozen=True)
class Network:
    """Immutable node/neighbour structure shared read-only by every run."""
    n: int
    kind: NetworkKind
    adjacency: tuple[tuple[int, ...], ...]

    @property
    def side(self) -> int | None:
        return self.kind.side if isinstance(self.kind, SquareLattice) else None

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.array([len(nbrs) for nbrs in self.adjacency], dtype=np.int64)

    @cached_property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.n else 0

    @cached_property
    def edge_count(self) -> int:
        return int(self.degrees.sum()) // 2

    @cached_property
    def neighbor_table(self) -> np.ndarray:
        """Padded ``(n, max_degree)`` neighbour ids; padding slots hold the node itself."""
        table = np.repeat(np.arange(self.n, dtype=np.int64)[:, None], self.max_degree, axis=1)
        for i, nbrs in enumerate(self.adjacency):
            table[i, : len(nbrs)] = nbrs
        return table

    @cached_property
    def neighbor_mask(self) -> np.ndarray:
        """Boolean ``(n, max_degree)`` mask of real neighbour slots."""
        slots = np.arange(self.max_degree)[None, :]
        return slots < self.degrees[:, None]


def _freeze(adj: list[set[int]]) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(sorted(nbrs)) for nbrs in adj)


def gen_square_lattice(side: int) -> Network:
    """Square lattice of ``side * side`` nodes with periodic boundaries.

    Neighbours of (x, y) are (x +/- 1 mod side, y) and (x, y +/- 1 mod side).
    On a 2x2 torus the wraparound collapses opposite neighbours, leaving
    degree 2.
    """
    if side < 2:
        raise InvalidParameterError(f"side must be >= 2, got {side}")
    n = side * side
    adj: list[set[int]] = [set() for _ in range(n)]
    for y in range(side):
        for x in range(side):
            i = y * side + x
            for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                j = ((y + dy) % side) * side + (x + dx) % side
                if j != i:
                    adj[i].add(j)
    return Network(n=n, kind=SquareLattice(side=side), adjacency=_freeze(adj))


def gen_small_world(
    n: int,
    ring_degree: int,
    rewire_prob: float,
    rng: np.random.Generator,
) -> Network:
    """Watts-Strogatz small-world network.

    Starts from a ring where every node links to ``ring_degree / 2`` nodes on
    each side, then visits each clockwise edge (i, i + j) once and, with
    probability ``rewire_prob``, moves its far endpoint to a uniformly drawn
    node. Draws that would create a self-loop or a duplicate edge are redrawn
    up to ``MAX_REWIRE_RETRIES`` times; after that the original edge stays.
    The edge count ``n * ring_degree / 2`` is therefore preserved exactly.

    Args:
        n: Number of nodes (> ring_degree).
        ring_degree: Initial ring degree (even, positive).
        rewire_prob: Rewiring probability in [0, 1].
        rng: Random stream consumed in ascending (node, offset) order.
    """
    if ring_degree <= 0 or ring_degree % 2:
        raise InvalidParameterError(f"ring_degree must be even and positive, got {ring_degree}")
    if n <= ring_degree:
        raise InvalidParameterError(f"n must exceed ring_degree ({ring_degree}), got {n}")
    if not 0.0 <= rewire_prob <= 1.0:
        raise InvalidParameterError(f"rewire_prob must lie in [0, 1], got {rewire_prob}")

    half = ring_degree // 2
    adj: list[set[int]] = [set() for _ in range(n)]
    for i in range(n):
        for j in range(1, half + 1):
            k = (i + j) % n
            adj[i].add(k)
            adj[k].add(i)

    if rewire_prob > 0.0:
        for i in range(n):
            for j in range(1, half + 1):
                if rng.random() >= rewire_prob:
                    continue
                old = (i + j) % n
                for _ in range(MAX_REWIRE_RETRIES):
                    w = int(rng.integers(n))
                    if w != i and w not in adj[i]:
                        adj[i].discard(old)
                        adj[old].discard(i)
                        adj[i].add(w)
                        adj[w].add(i)
                        break

    return Network(
        n=n,
        kind=SmallWorld(ring_degree=ring_degree, rewire_prob=rewire_prob),
        adjacency=_freeze(adj),
    )


def neighbors(net: Network, i: int) -> tuple[int, ...]:
    """Return the neighbour list of node ``i`` (no copy)."""
    if not 0 <= i < net.n:
        raise InvalidParameterError(f"node id {i} out of range [0, {net.n})")
    return net.adjacency[i]
