"""Agent network graphs and the neighborhood quantities the algorithm consumes.

Nodes are dense 0-based integers. Graphs are undirected, unweighted and must
be connected; all distances are shortest-path hop counts computed by BFS.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np


class GraphError(ValueError):
    """Raised for invalid or disconnected graph specifications."""


@dataclass(frozen=True)
class Topology:
    """Undirected connected graph with precomputed hop distances.

    Attributes:
        node_count: number of nodes V.
        edges: frozenset of sorted (u, v) pairs.
        distance: V x V int array of shortest-path hop counts.
        diameter: max pairwise distance.
    """

    node_count: int
    edges: frozenset
    distance: np.ndarray
    diameter: int

    def neighbors(self, i: int) -> list[int]:
        """Direct (1-hop) neighbors of node i."""
        return [int(j) for j in np.nonzero(self.distance[i] == 1)[0]]


@dataclass(frozen=True)
class NeighborhoodStats:
    """Per-node w-neighborhood sets and the derived minima.

    ``v_i_w[i]`` is the smallest w-neighborhood size among nodes within
    distance w of i; ``v_min_w`` is the global minimum over all nodes.
    """

    w: int
    neighborhoods: tuple  # tuple of frozensets, index by node
    sizes: np.ndarray
    v_i_w: np.ndarray
    v_min_w: int


def _bfs_distances(node_count: int, adjacency: Sequence[Sequence[int]]) -> np.ndarray:
    dist = np.full((node_count, node_count), -1, dtype=np.int64)
    for src in range(node_count):
        dist[src, src] = 0
        frontier = [src]
        d = 0
        while frontier:
            d += 1
            nxt = []
            for u in frontier:
                for v in adjacency[u]:
                    if dist[src, v] < 0:
                        dist[src, v] = d
                        nxt.append(v)
            frontier = nxt
    return dist


def from_edges(node_count: int, edges) -> Topology:
    """Build a Topology from an explicit edge list.

    Raises GraphError if the graph is disconnected, has out-of-range nodes,
    or self-loops.
    """
    if node_count < 1:
        raise GraphError(f"node_count must be >= 1, got {node_count}")
    norm = set()
    for u, v in edges:
        u, v = int(u), int(v)
        if u == v:
            raise GraphError(f"self-loop at node {u}")
        if not (0 <= u < node_count and 0 <= v < node_count):
            raise GraphError(f"edge ({u},{v}) out of range for {node_count} nodes")
        norm.add((min(u, v), max(u, v)))
    adjacency = [[] for _ in range(node_count)]
    for u, v in norm:
        adjacency[u].append(v)
        adjacency[v].append(u)
    dist = _bfs_distances(node_count, adjacency)
    if (dist < 0).any():
        raise GraphError("graph is disconnected")
    return Topology(
        node_count=node_count,
        edges=frozenset(norm),
        distance=dist,
        diameter=int(dist.max()),
    )


def complete_graph(node_count: int) -> Topology:
    return from_edges(
        node_count,
        [(u, v) for u in range(node_count) for v in range(u + 1, node_count)],
    )


def ring_graph(node_count: int) -> Topology:
    if node_count < 3:
        raise GraphError(f"ring needs >= 3 nodes, got {node_count}")
    return from_edges(node_count, [(i, (i + 1) % node_count) for i in range(node_count)])


def erdos_renyi_graph(
    node_count: int, p: float, rng: np.random.Generator, max_retries: int = 1000
) -> Topology:
    """Sample G(V, p) edges, resampling until connected.

    Raises GraphError after max_retries failed connectivity attempts.
    """
    if not (0.0 <= p <= 1.0):
        raise GraphError(f"edge probability must be in [0,1], got {p}")
    pairs = [(u, v) for u in range(node_count) for v in range(u + 1, node_count)]
    for _ in range(max_retries):
        mask = rng.random(len(pairs)) < p
        edges = [e for e, keep in zip(pairs, mask) if keep]
        try:
            return from_edges(node_count, edges)
        except GraphError:
            continue
    raise GraphError(
        f"could not sample a connected G({node_count}, {p}) in {max_retries} tries"
    )


def build_graph(spec: Mapping, rng: np.random.Generator | None = None) -> Topology:
    """Build a Topology from a config mapping.

    Recognized generators: ``complete``, ``ring``, ``ring_plus_chords``
    (10 nodes), ``erdos_renyi`` (requires ``p`` and an rng), ``explicit``
    (requires ``edges``).
    """
    generator = spec.get("generator", "explicit")
    node_count = int(spec["nodes"])
    if generator == "complete":
        return complete_graph(node_count)
    if generator == "ring":
        return ring_graph(node_count)
    if generator == "ring_plus_chords":
        if node_count != 10:
            raise GraphError("ring_plus_chords generator is a fixed 10-node graph")
        return ring_plus_chords()
    if generator == "erdos_renyi":
        if rng is None:
            raise GraphError("erdos_renyi generator needs an rng")
        return erdos_renyi_graph(node_count, float(spec["p"]), rng)
    if generator == "explicit":
        return from_edges(node_count, spec["edges"])
    raise GraphError(f"unknown graph generator {generator!r}")


def neighborhood_stats(topology: Topology, w: int) -> NeighborhoodStats:
    """Compute w-neighborhoods and the v_i^w / v_min^w minima."""
    if w < 0:
        raise GraphError(f"collaboration distance must be >= 0, got {w}")
    within = topology.distance <= w
    sizes = within.sum(axis=1).astype(np.int64)
    neighborhoods = tuple(
        frozenset(int(j) for j in np.nonzero(within[i])[0])
        for i in range(topology.node_count)
    )
    v_i_w = np.array(
        [int(sizes[list(nbhd)].min()) for nbhd in neighborhoods], dtype=np.int64
    )
    return NeighborhoodStats(
        w=w,
        neighborhoods=neighborhoods,
        sizes=sizes,
        v_i_w=v_i_w,
        v_min_w=int(v_i_w.min()),
    )


# Documented stand-in for the 10-node decentralized experiment network:
# a ring 0..9 plus four chords, so every normal node keeps at most one
# Byzantine neighbor when nodes 0 and 5 are Byzantine.
RING_PLUS_CHORDS_EDGES = [
    (0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (8, 9), (9, 0),
    (1, 4), (6, 9), (2, 7), (3, 8),
]


def ring_plus_chords() -> Topology:
    """The 10-node ring-with-chords network used by the Byzantine experiments."""
    return from_edges(10, RING_PLUS_CHORDS_EDGES)
