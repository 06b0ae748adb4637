from collections import deque
from typing import NamedTuple

import numpy as np

from tango.errors import GraphError
from tango.graphs.graph import Graph


class Targets(NamedTuple):
    diameter: float
    sssp: np.ndarray
    ecc: np.ndarray


def bfs_distances(g: Graph, source: int) -> np.ndarray:
    """Hop distance from `source` to every node, -1 where unreachable."""
    dist = np.full(g.n, -1, dtype=np.int64)
    dist[source] = 0
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for u in g.neighbors(v):
            if dist[u] < 0:
                dist[u] = dist[v] + 1
                queue.append(int(u))
    return dist


def compute_targets(g: Graph, source: int = 0) -> Targets:
    if not 0 <= source < g.n:
        raise GraphError(f"source {source} is not a node of a {g.n}-node graph")
    ecc = np.zeros(g.n)
    sssp = None
    for v in range(g.n):
        dist = bfs_distances(g, v)
        if (dist < 0).any():
            raise GraphError("targets need a connected graph")
        ecc[v] = dist.max()
        if v == source:
            sssp = dist.astype(np.float64)
    return Targets(float(ecc.max()), sssp, ecc)
