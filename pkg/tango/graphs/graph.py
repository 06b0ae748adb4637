from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Tuple

import networkx as nx
import numpy as np

from tango.errors import GraphError, ShapeError

Edge = Tuple[int, int]


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected graph.

    `edges` holds each undirected edge once as (u, v) with u < v, sorted.
    `senders`/`receivers` list every edge in both directions and drive the
    sparse aggregation ops. `indptr`/`indices` are the CSR neighbour lists.
    """

    n: int
    edges: Tuple[Edge, ...]
    indptr: np.ndarray = field(repr=False)
    indices: np.ndarray = field(repr=False)
    senders: np.ndarray = field(repr=False)
    receivers: np.ndarray = field(repr=False)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Iterable[int]]) -> "Graph":
        n = int(n)
        if n < 1:
            raise GraphError("a graph needs at least one node")
        canon = set()
        for e in edges:
            u, v = (int(i) for i in e)
            if u == v:
                raise GraphError(f"self-loop at node {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) references a node outside 0..{n - 1}")
            key = (min(u, v), max(u, v))
            if key in canon:
                raise GraphError(f"duplicate edge {key}")
            canon.add(key)
        ordered = tuple(sorted(canon))

        src = np.array([u for u, v in ordered] + [v for u, v in ordered], dtype=np.int64)
        dst = np.array([v for u, v in ordered] + [u for u, v in ordered], dtype=np.int64)
        order = np.lexsort((src, dst))
        senders, receivers = src[order], dst[order]
        # receivers are sorted, so the senders double as CSR column indices
        counts = np.bincount(receivers, minlength=n)
        indptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
        return cls(n, ordered, _frozen(indptr), _frozen(senders.copy()), _frozen(senders), _frozen(receivers))

    @classmethod
    def from_networkx(cls, nx_graph: nx.Graph) -> "Graph":
        relabelled = nx.convert_node_labels_to_integers(nx_graph, ordering="sorted")
        return cls.from_edges(relabelled.number_of_nodes(), relabelled.edges())

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges)
        return g

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def is_connected(self) -> bool:
        seen = np.zeros(self.n, dtype=bool)
        seen[0] = True
        stack = [0]
        while stack:
            v = stack.pop()
            for u in self.neighbors(v):
                if not seen[u]:
                    seen[u] = True
                    stack.append(int(u))
        return bool(seen.all())

    def permute(self, perm) -> "Graph":
        """Relabel node i as perm[i]."""
        perm = np.asarray(perm, dtype=np.int64)
        if sorted(perm.tolist()) != list(range(self.n)):
            raise GraphError("perm must be a permutation of the node ids")
        return Graph.from_edges(self.n, [(perm[u], perm[v]) for u, v in self.edges])

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.edges))


def laplacian_apply(g: Graph, H) -> np.ndarray:
    """(D - A) H with the combinatorial Laplacian."""
    H = np.asarray(H, dtype=np.float64)
    if H.ndim == 1:
        H = H.reshape(-1, 1)
    if H.shape[0] != g.n:
        raise ShapeError(f"features have {H.shape[0]} rows, graph has {g.n} nodes")
    out = g.degrees[:, None] * H
    np.subtract.at(out, g.receivers, H[g.senders])
    return out


def dirichlet_energy(g: Graph, H) -> float:
    H = np.asarray(H, dtype=np.float64)
    if H.ndim == 1:
        H = H.reshape(-1, 1)
    if H.shape[0] != g.n:
        raise ShapeError(f"features have {H.shape[0]} rows, graph has {g.n} nodes")
    if not g.edges:
        return 0.0
    u = np.array([e[0] for e in g.edges])
    v = np.array([e[1] for e in g.edges])
    return 0.5 * float(np.sum((H[u] - H[v]) ** 2))


def laplacian_max_eigenvalue(g: Graph, iters: int = 200, seed: int = 0) -> float:
    """Power-iteration estimate of the largest Laplacian eigenvalue."""
    if not g.edges:
        return 0.0
    rng = np.random.default_rng(seed)
    v = rng.standard_normal((g.n, 1))
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(iters):
        w = laplacian_apply(g, v)
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0
        lam = float((v * w).sum())
        v = w / norm
    return lam


def laplacian_matrix(g: Graph) -> np.ndarray:
    """Dense Laplacian, for small graphs and exact oracles."""
    return laplacian_apply(g, np.eye(g.n))
