import logging
import math
from typing import Callable, Dict, List, Tuple

import networkx as nx
import numpy as np

from tango.errors import GraphError
from tango.graphs.graph import Graph

logger = logging.getLogger(__name__)

ER_MAX_TRIES = 100
BA_ATTACHMENT = 2


def _nx_seed(rng: np.random.Generator) -> int:
    return int(rng.integers(0, 2**31 - 1))


def erdos_renyi(n: int, rng: np.random.Generator) -> Graph:
    """G(n, p) with p = 2 ln n / n, regenerated until connected."""
    p = min(1.0, 2.0 * math.log(n) / n) if n > 1 else 0.0
    for _ in range(ER_MAX_TRIES):
        g = nx.fast_gnp_random_graph(n, p, seed=_nx_seed(rng))
        if nx.is_connected(g):
            return Graph.from_networkx(g)
    raise GraphError(f"no connected Erdos-Renyi graph with n={n} after {ER_MAX_TRIES} tries")


def barabasi_albert(n: int, rng: np.random.Generator) -> Graph:
    if n <= BA_ATTACHMENT:
        raise GraphError(f"Barabasi-Albert needs n > {BA_ATTACHMENT}, got {n}")
    return Graph.from_networkx(nx.barabasi_albert_graph(n, BA_ATTACHMENT, seed=_nx_seed(rng)))


def caveman(n: int, rng: np.random.Generator) -> Graph:
    """About sqrt(n) cliques of near-equal size joined in a ring."""
    cliques = np.array_split(np.arange(n), max(1, int(round(math.sqrt(n)))))
    edges = set()
    for c in cliques:
        for i, u in enumerate(c):
            for v in c[i + 1:]:
                edges.add((int(u), int(v)))
    k = len(cliques)
    links = k if k > 2 else k - 1
    for i in range(links):
        u, v = int(cliques[i][-1]), int(cliques[(i + 1) % k][0])
        edges.add((min(u, v), max(u, v)))
    return Graph.from_edges(n, edges)


def tree(n: int, rng: np.random.Generator) -> Graph:
    """Random recursive tree: node i attaches to a uniform earlier node."""
    return Graph.from_edges(n, [(i, int(rng.integers(0, i))) for i in range(1, n)])


def grid(n: int, rng: np.random.Generator) -> Graph:
    """Row-major lattice with ceil(sqrt(n)) columns; the last row may be partial."""
    cols = math.ceil(math.sqrt(n))
    edges = [(i, i + 1) for i in range(n - 1) if (i + 1) % cols]
    edges += [(i, i + cols) for i in range(n - cols)]
    return Graph.from_edges(n, edges)


def line(n: int, rng: np.random.Generator) -> Graph:
    return Graph.from_networkx(nx.path_graph(n))


def star(n: int, rng: np.random.Generator) -> Graph:
    return Graph.from_networkx(nx.star_graph(n - 1))


def caterpillar(n: int, rng: np.random.Generator) -> Graph:
    """Backbone path of b ~ U[1, n) nodes, the rest pendant on the backbone."""
    if n < 2:
        raise GraphError(f"caterpillar needs n >= 2, got {n}")
    b = int(rng.integers(1, n))
    edges = [(i - 1, i) for i in range(1, b)]
    edges += [(i, int(rng.integers(0, b))) for i in range(b, n)]
    return Graph.from_edges(n, edges)


def lobster(n: int, rng: np.random.Generator) -> Graph:
    """Caterpillar with a second layer of pendants hanging off the first."""
    if n < 2:
        raise GraphError(f"lobster needs n >= 2, got {n}")
    b = int(rng.integers(1, n))
    f = int(rng.integers(b + 1, n + 1))
    edges = [(i - 1, i) for i in range(1, b)]
    edges += [(i, int(rng.integers(0, b))) for i in range(b, f)]
    edges += [(i, int(rng.integers(b, f))) for i in range(f, n)]
    return Graph.from_edges(n, edges)


FAMILIES: Dict[str, Callable[[int, np.random.Generator], Graph]] = {
    "erdos-renyi": erdos_renyi,
    "barabasi-albert": barabasi_albert,
    "caveman": caveman,
    "tree": tree,
    "grid": grid,
    "line": line,
    "star": star,
    "caterpillar": caterpillar,
    "lobster": lobster,
}


def generate_family(family: str, n: int, rng: np.random.Generator) -> Graph:
    try:
        make = FAMILIES[family]
    except KeyError:
        raise GraphError(f"unknown graph family {family!r}") from None
    if n < 1:
        raise GraphError(f"{family}: n must be positive, got {n}")
    g = make(int(n), rng)
    if not g.is_connected():
        raise GraphError(f"{family} generator produced a disconnected graph (n={n})")
    return g


def barbell(k: int) -> Graph:
    """Two k-cliques on nodes 0..k-1 and k..2k-1 joined by the bridge (k-1, k)."""
    if k < 3:
        raise GraphError(f"barbell cliques need k >= 3, got {k}")
    edges: List[Tuple[int, int]] = []
    for offset in (0, k):
        edges += [(offset + i, offset + j) for i in range(k) for j in range(i + 1, k)]
    edges.append((k - 1, k))
    return Graph.from_edges(2 * k, edges)
