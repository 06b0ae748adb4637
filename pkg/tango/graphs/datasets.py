import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from tango.errors import GraphError, ShapeError
from tango.graphs.generators import barbell, generate_family
from tango.graphs.graph import Graph
from tango.graphs.targets import compute_targets
from tango.schemas.config import DatasetConfig

logger = logging.getLogger(__name__)

SPLIT_NAMES = ("train", "val", "test")
NODE_TASKS = ("sssp", "eccentricity", "barbell-demo")


@dataclass(frozen=True, eq=False)
class GraphSample:
    graph: Graph
    x: np.ndarray
    task: str
    y_graph: Optional[float] = None
    y_node: Optional[np.ndarray] = None
    source: Optional[int] = None
    family: Optional[str] = None

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.float64)
        if x.ndim == 1:
            x = x.reshape(-1, 1)
        if x.shape[0] != self.graph.n:
            raise ShapeError(f"x has {x.shape[0]} rows for a {self.graph.n}-node graph")
        if not np.all(np.isfinite(x)):
            raise GraphError("x holds non-finite values")
        x.setflags(write=False)
        object.__setattr__(self, "x", x)
        if (self.y_graph is None) == (self.y_node is None):
            raise GraphError("exactly one of y_graph / y_node must be set")
        if self.y_graph is not None and not np.isfinite(self.y_graph):
            raise GraphError("y_graph is not finite")
        if self.y_node is not None:
            y = np.asarray(self.y_node, dtype=np.float64).reshape(-1)
            if y.size != self.graph.n:
                raise ShapeError(f"y_node has {y.size} entries for a {self.graph.n}-node graph")
            if not np.all(np.isfinite(y)):
                raise GraphError("y_node holds non-finite values")
            y.setflags(write=False)
            object.__setattr__(self, "y_node", y)

    @property
    def is_node_task(self) -> bool:
        return self.y_node is not None

    def target(self) -> np.ndarray:
        """Target as a column matrix: n x 1 for node tasks, 1 x 1 for graph tasks."""
        if self.y_node is not None:
            return self.y_node.reshape(-1, 1)
        return np.array([[self.y_graph]])

    def __eq__(self, other) -> bool:
        if not isinstance(other, GraphSample):
            return NotImplemented

        def same(a, b):
            if a is None or b is None:
                return a is b
            return np.array_equal(a, b)

        return (
            self.graph == other.graph
            and self.task == other.task
            and np.array_equal(self.x, other.x)
            and self.y_graph == other.y_graph
            and same(self.y_node, other.y_node)
            and self.source == other.source
            and self.family == other.family
        )


@dataclass
class DatasetSplit:
    train: List[GraphSample] = field(default_factory=list)
    val: List[GraphSample] = field(default_factory=list)
    test: List[GraphSample] = field(default_factory=list)
    seed: Optional[int] = None
    error: Optional[str] = None

    def split(self, name: str) -> List[GraphSample]:
        if name not in SPLIT_NAMES:
            raise KeyError(f"unknown split {name!r}")
        return getattr(self, name)

    def items(self):
        return [(name, getattr(self, name)) for name in SPLIT_NAMES]

    def __len__(self) -> int:
        return len(self.train) + len(self.val) + len(self.test)

    def family_counts(self) -> Dict[str, Dict[str, int]]:
        return {name: dict(sorted(Counter(s.family or "?" for s in samples).items())) for name, samples in self.items()}

    def is_empty(self) -> bool:
        return len(self) == 0


def make_sample(graph: Graph, x: np.ndarray, task: str, source: int = 0, family: Optional[str] = None) -> GraphSample:
    targets = compute_targets(graph, source)
    if task == "diameter":
        return GraphSample(graph, x, task, y_graph=targets.diameter, source=source, family=family)
    if task == "sssp":
        return GraphSample(graph, x, task, y_node=targets.sssp, source=source, family=family)
    if task == "eccentricity":
        return GraphSample(graph, x, task, y_node=targets.ecc, source=source, family=family)
    raise GraphError(f"unknown task {task!r}")


def build_gpp_dataset(cfg: DatasetConfig) -> DatasetSplit:
    """Generate train/val/test graphs from one seeded generator, in split order."""
    rng = np.random.default_rng(cfg.seed)
    out = DatasetSplit(seed=cfg.seed)
    for name, size in zip(SPLIT_NAMES, cfg.sizes):
        samples = out.split(name)
        for _ in range(size):
            family = cfg.families[int(rng.integers(0, len(cfg.families)))]
            n = int(rng.integers(cfg.n_min, cfg.n_max + 1))
            graph = generate_family(family, n, rng)
            x = rng.random((n, 1))
            samples.append(make_sample(graph, x, cfg.task, source=0, family=family))
    logger.info(f"Generated {len(out)} {cfg.task} graphs (seed={cfg.seed}, sizes={tuple(cfg.sizes)})")
    return out


def barbell_demo(k: int) -> GraphSample:
    """One-hot mass on node 0 of a barbell; the target spreads it uniformly."""
    graph = barbell(k)
    x = np.zeros((graph.n, 1))
    x[0, 0] = 1.0
    y = np.full(graph.n, x.sum() / graph.n)
    return GraphSample(graph, x, "barbell-demo", y_node=y, family="barbell")
