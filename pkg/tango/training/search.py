import itertools
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

from tango.errors import ConfigError
from tango.graphs.datasets import DatasetSplit
from tango.schemas.config import GRID_KEYS, TangoConfig, TrainConfig
from tango.training.loop import RunHistory, train

logger = logging.getLogger(__name__)

TANGO_KEYS = {"L", "L_gnn", "d", "epsilon", "activation"}
TRAIN_KEYS = {"lr", "weight_decay", "batch_size"}

# Builds an untrained network for a configuration and a seed
NetworkFactory = Callable[[TangoConfig, int], Any]


@dataclass
class Trial:
    params: Dict[str, Any]
    best_val_loss: float
    best_epoch: int


@dataclass
class GridResult:
    tango: TangoConfig
    train: TrainConfig
    history: RunHistory
    trials: List[Trial] = field(default_factory=list)


def grid_points(grid: Dict[str, List[Any]], budget: Optional[int] = None) -> List[Dict[str, Any]]:
    """Grid points in a fixed order (keys sorted, values as listed), capped at `budget`."""
    if not grid:
        raise ConfigError("hyperparameter grid is empty", key_path="train.grid")
    unknown = sorted(set(grid) - GRID_KEYS)
    if unknown:
        raise ConfigError(f"unsupported grid keys {unknown}", key_path="train.grid")
    keys = sorted(grid)
    for k in keys:
        if not grid[k]:
            raise ConfigError(f"grid entry {k!r} is empty", key_path=f"train.grid.{k}")
    points = (dict(zip(keys, values)) for values in itertools.product(*(grid[k] for k in keys)))
    return list(itertools.islice(points, budget))


def apply_point(tango_cfg: TangoConfig, train_cfg: TrainConfig, point: Dict[str, Any]) -> Tuple[TangoConfig, TrainConfig]:
    t_update = {k: v for k, v in point.items() if k in TANGO_KEYS}
    r_update = {k: v for k, v in point.items() if k in TRAIN_KEYS}
    try:
        t = TangoConfig.model_validate({**tango_cfg.model_dump(), **t_update})
        r = TrainConfig.model_validate({**train_cfg.model_dump(), **r_update})
    except ValueError as e:
        raise ConfigError(f"invalid grid point {point}: {e}", key_path="train.grid") from e
    return t, r


def grid_search(
    tango_cfg: TangoConfig,
    train_cfg: TrainConfig,
    grid: Dict[str, List[Any]],
    data: DatasetSplit,
    make_network: NetworkFactory,
    budget: Optional[int] = None,
    seed: int = 0,
) -> GridResult:
    """Train once per grid point and keep the lowest validation loss."""
    best: Optional[GridResult] = None
    trials: List[Trial] = []
    for point in grid_points(grid, budget):
        t_cfg, r_cfg = apply_point(tango_cfg, train_cfg, point)
        history = train(make_network(t_cfg, seed), data, t_cfg, r_cfg)
        trials.append(Trial(point, history.best_val_loss, history.best_epoch))
        logger.info(f"grid point {point}: best val loss {history.best_val_loss:.6g}")
        if best is None or history.best_val_loss < best.history.best_val_loss:
            best = GridResult(t_cfg, r_cfg, history)
    best.trials = trials
    return best
