import json
import os
from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from tango import config
from tango.errors import ConfigError

Variant = Literal["full", "non-energy", "non-tangent", "descent-only"]
Activation = Literal["relu", "elu", "gelu", "tanh"]
Task = Literal["diameter", "sssp", "eccentricity"]

GRID_KEYS = {"L", "L_gnn", "d", "epsilon", "lr", "weight_decay", "batch_size", "activation"}

FAMILY_NAMES = (
    "erdos-renyi",
    "barabasi-albert",
    "caveman",
    "tree",
    "grid",
    "line",
    "star",
    "caterpillar",
    "lobster",
)

# Hyperparameter grid for the graph property prediction benchmarks
DEFAULT_GPP_GRID: Dict[str, List[Any]] = {
    "L": [1, 5, 10, 20],
    "L_gnn": [1, 2, 4, 8, 16],
    "d": [10, 20, 30],
    "epsilon": [0.001, 0.1, 1.0],
    "lr": [1e-3, 1e-4],
    "weight_decay": [0.0, 1e-6, 1e-5],
    "batch_size": [32, 64, 128],
}


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class TangoConfig(StrictModel):
    L: int = Field(5, ge=1)
    epsilon: float = Field(0.1, gt=0)
    d: int = Field(20, ge=1)
    L_gnn: int = Field(2, ge=1)
    variant: Variant = "full"
    grad_zero_tol: float = Field(1e-12, gt=0)
    activation: Activation = "relu"
    backbone: Literal["gatedgcn", "gcn"] = "gatedgcn"
    projection: Literal["normalized", "printed"] = "normalized"
    mlp_layers: int = Field(2, ge=1)


class TrainConfig(StrictModel):
    max_epochs: int = Field(1500, ge=1)
    patience: int = Field(100, ge=0)
    lr: float = Field(1e-3, ge=0)
    weight_decay: float = Field(0.0, ge=0)
    batch_size: int = Field(32, ge=1)
    seed: int = 0
    metric: Literal["log10_mse", "mae"] = "log10_mse"
    grid: Optional[Dict[str, List[Any]]] = None
    budget: Optional[int] = Field(None, ge=1)
    threads: int = Field(default_factory=lambda: config.DEFAULT_THREADS, ge=1)

    @field_validator("grid")
    @classmethod
    def _grid_keys(cls, grid):
        if grid is None:
            return grid
        unknown = sorted(set(grid) - GRID_KEYS)
        if unknown:
            raise ValueError(f"unsupported grid keys {unknown}")
        for key, values in grid.items():
            if not values:
                raise ValueError(f"grid entry {key!r} is empty")
        return grid

    @model_validator(mode="after")
    def _patience_within_budget(self):
        if self.patience > self.max_epochs:
            raise ValueError("patience must not exceed max_epochs")
        return self


class DatasetConfig(StrictModel):
    task: Task = "diameter"
    sizes: Tuple[int, int, int] = config.GPP_SPLIT_SIZES
    families: List[str] = Field(default_factory=lambda: list(FAMILY_NAMES))
    n_min: int = Field(config.GPP_NODE_RANGE[0], ge=1)
    n_max: int = Field(config.GPP_NODE_RANGE[1], ge=1)
    seed: int = Field(default_factory=lambda: config.DEFAULT_SEED)

    @field_validator("sizes")
    @classmethod
    def _positive_sizes(cls, sizes):
        if any(s < 1 for s in sizes):
            raise ValueError("split sizes must be positive")
        return sizes

    @field_validator("families")
    @classmethod
    def _known_families(cls, families):
        if not families:
            raise ValueError("at least one family is required")
        unknown = sorted(set(families) - set(FAMILY_NAMES))
        if unknown:
            raise ValueError(f"unknown families {unknown}")
        return families

    @model_validator(mode="after")
    def _node_range(self):
        if self.n_min > self.n_max:
            raise ValueError("n_min must not exceed n_max")
        return self


class ExperimentConfig(StrictModel):
    name: str = "tango"
    model: Literal["tango", "gnn"] = "tango"
    dataset_path: Optional[str] = None
    dataset: Optional[DatasetConfig] = None
    tango: TangoConfig = Field(default_factory=TangoConfig)
    train: TrainConfig = Field(default_factory=TrainConfig)
    output_dir: str = Field(default_factory=lambda: config.OUTPUT_DIR)
    seeds: List[int] = Field(default_factory=lambda: [config.DEFAULT_SEED], min_length=1)
    gnn_depth: Optional[int] = Field(None, ge=1)

    @model_validator(mode="after")
    def _one_data_source(self):
        if self.dataset_path is not None and self.dataset is not None:
            raise ValueError("give either dataset_path or dataset, not both")
        return self

    def data_spec(self) -> DatasetConfig:
        return self.dataset or DatasetConfig()


def _key_path(err: ValidationError) -> Optional[str]:
    errors = err.errors()
    if not errors:
        return None
    return ".".join(str(part) for part in errors[0]["loc"]) or None


def _first_message(err: ValidationError) -> str:
    errors = err.errors()
    return errors[0]["msg"] if errors else str(err)


def parse_experiment_config(data: Dict[str, Any]) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(_first_message(e), key_path=_key_path(e)) from e


def load_experiment_config(path: str) -> ExperimentConfig:
    if not os.path.isfile(path):
        raise ConfigError(f"config file not found: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as e:
            raise ConfigError(f"invalid JSON at line {e.lineno}: {e.msg}") from e
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    return parse_experiment_config(data)


def with_overrides(
    cfg: ExperimentConfig,
    seed: Optional[int] = None,
    threads: Optional[int] = None,
    out: Optional[str] = None,
    variant: Optional[str] = None,
    compat_projection: bool = False,
) -> ExperimentConfig:
    """Apply CLI flags and re-validate the result."""
    data = cfg.model_dump()
    if seed is not None:
        data["seeds"] = [seed]
    if threads is not None:
        data["train"]["threads"] = threads
    if out is not None:
        data["output_dir"] = out
    if variant is not None and variant != data["tango"]["variant"]:
        data["tango"]["variant"] = variant
        data["name"] = f"{data['name']}-{variant}"
    if compat_projection:
        data["tango"]["projection"] = "printed"
    return parse_experiment_config(data)
