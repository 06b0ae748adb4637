import logging
import os
from typing import List, Optional, Tuple

import numpy as np

from tango.dynamics.step import StepTrace
from tango.errors import CheckpointError, ConfigError, ShapeError
from tango.graphs.datasets import DatasetSplit, GraphSample, build_gpp_dataset
from tango.graphs.io import read_dataset
from tango.models.networks import init_gnn_network, init_tango_network, matched_gnn_depth
from tango.schemas.config import ExperimentConfig, TangoConfig
from tango.schemas.report import RunSummary, SeedResult
from tango.services.artifacts import ensure_dir, write_json, write_metrics_csv
from tango.services.checkpoint import load_checkpoint, network_meta, save_checkpoint
from tango.training.forward import Network, final_features
from tango.training.loop import evaluate, seed_report, train
from tango.training.search import grid_search

logger = logging.getLogger(__name__)


def load_split(cfg: ExperimentConfig) -> DatasetSplit:
    if cfg.dataset_path is not None:
        if not os.path.isfile(cfg.dataset_path):
            raise ConfigError(f"dataset file not found: {cfg.dataset_path}", key_path="dataset_path")
        data = read_dataset(cfg.dataset_path)
        if data.error:
            raise ConfigError(data.error, key_path="dataset_path")
        return data
    return build_gpp_dataset(cfg.data_spec())


def task_shape(data: DatasetSplit) -> Tuple[int, bool]:
    """(input channels, pooled readout) shared by every sample."""
    samples = data.train or data.val or data.test
    if not samples:
        raise ConfigError("dataset is empty", key_path="dataset")
    first = samples[0]
    in_dim, pooled = first.x.shape[1], not first.is_node_task
    for _, split in data.items():
        for s in split:
            if s.x.shape[1] != in_dim or s.is_node_task == pooled:
                raise ConfigError("dataset mixes feature widths or task arities", key_path="dataset")
    return in_dim, pooled


def build_network(cfg: ExperimentConfig, tango_cfg: TangoConfig, seed: int, in_dim: int, pooled: bool) -> Network:
    rng = np.random.default_rng(seed)
    if cfg.model == "gnn":
        depth = cfg.gnn_depth or matched_gnn_depth(tango_cfg, in_dim)
        return init_gnn_network(rng, tango_cfg, in_dim, pooled, depth)
    return init_tango_network(rng, tango_cfg, in_dim, pooled)


def run_experiment(cfg: ExperimentConfig, data: Optional[DatasetSplit] = None) -> RunSummary:
    """Train one network per seed, write per-seed artifacts and the summary."""
    out_dir = ensure_dir(os.path.join(cfg.output_dir, cfg.name))
    data = data if data is not None else load_split(cfg)
    in_dim, pooled = task_shape(data)
    metric = cfg.train.metric

    results = []
    for seed in cfg.seeds:
        train_cfg = cfg.train.model_copy(update={"seed": seed})
        if cfg.train.grid:
            found = grid_search(
                cfg.tango,
                train_cfg,
                cfg.train.grid,
                data,
                lambda t_cfg, s: build_network(cfg, t_cfg, s, in_dim, pooled),
                budget=cfg.train.budget,
                seed=seed,
            )
            history, tango_cfg = found.history, found.tango
            train_cfg = found.train
        else:
            tango_cfg = cfg.tango
            history = train(build_network(cfg, tango_cfg, seed, in_dim, pooled), data, tango_cfg, train_cfg)

        chosen = cfg.model_copy(update={"tango": tango_cfg, "train": train_cfg, "seeds": [seed]})
        ckpt_path = os.path.join(out_dir, f"checkpoint_seed{seed}.json")
        save_checkpoint(ckpt_path, history.best_params, chosen, network_meta(history.best_params, in_dim))
        write_metrics_csv(os.path.join(out_dir, f"metrics_seed{seed}.csv"), history.records())

        test_metric = history.test_metric
        if test_metric is None:
            test_metric = evaluate(history.best_params, data.val or data.train, tango_cfg, metric)
        results.append(
            SeedResult(
                seed=seed,
                test_metric=test_metric,
                best_epoch=history.best_epoch,
                best_val_loss=history.best_val_loss,
                checkpoint=ckpt_path,
                config=tango_cfg.model_dump() if cfg.train.grid else None,
            )
        )
        logger.info(f"seed {seed}: test {metric}={test_metric:.6g} (best epoch {history.best_epoch})")

    mean, std = seed_report([r.test_metric for r in results])
    summary = RunSummary(
        name=cfg.name,
        model=cfg.model,
        variant=cfg.tango.variant,
        metric=metric,
        config=cfg.model_dump(),
        seeds=results,
        test_metric_mean=mean,
        test_metric_std=std,
        best_epoch=[r.best_epoch for r in results],
    )
    write_json(os.path.join(out_dir, "summary.json"), summary)
    return summary


def checkpoint_and_split(checkpoint: str, dataset: Optional[str], split: str) -> Tuple[Network, ExperimentConfig, List[GraphSample]]:
    """Load a saved network with one split of a compatible dataset.

    Without `dataset` the data source recorded in the checkpoint's config is used.
    """
    net, cfg, meta = load_checkpoint(checkpoint)
    if dataset is not None:
        if not os.path.isfile(dataset):
            raise ConfigError(f"dataset file not found: {dataset}", key_path="dataset")
        data = read_dataset(dataset)
    else:
        data = load_split(cfg)
    samples = data.split(split)
    if not samples:
        raise ConfigError(f"split {split!r} is empty", key_path="split")
    in_dim, pooled = task_shape(data)
    if in_dim != meta["in_dim"]:
        raise ShapeError(f"checkpoint expects {meta['in_dim']} input channels, dataset has {in_dim}")
    if pooled != meta["pooled"]:
        raise CheckpointError("checkpoint and dataset disagree on graph-level vs node-level targets")
    return net, cfg, samples


def evaluate_checkpoint(checkpoint: str, dataset: Optional[str], metric: str, split: str = "test") -> float:
    """Metric of a saved network on one split of a dataset file."""
    net, cfg, samples = checkpoint_and_split(checkpoint, dataset, split)
    return evaluate(net, samples, cfg.tango, metric)


def checkpoint_trajectory(checkpoint: str, dataset: Optional[str], split: str = "test", index: int = 0) -> List[StepTrace]:
    """Per-step diagnostics of a saved TANGO network on one sample."""
    net, cfg, samples = checkpoint_and_split(checkpoint, dataset, split)
    if cfg.model != "tango":
        raise CheckpointError("trajectories are only defined for tango checkpoints")
    if not 0 <= index < len(samples):
        raise ConfigError(f"sample index {index} out of range for split {split!r} ({len(samples)} samples)", key_path="index")
    traces: List[StepTrace] = []
    final_features(net, samples[index], cfg.tango, traces=traces)
    return traces
