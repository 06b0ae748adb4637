import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from tango.autodiff.engine import grad
from tango.autodiff.tape import Tape
from tango.errors import ConfigError, DivergenceError, NonFiniteError
from tango.graphs.datasets import DatasetSplit, GraphSample
from tango.nets.params import bind, tree_leaves
from tango.schemas.config import TangoConfig, TrainConfig
from tango.training.forward import Network, predict
from tango.training.losses import METRICS, loss_mse
from tango.training.optim import OptimState, adam_step

logger = logging.getLogger(__name__)


@dataclass
class EpochRecord:
    epoch: int
    train_loss: float
    val_loss: float
    val_metric: float


@dataclass
class RunHistory:
    """Per-epoch curves of one training run. Epochs are numbered from 1."""

    train_losses: List[float] = field(default_factory=list)
    val_losses: List[float] = field(default_factory=list)
    val_metrics: List[float] = field(default_factory=list)
    best_epoch: int = 0
    best_val_loss: float = math.inf
    best_params: Optional[Network] = None
    test_metric: Optional[float] = None

    @property
    def epochs_run(self) -> int:
        return len(self.val_losses)

    def records(self) -> List[EpochRecord]:
        return [
            EpochRecord(i + 1, t, v, m)
            for i, (t, v, m) in enumerate(zip(self.train_losses, self.val_losses, self.val_metrics))
        ]


def sample_loss_and_grads(net: Network, sample: GraphSample, cfg: TangoConfig) -> Tuple[float, List[np.ndarray]]:
    """Loss of one graph and its parameter gradients, on a private tape."""
    tape = Tape()
    bound = bind(net, tape)
    leaves = tree_leaves(bound)
    loss = loss_mse(predict(bound, sample, cfg), sample.target())
    grads = grad(loss, leaves)
    return loss.item(), [g.numpy() for g in grads]


def batch_loss_and_grads(
    net: Network,
    batch: Sequence[GraphSample],
    cfg: TangoConfig,
    pool: Optional[ThreadPoolExecutor] = None,
) -> Tuple[float, List[np.ndarray]]:
    """Mean per-graph loss and mean gradient; the reduction runs in batch order."""
    if pool is None:
        results = [sample_loss_and_grads(net, s, cfg) for s in batch]
    else:
        results = list(pool.map(lambda s: sample_loss_and_grads(net, s, cfg), batch))
    loss = sum(r[0] for r in results) / len(results)
    grads = [np.zeros_like(g) for g in results[0][1]]
    for _, sample_grads in results:
        for acc, g in zip(grads, sample_grads):
            acc += g
    return loss, [g / len(results) for g in grads]


def predictions(net: Network, samples: Sequence[GraphSample], cfg: TangoConfig, pool: Optional[ThreadPoolExecutor] = None):
    if pool is None:
        outs = [predict(net, s, cfg).numpy() for s in samples]
    else:
        outs = list(pool.map(lambda s: predict(net, s, cfg).numpy(), samples))
    preds = np.vstack(outs)
    targets = np.vstack([s.target() for s in samples])
    return preds, targets


def evaluate(
    net: Network,
    samples: Sequence[GraphSample],
    cfg: TangoConfig,
    metric: str = "log10_mse",
    pool: Optional[ThreadPoolExecutor] = None,
) -> float:
    """Metric pooled over every target entry of `samples`."""
    if metric not in METRICS:
        raise ConfigError(f"unknown metric {metric!r}", key_path="train.metric")
    if not samples:
        raise ValueError("cannot evaluate an empty split")
    preds, targets = predictions(net, samples, cfg, pool)
    return METRICS[metric](preds, targets)


def seed_report(values: Sequence[float]) -> Tuple[float, float]:
    arr = np.asarray(values, dtype=np.float64)
    return float(arr.mean()), float(arr.std())


def train(
    net: Network,
    data: DatasetSplit,
    tango_cfg: TangoConfig,
    train_cfg: TrainConfig,
    on_epoch: Optional[Callable[[EpochRecord], None]] = None,
) -> RunHistory:
    """Mini-batch Adam with early stopping on the validation MSE.

    Training stops once `patience` epochs in a row fail to improve on the
    best validation loss. The best parameters are kept in the history and
    the test metric is computed with them when a test split exists.
    """
    if not data.train:
        raise ConfigError("training split is empty", key_path="dataset")
    val = data.val
    if not val:
        logger.warning("No validation split, selecting on the training split")
        val = data.train

    rng = np.random.default_rng(train_cfg.seed)
    state = OptimState.for_params(net)
    params = net
    history = RunHistory(best_params=net)
    since_best = 0
    pool = ThreadPoolExecutor(max_workers=train_cfg.threads) if train_cfg.threads > 1 else None

    try:
        for epoch in range(1, train_cfg.max_epochs + 1):
            order = rng.permutation(len(data.train))
            total, seen = 0.0, 0
            for start in range(0, len(order), train_cfg.batch_size):
                batch = [data.train[i] for i in order[start:start + train_cfg.batch_size]]
                try:
                    loss, grads = batch_loss_and_grads(params, batch, tango_cfg, pool)
                except NonFiniteError as e:
                    raise DivergenceError(epoch, str(e)) from e
                if not math.isfinite(loss):
                    raise DivergenceError(epoch)
                params = adam_step(params, grads, state, train_cfg.lr, train_cfg.weight_decay)
                total += loss * len(batch)
                seen += len(batch)

            try:
                val_loss = evaluate(params, val, tango_cfg, "mse", pool)
                val_metric = evaluate(params, val, tango_cfg, train_cfg.metric, pool)
            except NonFiniteError as e:
                raise DivergenceError(epoch, str(e)) from e

            record = EpochRecord(epoch, total / seen, val_loss, val_metric)
            history.train_losses.append(record.train_loss)
            history.val_losses.append(val_loss)
            history.val_metrics.append(val_metric)
            if val_loss < history.best_val_loss:
                history.best_val_loss = val_loss
                history.best_epoch = epoch
                history.best_params = params
                since_best = 0
            else:
                since_best += 1
            logger.info(
                f"epoch {epoch}: train_loss={record.train_loss:.6g} val_loss={val_loss:.6g} "
                f"val_{train_cfg.metric}={val_metric:.6g}"
            )
            if on_epoch is not None:
                on_epoch(record)
            if since_best > train_cfg.patience:
                logger.info(f"Early stop at epoch {epoch}, best epoch {history.best_epoch}")
                break

        if data.test:
            history.test_metric = evaluate(history.best_params, data.test, tango_cfg, train_cfg.metric, pool)
    finally:
        if pool is not None:
            pool.shutdown()
    return history
