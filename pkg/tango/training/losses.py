import math

import numpy as np

from tango import config
from tango.autodiff import ops
from tango.autodiff.tensor import Tensor
from tango.errors import ShapeError


def _pair(pred, target):
    p = pred.data if isinstance(pred, Tensor) else np.asarray(pred, dtype=np.float64)
    t = target.data if isinstance(target, Tensor) else np.asarray(target, dtype=np.float64)
    if p.shape != t.shape:
        raise ShapeError(f"prediction shape {p.shape} does not match target {t.shape}")
    if p.size == 0:
        raise ShapeError("metrics need at least one entry")
    return p, t


def loss_mse(pred: Tensor, target) -> Tensor:
    """Differentiable mean squared error as a 1x1 tensor."""
    t = target if isinstance(target, Tensor) else Tensor(target)
    if pred.shape != t.shape:
        raise ShapeError(f"prediction shape {pred.shape} does not match target {t.shape}")
    if pred.size == 0:
        raise ShapeError("loss needs at least one entry")
    return ops.reduce_mean(ops.square(ops.sub(pred, t)))


def metric_mse(pred, target) -> float:
    p, t = _pair(pred, target)
    return float(np.mean((p - t) ** 2))


def metric_log10_mse(pred, target) -> float:
    mse = metric_mse(pred, target)
    if mse <= 0.0:
        return config.LOG10_MSE_FLOOR
    return max(math.log10(mse), config.LOG10_MSE_FLOOR)


def metric_mae(pred, target) -> float:
    p, t = _pair(pred, target)
    return float(np.mean(np.abs(p - t)))


METRICS = {
    "mse": metric_mse,
    "log10_mse": metric_log10_mse,
    "mae": metric_mae,
}
