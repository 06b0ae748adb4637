from tango.training.losses import METRICS, loss_mse, metric_log10_mse, metric_mae, metric_mse
from tango.training.optim import OptimState, adam_step
from tango.training.forward import Network, final_features, predict, readout
from tango.training.loop import (
    EpochRecord,
    RunHistory,
    batch_loss_and_grads,
    evaluate,
    sample_loss_and_grads,
    seed_report,
    train,
)
from tango.training.search import GridResult, Trial, apply_point, grid_points, grid_search
