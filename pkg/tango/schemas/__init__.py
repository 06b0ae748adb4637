from tango.schemas.config import (
    DatasetConfig,
    ExperimentConfig,
    TangoConfig,
    TrainConfig,
    load_experiment_config,
    parse_experiment_config,
    with_overrides,
)
from tango.schemas.dataset import DatasetMeta, GraphRecord
from tango.schemas.report import CheckResult, RunSummary, SeedResult, VerifyReport
from tango.schemas.checkpoint import CHECKPOINT_FORMAT, ArrayRecord, CheckpointFile
