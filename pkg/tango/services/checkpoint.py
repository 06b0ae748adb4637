import json
import logging
import os
from typing import Any, Dict, Tuple

import numpy as np
from pydantic import ValidationError

from tango.errors import CheckpointError, ShapeError
from tango.models.networks import GnnNetwork, TangoNetwork, init_gnn_network, init_tango_network
from tango.nets.params import tree_named, tree_unflatten
from tango.schemas.checkpoint import CHECKPOINT_FORMAT, ArrayRecord, CheckpointFile
from tango.schemas.config import ExperimentConfig, parse_experiment_config
from tango.training.forward import Network

logger = logging.getLogger(__name__)


def network_meta(net: Network, in_dim: int) -> Dict[str, Any]:
    meta = {"in_dim": in_dim, "pooled": net.pooled}
    if isinstance(net, GnnNetwork):
        meta["model"] = "gnn"
        meta["gnn_depth"] = net.backbone.depth
    else:
        meta["model"] = "tango"
    return meta


def save_checkpoint(path: str, net: Network, cfg: ExperimentConfig, meta: Dict[str, Any]) -> None:
    arrays = {name: ArrayRecord(shape=list(t.shape), values=t.data.reshape(-1).tolist()) for name, t in tree_named(net)}
    payload = CheckpointFile(format=CHECKPOINT_FORMAT, config=cfg.model_dump(), meta=meta, arrays=arrays)
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(payload.model_dump_json())
    logger.info(f"Saved checkpoint to {path}")


def _template(cfg: ExperimentConfig, meta: Dict[str, Any]) -> Network:
    rng = np.random.default_rng(0)
    if meta.get("model", cfg.model) == "gnn":
        return init_gnn_network(rng, cfg.tango, meta["in_dim"], meta["pooled"], meta["gnn_depth"])
    return init_tango_network(rng, cfg.tango, meta["in_dim"], meta["pooled"])


def load_checkpoint(path: str) -> Tuple[Network, ExperimentConfig, Dict[str, Any]]:
    if not os.path.isfile(path):
        raise CheckpointError(f"checkpoint not found: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        try:
            ckpt = CheckpointFile.model_validate(json.load(fh))
        except (json.JSONDecodeError, ValidationError) as e:
            raise CheckpointError(f"unreadable checkpoint {path}: {e}") from e
    if ckpt.format != CHECKPOINT_FORMAT:
        raise CheckpointError(f"unsupported checkpoint format {ckpt.format!r}")
    cfg = parse_experiment_config(ckpt.config)
    meta = ckpt.meta
    for key in ("in_dim", "pooled"):
        if key not in meta:
            raise CheckpointError(f"checkpoint metadata lacks {key!r}")

    template = _template(cfg, meta)
    names = [name for name, _ in tree_named(template)]
    missing = sorted(set(names) - set(ckpt.arrays))
    extra = sorted(set(ckpt.arrays) - set(names))
    if missing or extra:
        raise CheckpointError(f"checkpoint arrays do not match the model (missing={missing}, unexpected={extra})")

    leaves = []
    for name, t in tree_named(template):
        rec = ckpt.arrays[name]
        values = np.asarray(rec.values, dtype=np.float64)
        if values.size != int(np.prod(rec.shape)):
            raise CheckpointError(f"{name}: {values.size} values for shape {rec.shape}")
        if tuple(rec.shape) != t.shape:
            raise ShapeError(f"{name}: checkpoint shape {tuple(rec.shape)} does not match model shape {t.shape}")
        leaves.append(values.reshape(rec.shape))
    return tree_unflatten(template, leaves), cfg, meta
