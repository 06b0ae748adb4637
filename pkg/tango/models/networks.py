from dataclasses import dataclass

import numpy as np

from tango.models.energy import EnergyModel, TangentModel, init_energy_model, init_tangent_model
from tango.nets.params import (
    BackboneParams,
    MlpParams,
    count_params,
    init_backbone,
    init_mlp,
    mlp_dims,
)
from tango.schemas.config import TangoConfig


@dataclass
class TangoNetwork:
    """Input encoder, the TANGO dynamics and a readout head.

    `pooled` selects a graph-level readout on the summed final features;
    otherwise the readout runs per node.
    """

    encoder: MlpParams
    energy: EnergyModel
    tangent: TangentModel
    readout: MlpParams
    pooled: bool = False


@dataclass
class GnnNetwork:
    """Residual message-passing baseline with the same encoder and readout shapes."""

    backbone: BackboneParams
    readout: MlpParams
    pooled: bool = False


def init_tango_network(rng: np.random.Generator, cfg: TangoConfig, in_dim: int, pooled: bool) -> TangoNetwork:
    encoder = init_mlp(rng, [in_dim, cfg.d], cfg.activation)
    energy = init_energy_model(rng, cfg)
    tangent = init_tangent_model(rng, cfg)
    readout = init_mlp(rng, mlp_dims(cfg.d, cfg.d, 1, cfg.mlp_layers), cfg.activation)
    return TangoNetwork(encoder, energy, tangent, readout, pooled)


def init_gnn_network(rng: np.random.Generator, cfg: TangoConfig, in_dim: int, pooled: bool, depth: int) -> GnnNetwork:
    backbone = init_backbone(rng, cfg.d, depth, cfg.backbone, cfg.activation, in_dim=in_dim)
    readout = init_mlp(rng, mlp_dims(cfg.d, cfg.d, 1, cfg.mlp_layers), cfg.activation)
    return GnnNetwork(backbone, readout, pooled)


def layer_param_count(kind: str, d: int) -> int:
    return d * d + d if kind == "gcn" else 4 * d * d + 2 * d


def matched_gnn_depth(cfg: TangoConfig, in_dim: int = 1) -> int:
    """Baseline depth whose parameter count is closest to the TANGO network's."""
    target = count_params(init_tango_network(np.random.default_rng(0), cfg, in_dim, pooled=False))
    fixed = count_params(init_gnn_network(np.random.default_rng(0), cfg, in_dim, False, 1))
    per_layer = layer_param_count(cfg.backbone, cfg.d)
    fixed -= per_layer
    return max(1, int(round((target - fixed) / per_layer)))
