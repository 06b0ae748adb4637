from dataclasses import dataclass

import numpy as np

from tango.errors import ShapeError
from tango.nets.params import BackboneParams, MlpParams, init_backbone, init_mlp, mlp_dims
from tango.schemas.config import TangoConfig


@dataclass
class EnergyModel:
    """EnergyGNN with the per-node score head and the alpha head."""

    backbone: BackboneParams
    head: MlpParams
    alpha_head: MlpParams

    def __post_init__(self):
        if self.head.out_dim != 1 or self.alpha_head.out_dim != 1:
            raise ShapeError("energy and alpha heads must have output width 1")

    @property
    def width(self) -> int:
        return self.backbone.width


@dataclass
class TangentModel:
    """TangentGNN with the beta head."""

    backbone: BackboneParams
    beta_head: MlpParams

    def __post_init__(self):
        if self.beta_head.out_dim != 1:
            raise ShapeError("beta head must have output width 1")

    @property
    def width(self) -> int:
        return self.backbone.width


def init_energy_model(rng: np.random.Generator, cfg: TangoConfig) -> EnergyModel:
    d = cfg.d
    backbone = init_backbone(rng, d, cfg.L_gnn, cfg.backbone, cfg.activation)
    head = init_mlp(rng, mlp_dims(d, d, 1, cfg.mlp_layers), cfg.activation)
    alpha_head = init_mlp(rng, mlp_dims(d, d, 1, cfg.mlp_layers), cfg.activation)
    return EnergyModel(backbone, head, alpha_head)


def init_tangent_model(rng: np.random.Generator, cfg: TangoConfig) -> TangentModel:
    d = cfg.d
    backbone = init_backbone(rng, d, cfg.L_gnn, cfg.backbone, cfg.activation)
    beta_head = init_mlp(rng, mlp_dims(d, d, 1, cfg.mlp_layers), cfg.activation)
    return TangentModel(backbone, beta_head)
