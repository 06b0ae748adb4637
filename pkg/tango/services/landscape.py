"""Energy landscape of a small random model on a single node in R^2."""
from typing import List, Optional, Tuple

import numpy as np

from tango.dynamics.energy import alpha_coeff, energy_terms
from tango.dynamics.step import zero_threshold
from tango.dynamics.tangent import beta_coeff, project_orthogonal, tangent_raw
from tango.graphs.graph import Graph
from tango.models.energy import EnergyModel, TangentModel, init_energy_model, init_tangent_model
from tango.schemas.config import TangoConfig

LANDSCAPE_COLUMNS = (
    "x",
    "y",
    "energy",
    "descent_x",
    "descent_y",
    "tangent_x",
    "tangent_y",
    "total_x",
    "total_y",
    "tangent_grad_inner",
)


def landscape_models(seed: int) -> Tuple[TangoConfig, EnergyModel, TangentModel]:
    cfg = TangoConfig(d=2, L_gnn=1, activation="tanh", L=1)
    rng = np.random.default_rng(seed)
    return cfg, init_energy_model(rng, cfg), init_tangent_model(rng, cfg)


def landscape_grid(
    extent: float,
    resolution: int,
    seed: int = 0,
    models: Optional[Tuple[TangoConfig, EnergyModel, TangentModel]] = None,
) -> List[Tuple[float, ...]]:
    """One row per point of a resolution x resolution grid over [-extent, extent]^2."""
    if extent <= 0 or resolution < 2:
        raise ValueError("extent must be positive and resolution at least 2")
    cfg, em, tm = models or landscape_models(seed)
    g = Graph.from_edges(1, [])
    axis = np.linspace(-extent, extent, resolution)
    rows = []
    for y in axis:
        for x in axis:
            H = np.array([[x, y]])
            terms = energy_terms(em, g, H)
            alpha = alpha_coeff(em, g, terms.intermediate).item()
            M = tangent_raw(tm, g, H)
            beta = beta_coeff(tm, M).item()
            T = project_orthogonal(M, terms.gradient, zero_threshold(cfg, H.shape), cfg.projection).numpy()[0]
            grad = terms.gradient.numpy()[0]
            descent = -alpha * grad
            tangent = beta * T
            total = descent + tangent
            rows.append(
                (
                    float(x),
                    float(y),
                    terms.value.item(),
                    descent[0],
                    descent[1],
                    tangent[0],
                    tangent[1],
                    total[0],
                    total[1],
                    float(T @ grad),
                )
            )
    return rows
