import csv
import logging
import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple

import numpy as np

from tango.autodiff import ops
from tango.autodiff.tensor import Tensor
from tango.dynamics.energy import alpha_coeff, energy_terms
from tango.dynamics.tangent import beta_coeff, project_orthogonal, tangent_raw
from tango.graphs.graph import Graph
from tango.models.energy import EnergyModel, TangentModel
from tango.schemas.config import TangoConfig

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ("step", "energy", "grad_norm", "alpha", "beta", "tangent_grad_inner")


@dataclass(frozen=True)
class StepTrace:
    """Diagnostics of one step. `grad_norm` and `tangent_grad_inner` refer to
    the descent direction the variant actually used."""

    step_index: int
    energy: float
    grad_norm: float
    alpha: float
    beta: float
    tangent_grad_inner: float
    tangent_norm: float = 0.0

    def row(self) -> Tuple:
        return (self.step_index, self.energy, self.grad_norm, self.alpha, self.beta, self.tangent_grad_inner)


def zero_threshold(cfg: TangoConfig, shape: Tuple[int, int]) -> float:
    return cfg.grad_zero_tol * math.sqrt(shape[0] * shape[1])


def tango_step(
    em: EnergyModel,
    tm: TangentModel,
    g: Graph,
    H,
    cfg: TangoConfig,
    step_index: int = 0,
) -> Tuple[Tensor, StepTrace]:
    """H' = H + eps * (-alpha * D + beta * T).

    D is dV/dH, or H~ for the non-energy variant. T is M projected against D,
    or M itself for the non-tangent variant. The descent-only variant drops
    the tangential term.
    """
    H = H if isinstance(H, Tensor) else Tensor(H)
    terms = energy_terms(em, g, H)
    alpha = alpha_coeff(em, g, terms.intermediate)

    direction = terms.intermediate if cfg.variant == "non-energy" else terms.gradient
    update = ops.neg(ops.scalar_mul(alpha, direction))

    if cfg.variant == "descent-only":
        beta_value, inner, t_norm = 0.0, 0.0, 0.0
    else:
        M = tangent_raw(tm, g, H)
        beta = beta_coeff(tm, M)
        if cfg.variant == "non-tangent":
            T = M
        else:
            T = project_orthogonal(M, direction, zero_threshold(cfg, H.shape), cfg.projection)
        update = ops.add(update, ops.scalar_mul(beta, T))
        beta_value = beta.item()
        inner = float(np.sum(T.data * direction.data))
        t_norm = float(np.linalg.norm(T.data))

    H_next = ops.add(H, ops.scale(update, cfg.epsilon))
    trace = StepTrace(
        step_index=step_index,
        energy=terms.value.item(),
        grad_norm=float(np.linalg.norm(direction.data)),
        alpha=alpha.item(),
        beta=beta_value,
        tangent_grad_inner=inner,
        tangent_norm=t_norm,
    )
    return H_next, trace


def rollout(
    em: EnergyModel,
    tm: TangentModel,
    g: Graph,
    H0,
    cfg: TangoConfig,
    states: Optional[List[Tensor]] = None,
) -> Tuple[Tensor, List[StepTrace]]:
    """Apply `cfg.L` steps. If `states` is given, H^0..H^L are appended to it."""
    H = H0 if isinstance(H0, Tensor) else Tensor(H0)
    if states is not None:
        states.append(H)
    traces: List[StepTrace] = []
    for step in range(cfg.L):
        H, trace = tango_step(em, tm, g, H, cfg, step_index=step)
        traces.append(trace)
        if states is not None:
            states.append(H)
    return H, traces


def write_trajectory_csv(path: str, traces: Iterable[StepTrace]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_COLUMNS)
        for t in traces:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in t.row()])
