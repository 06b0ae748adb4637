import numpy as np

from tango.autodiff import ops
from tango.autodiff.tensor import Tensor
from tango.errors import ShapeError
from tango.graphs.graph import Graph
from tango.models.energy import TangentModel
from tango.nets.layers import backbone_forward, mlp_forward

PROJECTIONS = ("normalized", "printed")


def tangent_raw(tm: TangentModel, g: Graph, H) -> Tensor:
    """M = sigma(TangentGNN(H))."""
    return ops.activation(tm.backbone.activation, backbone_forward(tm.backbone, g, H))


def project_orthogonal(M, grad, tol: float, mode: str = "normalized") -> Tensor:
    """Remove from M its component along `grad` (Frobenius inner product).

    If ||grad|| <= tol the landscape is treated as flat and M is returned.
    The "printed" mode divides by ||grad|| once instead of twice; it is only
    orthogonal when ||grad|| = 1.
    """
    M = M if isinstance(M, Tensor) else Tensor(M)
    grad = grad if isinstance(grad, Tensor) else Tensor(grad)
    if M.shape != grad.shape:
        raise ShapeError(f"project_orthogonal: {M.shape} vs {grad.shape}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if mode not in PROJECTIONS:
        raise ValueError(f"unknown projection mode {mode!r}")
    if float(np.linalg.norm(grad.data)) <= tol:
        return M
    gg = ops.inner(grad, grad)
    denom = gg if mode == "normalized" else ops.sqrt(gg)
    coef = ops.div(ops.inner(M, grad), denom)
    return ops.sub(M, ops.scalar_mul(coef, grad))


def beta_coeff(tm: TangentModel, M) -> Tensor:
    """MLP_beta(sum_pool(M)), an unconstrained 1x1 tensor."""
    return mlp_forward(tm.beta_head, ops.sum_pool(M))
