import functools
import logging
from typing import Tuple

import numpy as np

from tango.graphs.graph import Graph, laplacian_apply, laplacian_max_eigenvalue

logger = logging.getLogger(__name__)


@functools.lru_cache(maxsize=128)
def _lambda_max(g: Graph) -> float:
    return laplacian_max_eigenvalue(g)


def dirichlet_stable_step(g: Graph) -> float:
    """2 / lambda_max estimate; steps at or above it are unstable."""
    lam = _lambda_max(g)
    return float("inf") if lam <= 0 else 2.0 / lam


def dirichlet_flow_step(g: Graph, H, eps: float) -> np.ndarray:
    """H - eps * L H."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    bound = dirichlet_stable_step(g)
    if eps >= bound:
        logger.warning(f"Dirichlet step eps={eps} is at or above the stability bound {bound:.4g}")
    H = np.asarray(H, dtype=np.float64)
    return H - eps * laplacian_apply(g, H)


def newton_decomposition(grad, N) -> Tuple[float, np.ndarray]:
    """Split N into alpha* grad + T* with T* orthogonal to grad."""
    grad = np.asarray(grad, dtype=np.float64)
    N = np.asarray(N, dtype=np.float64)
    if grad.shape != N.shape:
        raise ValueError(f"shape mismatch {grad.shape} vs {N.shape}")
    gg = float(np.sum(grad * grad))
    if gg == 0.0:
        raise ValueError("newton_decomposition needs a nonzero gradient")
    alpha = float(np.sum(N * grad)) / gg
    return alpha, N - alpha * grad
