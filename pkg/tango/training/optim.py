from dataclasses import dataclass, field
from typing import Any, List, Sequence

import numpy as np

from tango.errors import ShapeError
from tango.nets.params import tree_leaves, tree_unflatten

BETA1 = 0.9
BETA2 = 0.999
ADAM_EPS = 1e-8


@dataclass
class OptimState:
    m: List[np.ndarray] = field(default_factory=list)
    v: List[np.ndarray] = field(default_factory=list)
    step: int = 0

    @classmethod
    def for_params(cls, params: Any) -> "OptimState":
        leaves = tree_leaves(params)
        return cls([np.zeros(t.shape) for t in leaves], [np.zeros(t.shape) for t in leaves], 0)


def adam_step(params: Any, grads: Sequence[np.ndarray], st: OptimState, lr: float, wd: float = 0.0) -> Any:
    """One bias-corrected Adam update; weight decay is decoupled (AdamW).

    `grads` follow the tree order of `params`. The moments in `st` are
    updated in place and a new parameter tree is returned.
    """
    leaves = tree_leaves(params)
    if len(grads) != len(leaves) or len(st.m) != len(leaves):
        raise ShapeError(f"{len(leaves)} parameters, {len(grads)} gradients, {len(st.m)} moment slots")

    st.step += 1
    bc1 = 1.0 - BETA1 ** st.step
    bc2 = 1.0 - BETA2 ** st.step

    updated = []
    for i, (p, g) in enumerate(zip(leaves, grads)):
        g = np.asarray(g, dtype=np.float64)
        if g.shape != p.shape:
            raise ShapeError(f"gradient {i} has shape {g.shape}, parameter has {p.shape}")
        st.m[i] = BETA1 * st.m[i] + (1.0 - BETA1) * g
        st.v[i] = BETA2 * st.v[i] + (1.0 - BETA2) * (g * g)
        m_hat = st.m[i] / bc1
        v_hat = st.v[i] / bc2
        new = p.data - lr * m_hat / (np.sqrt(v_hat) + ADAM_EPS)
        if wd > 0:
            new = new - lr * wd * p.data
        updated.append(new)
    return tree_unflatten(params, updated)
