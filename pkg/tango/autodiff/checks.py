"""Numerical oracles for the autodiff engine."""
from __future__ import annotations

from typing import Callable

import numpy as np

from tango.autodiff import ops
from tango.autodiff.engine import grad
from tango.autodiff.tape import Tape
from tango.autodiff.tensor import Tensor, as_matrix
from tango.errors import ShapeError

ScalarFn = Callable[[Tensor], Tensor]


def _value(out) -> float:
    if isinstance(out, Tensor):
        return out.item()
    return float(out)


def numerical_gradient(f: ScalarFn, x, h: float = 1e-5) -> np.ndarray:
    """Central differences of `f` around `x`, one component at a time."""
    x = as_matrix(x)
    g = np.zeros(x.shape)
    for idx in np.ndindex(x.shape):
        xp = x.copy()
        xm = x.copy()
        xp[idx] += h
        xm[idx] -= h
        g[idx] = (_value(f(Tensor(xp))) - _value(f(Tensor(xm)))) / (2.0 * h)
    return g


def analytic_gradient(f: ScalarFn, x) -> np.ndarray:
    tape = Tape()
    xt = tape.leaf(x)
    out = f(xt)
    if not isinstance(out, Tensor) or not out.on_tape:
        return np.zeros(xt.shape)
    (g,) = grad(out, [xt])
    return g.numpy()


def finite_diff_check(f: ScalarFn, x, h: float = 1e-5) -> float:
    """Worst componentwise |g_ad - g_fd| / max(1, |g_fd|)."""
    if h <= 0:
        raise ValueError("finite difference step h must be positive")
    g_ad = analytic_gradient(f, x)
    g_fd = numerical_gradient(f, x, h)
    if g_ad.size == 0:
        return 0.0
    return float(np.max(np.abs(g_ad - g_fd) / np.maximum(1.0, np.abs(g_fd))))


def hessian_vector_product(f: ScalarFn, x, v) -> np.ndarray:
    """(d^2 f)(x) v via a differentiable backward followed by a second one."""
    tape = Tape()
    xt = tape.leaf(x)
    v = as_matrix(v)
    if v.shape != xt.shape:
        raise ShapeError(f"direction shape {v.shape} does not match point shape {xt.shape}")
    y = f(xt)
    if not isinstance(y, Tensor):
        y = Tensor(y)
    if y.size != 1:
        raise ShapeError(f"function must be scalar-valued, got shape {y.shape}")
    if not y.on_tape:
        return np.zeros(xt.shape)
    (g,) = grad(y, [xt], create_graph=True)
    s = ops.inner(g, v)
    if not s.on_tape:
        return np.zeros(xt.shape)
    (hv,) = grad(s, [xt])
    return hv.numpy()
