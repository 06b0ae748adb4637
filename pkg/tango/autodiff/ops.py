"""Op registry: forward kernels on float64 matrices and their vector-Jacobian
products.

Every VJP rule is written with the public op functions below, so running a
rule on tape-bound tensors records the backward computation itself. That is
what makes `backward(..., create_graph=True)` differentiable again.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from tango.autodiff.tensor import Tensor
from tango.errors import NonFiniteError, ShapeError, TapeError, UnknownOpError

Forward = Callable[[List[np.ndarray], Mapping[str, Any]], np.ndarray]
Vjp = Callable[[Tensor, List[Tensor], Tensor, Mapping[str, Any]], List[Optional[Tensor]]]

GELU_K = math.sqrt(2.0 / math.pi)
GELU_C = 0.044715


@dataclass(frozen=True)
class OpDef:
    kind: str
    forward: Forward
    vjp: Vjp


_REGISTRY: Dict[str, OpDef] = {}


def register(kind: str, forward: Forward, vjp: Vjp) -> None:
    _REGISTRY[kind] = OpDef(kind, forward, vjp)


def get_op(kind: str) -> OpDef:
    try:
        return _REGISTRY[kind]
    except KeyError:
        raise UnknownOpError(f"unknown op kind {kind!r}; registered: {', '.join(op_kinds())}") from None


def op_kinds() -> List[str]:
    return sorted(_REGISTRY)


def _as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def record(kind: str, inputs: Sequence, attrs: Optional[Mapping[str, Any]] = None) -> Tensor:
    """Evaluate op `kind` on `inputs` and append it to their tape, if any.

    Inputs that are not on a tape are recorded as constants of the tape the
    other inputs live on. With no tape-bound input the op runs eagerly.
    """
    op = get_op(kind)
    attrs = dict(attrs or {})
    tensors = [_as_tensor(x) for x in inputs]

    tape = None
    for t in tensors:
        if t.tape is None:
            continue
        if tape is None:
            tape = t.tape
        elif t.tape is not tape:
            raise TapeError(f"{kind}: inputs are recorded on different tapes")

    out = op.forward([t.data for t in tensors], attrs)
    if not np.isfinite(out).all():
        raise NonFiniteError(f"{kind} produced non-finite values")
    if tape is None:
        return Tensor._wrap(out)
    ids = tuple(t.node_id if t.tape is tape else tape.const(t).node_id for t in tensors)
    return tape.record(kind, ids, attrs, out)


def _expect(cond: bool, message: str) -> None:
    if not cond:
        raise ShapeError(message)


def _same_shape(kind: str, a: np.ndarray, b: np.ndarray) -> None:
    _expect(a.shape == b.shape, f"{kind}: shape mismatch {a.shape} vs {b.shape}")


def _index(attrs: Mapping[str, Any], key: str) -> np.ndarray:
    return np.asarray(attrs[key], dtype=np.int64)


# ---------------- public op functions ----------------

def matmul(a, b) -> Tensor:
    return record("matmul", [a, b])


def add(a, b) -> Tensor:
    return record("add", [a, b])


def sub(a, b) -> Tensor:
    return record("sub", [a, b])


def mul(a, b) -> Tensor:
    return record("mul", [a, b])


def div(a, b) -> Tensor:
    return record("div", [a, b])


def neg(a) -> Tensor:
    return record("neg", [a])


def scale(a, c: float) -> Tensor:
    return record("scale", [a], {"c": float(c)})


def shift(a, c: float) -> Tensor:
    return record("shift", [a], {"c": float(c)})


def relu(a) -> Tensor:
    return record("relu", [a])


def elu(a) -> Tensor:
    return record("elu", [a])


def gelu(a) -> Tensor:
    return record("gelu", [a])


def tanh(a) -> Tensor:
    return record("tanh", [a])


def sigmoid(a) -> Tensor:
    return record("sigmoid", [a])


def square(a) -> Tensor:
    return record("square", [a])


def sqrt(a) -> Tensor:
    return record("sqrt", [a])


def reduce_sum(a) -> Tensor:
    return record("sum", [a])


def reduce_mean(a) -> Tensor:
    return record("mean", [a])


def expand(a, shape: Tuple[int, int]) -> Tensor:
    return record("expand", [a], {"shape": (int(shape[0]), int(shape[1]))})


def sum_pool(a) -> Tensor:
    return record("sum_pool", [a])


def broadcast_row(a, n: int) -> Tensor:
    return record("broadcast_row", [a], {"n": int(n)})


def gather(a, index) -> Tensor:
    return record("gather", [a], {"index": np.asarray(index, dtype=np.int64)})


def scatter_rows(a, index, n: int) -> Tensor:
    return record("scatter_rows", [a], {"index": np.asarray(index, dtype=np.int64), "n": int(n)})


def scatter_add_edges(a, senders, receivers, n: int, weights=None) -> Tensor:
    attrs = {
        "senders": np.asarray(senders, dtype=np.int64),
        "receivers": np.asarray(receivers, dtype=np.int64),
        "n": int(n),
        "weights": None if weights is None else np.asarray(weights, dtype=np.float64),
    }
    return record("scatter_add_edges", [a], attrs)


def transpose(a) -> Tensor:
    return record("transpose", [a])


def concat(tensors: Sequence, axis: int = 1) -> Tensor:
    return record("concat", list(tensors), {"axis": int(axis)})


def slice_(a, axis: int, start: int, stop: int) -> Tensor:
    return record("slice", [a], {"axis": int(axis), "start": int(start), "stop": int(stop)})


def pad(a, axis: int, start: int, total: int) -> Tensor:
    return record("pad", [a], {"axis": int(axis), "start": int(start), "total": int(total)})


# ---------------- composites ----------------

def inner(a, b) -> Tensor:
    """Frobenius inner product as a 1x1 tensor."""
    return reduce_sum(mul(a, b))


def scalar_mul(s, x) -> Tensor:
    """Multiply every entry of `x` by the 1-element tensor `s`."""
    x = _as_tensor(x)
    return mul(expand(s, x.shape), x)


def add_bias(x, b) -> Tensor:
    x = _as_tensor(x)
    return add(x, broadcast_row(b, x.shape[0]))


ACTIVATIONS = {
    "relu": relu,
    "elu": elu,
    "gelu": gelu,
    "tanh": tanh,
    "sigmoid": sigmoid,
}


def activation(name: str, x) -> Tensor:
    try:
        fn = ACTIVATIONS[name]
    except KeyError:
        raise UnknownOpError(f"unknown activation {name!r}") from None
    return fn(x)


# ---------------- kernels ----------------

def _matmul_fwd(xs, attrs):
    a, b = xs
    _expect(a.shape[1] == b.shape[0], f"matmul: cannot multiply {a.shape} by {b.shape}")
    return a @ b


def _matmul_vjp(g, xs, out, attrs):
    a, b = xs
    return [matmul(g, transpose(b)), matmul(transpose(a), g)]


register("matmul", _matmul_fwd, _matmul_vjp)


def _add_fwd(xs, attrs):
    _same_shape("add", *xs)
    return xs[0] + xs[1]


register("add", _add_fwd, lambda g, xs, out, attrs: [g, g])


def _sub_fwd(xs, attrs):
    _same_shape("sub", *xs)
    return xs[0] - xs[1]


register("sub", _sub_fwd, lambda g, xs, out, attrs: [g, neg(g)])


def _mul_fwd(xs, attrs):
    _same_shape("mul", *xs)
    return xs[0] * xs[1]


register("mul", _mul_fwd, lambda g, xs, out, attrs: [mul(g, xs[1]), mul(g, xs[0])])


def _div_fwd(xs, attrs):
    _same_shape("div", *xs)
    return xs[0] / xs[1]


def _div_vjp(g, xs, out, attrs):
    a, b = xs
    return [div(g, b), neg(div(mul(g, out), b))]


register("div", _div_fwd, _div_vjp)

register("neg", lambda xs, attrs: -xs[0], lambda g, xs, out, attrs: [neg(g)])
register("scale", lambda xs, attrs: xs[0] * attrs["c"], lambda g, xs, out, attrs: [scale(g, attrs["c"])])
register("shift", lambda xs, attrs: xs[0] + attrs["c"], lambda g, xs, out, attrs: [g])


def _relu_vjp(g, xs, out, attrs):
    return [mul(g, (xs[0].data > 0).astype(np.float64))]


register("relu", lambda xs, attrs: np.maximum(xs[0], 0.0), _relu_vjp)


def _elu_fwd(xs, attrs):
    a = xs[0]
    return np.where(a > 0, a, np.expm1(np.minimum(a, 0.0)))


def _elu_vjp(g, xs, out, attrs):
    # elu'(a) = 1 for a > 0, elu(a) + 1 otherwise
    pos = (xs[0].data > 0).astype(np.float64)
    return [add(mul(g, pos), mul(mul(g, 1.0 - pos), shift(out, 1.0)))]


register("elu", _elu_fwd, _elu_vjp)


def _gelu_fwd(xs, attrs):
    a = xs[0]
    return 0.5 * a * (1.0 + np.tanh(GELU_K * (a + GELU_C * a ** 3)))


def _gelu_vjp(g, xs, out, attrs):
    a = xs[0]
    a2 = square(a)
    t = tanh(scale(add(a, scale(mul(a2, a), GELU_C)), GELU_K))
    first = scale(shift(t, 1.0), 0.5)
    sech2 = shift(neg(square(t)), 1.0)
    second = mul(scale(a, 0.5 * GELU_K), mul(sech2, shift(scale(a2, 3.0 * GELU_C), 1.0)))
    return [mul(g, add(first, second))]


register("gelu", _gelu_fwd, _gelu_vjp)

register(
    "tanh",
    lambda xs, attrs: np.tanh(xs[0]),
    lambda g, xs, out, attrs: [mul(g, shift(neg(square(out)), 1.0))],
)


def _sigmoid_fwd(xs, attrs):
    a = xs[0]
    out = np.empty_like(a)
    pos = a >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-a[pos]))
    e = np.exp(a[~pos])
    out[~pos] = e / (1.0 + e)
    return out


register(
    "sigmoid",
    _sigmoid_fwd,
    lambda g, xs, out, attrs: [mul(g, mul(out, shift(neg(out), 1.0)))],
)

register("square", lambda xs, attrs: xs[0] * xs[0], lambda g, xs, out, attrs: [mul(g, scale(xs[0], 2.0))])


def _sqrt_fwd(xs, attrs):
    _expect(bool((xs[0] >= 0).all()), "sqrt: negative input")
    return np.sqrt(xs[0])


register("sqrt", _sqrt_fwd, lambda g, xs, out, attrs: [div(scale(g, 0.5), out)])

register(
    "sum",
    lambda xs, attrs: np.array([[xs[0].sum()]]),
    lambda g, xs, out, attrs: [expand(g, xs[0].shape)],
)
register(
    "mean",
    lambda xs, attrs: np.array([[xs[0].sum() / xs[0].size]]),
    lambda g, xs, out, attrs: [scale(expand(g, xs[0].shape), 1.0 / xs[0].size)],
)


def _expand_fwd(xs, attrs):
    a = xs[0]
    _expect(a.shape == (1, 1), f"expand: needs a 1x1 input, got {a.shape}")
    return np.full(attrs["shape"], a[0, 0])


register("expand", _expand_fwd, lambda g, xs, out, attrs: [reduce_sum(g)])


def _sum_pool_fwd(xs, attrs):
    _expect(xs[0].shape[0] >= 1, "sum_pool: needs at least one row")
    return xs[0].sum(axis=0, keepdims=True)


register("sum_pool", _sum_pool_fwd, lambda g, xs, out, attrs: [broadcast_row(g, xs[0].shape[0])])


def _broadcast_row_fwd(xs, attrs):
    a = xs[0]
    _expect(a.shape[0] == 1, f"broadcast_row: needs a single row, got {a.shape}")
    return np.repeat(a, attrs["n"], axis=0)


register("broadcast_row", _broadcast_row_fwd, lambda g, xs, out, attrs: [sum_pool(g)])


def _gather_fwd(xs, attrs):
    a = xs[0]
    index = _index(attrs, "index")
    if index.size:
        _expect(index.min() >= 0 and index.max() < a.shape[0], "gather: index out of range")
    return a[index]


register(
    "gather",
    _gather_fwd,
    lambda g, xs, out, attrs: [scatter_rows(g, attrs["index"], xs[0].shape[0])],
)


def _scatter_rows_fwd(xs, attrs):
    a = xs[0]
    index = _index(attrs, "index")
    n = attrs["n"]
    _expect(a.shape[0] == index.size, f"scatter_rows: {a.shape[0]} rows for {index.size} indices")
    if index.size:
        _expect(index.min() >= 0 and index.max() < n, "scatter_rows: index out of range")
    out = np.zeros((n, a.shape[1]))
    np.add.at(out, index, a)
    return out


register("scatter_rows", _scatter_rows_fwd, lambda g, xs, out, attrs: [gather(g, attrs["index"])])


def _scatter_add_edges_fwd(xs, attrs):
    a = xs[0]
    senders = _index(attrs, "senders")
    receivers = _index(attrs, "receivers")
    n = attrs["n"]
    _expect(senders.shape == receivers.shape, "scatter_add_edges: senders/receivers length mismatch")
    if senders.size:
        _expect(senders.min() >= 0 and senders.max() < a.shape[0], "scatter_add_edges: sender out of range")
        _expect(receivers.min() >= 0 and receivers.max() < n, "scatter_add_edges: receiver out of range")
    messages = a[senders]
    weights = attrs.get("weights")
    if weights is not None:
        _expect(weights.shape == senders.shape, "scatter_add_edges: one weight per edge")
        messages = messages * weights[:, None]
    out = np.zeros((n, a.shape[1]))
    np.add.at(out, receivers, messages)
    return out


def _scatter_add_edges_vjp(g, xs, out, attrs):
    return [scatter_add_edges(g, attrs["receivers"], attrs["senders"], xs[0].shape[0], attrs.get("weights"))]


register("scatter_add_edges", _scatter_add_edges_fwd, _scatter_add_edges_vjp)

register(
    "transpose",
    lambda xs, attrs: np.ascontiguousarray(xs[0].T),
    lambda g, xs, out, attrs: [transpose(g)],
)


def _concat_fwd(xs, attrs):
    axis = attrs["axis"]
    _expect(axis in (0, 1), "concat: axis must be 0 or 1")
    _expect(len(xs) >= 1, "concat: needs at least one input")
    other = 1 - axis
    _expect(len({x.shape[other] for x in xs}) == 1, "concat: inputs disagree off the concat axis")
    return np.concatenate(xs, axis=axis)


def _concat_vjp(g, xs, out, attrs):
    axis = attrs["axis"]
    grads, start = [], 0
    for x in xs:
        stop = start + x.shape[axis]
        grads.append(slice_(g, axis, start, stop))
        start = stop
    return grads


register("concat", _concat_fwd, _concat_vjp)


def _slice_fwd(xs, attrs):
    a = xs[0]
    axis, start, stop = attrs["axis"], attrs["start"], attrs["stop"]
    _expect(axis in (0, 1) and 0 <= start <= stop <= a.shape[axis], "slice: bounds out of range")
    return np.ascontiguousarray(a[start:stop] if axis == 0 else a[:, start:stop])


register(
    "slice",
    _slice_fwd,
    lambda g, xs, out, attrs: [pad(g, attrs["axis"], attrs["start"], xs[0].shape[attrs["axis"]])],
)


def _pad_fwd(xs, attrs):
    a = xs[0]
    axis, start, total = attrs["axis"], attrs["start"], attrs["total"]
    _expect(axis in (0, 1) and 0 <= start and start + a.shape[axis] <= total, "pad: bounds out of range")
    shape = list(a.shape)
    shape[axis] = total
    out = np.zeros(shape)
    if axis == 0:
        out[start:start + a.shape[0]] = a
    else:
        out[:, start:start + a.shape[1]] = a
    return out


register(
    "pad",
    _pad_fwd,
    lambda g, xs, out, attrs: [slice_(g, attrs["axis"], attrs["start"], attrs["start"] + xs[0].shape[attrs["axis"]])],
)
