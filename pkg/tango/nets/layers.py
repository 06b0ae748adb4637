import numpy as np

from tango import config
from tango.autodiff import ops
from tango.autodiff.tensor import Tensor
from tango.errors import ShapeError
from tango.graphs.graph import Graph
from tango.nets.params import BackboneParams, GnnLayerParams, MlpParams


def _check_rows(g: Graph, H: Tensor, what: str) -> None:
    if H.shape[0] != g.n:
        raise ShapeError(f"{what}: features have {H.shape[0]} rows, graph has {g.n} nodes")


def _check_width(H: Tensor, d: int, what: str) -> None:
    if H.shape[1] != d:
        raise ShapeError(f"{what}: features have {H.shape[1]} channels, layer expects {d}")


def mlp_forward(p: MlpParams, X) -> Tensor:
    """Affine maps with the activation between them; the last layer is linear."""
    X = X if isinstance(X, Tensor) else Tensor(X)
    if X.shape[1] != p.in_dim:
        raise ShapeError(f"mlp: input has {X.shape[1]} channels, first layer expects {p.in_dim}")
    last = len(p.weights) - 1
    for i, (w, b) in enumerate(zip(p.weights, p.biases)):
        X = ops.add_bias(ops.matmul(X, w), b)
        if i < last:
            X = ops.activation(p.activation, X)
    return X


def gcn_coefficients(g: Graph):
    """Edge weights and self-loop weights of D^-1/2 (A + I) D^-1/2."""
    deg = g.degrees.astype(np.float64) + 1.0
    inv_sqrt = 1.0 / np.sqrt(deg)
    edge_w = inv_sqrt[g.senders] * inv_sqrt[g.receivers]
    return edge_w, 1.0 / deg


def gcn_layer(p: GnnLayerParams, g: Graph, H: Tensor) -> Tensor:
    _check_rows(g, H, "gcn")
    _check_width(H, p.width, "gcn")
    edge_w, self_w = gcn_coefficients(g)
    mixed = ops.mul(H, np.repeat(self_w[:, None], H.shape[1], axis=1))
    if g.m:
        mixed = ops.add(mixed, ops.scatter_add_edges(H, g.senders, g.receivers, g.n, edge_w))
    return ops.add_bias(ops.matmul(mixed, p.weights["W"]), p.biases["b"])


def gatedgcn_layer(p: GnnLayerParams, g: Graph, H: Tensor) -> Tensor:
    """h_v' = U h_v + b_U + sum_u eta_uv * (W h_u) / (sum_u eta_uv + eps),
    eta_uv = sigmoid(A h_u + B h_v + b_gate)."""
    _check_rows(g, H, "gatedgcn")
    _check_width(H, p.width, "gatedgcn")
    w, b = p.weights, p.biases
    out = ops.add_bias(ops.matmul(H, w["U"]), b["b_U"])
    if not g.m:
        return out
    logits = ops.add(
        ops.gather(ops.matmul(H, w["A"]), g.senders),
        ops.gather(ops.matmul(H, w["B"]), g.receivers),
    )
    gate = ops.sigmoid(ops.add_bias(logits, b["b_gate"]))
    messages = ops.mul(gate, ops.gather(ops.matmul(H, w["W"]), g.senders))
    numer = ops.scatter_rows(messages, g.receivers, g.n)
    denom = ops.shift(ops.scatter_rows(gate, g.receivers, g.n), config.GATE_EPS)
    return ops.add(out, ops.div(numer, denom))


LAYERS = {"gcn": gcn_layer, "gatedgcn": gatedgcn_layer}


def gnn_layer(p: GnnLayerParams, g: Graph, H: Tensor) -> Tensor:
    return LAYERS[p.kind](p, g, H)


def sum_pool(H) -> Tensor:
    return ops.sum_pool(H)


def backbone_forward(p: BackboneParams, g: Graph, H) -> Tensor:
    """Encoder (if any), then the message-passing stack with the activation
    between layers. The output is left pre-activation."""
    H = H if isinstance(H, Tensor) else Tensor(H)
    if p.encoder is not None:
        H = mlp_forward(p.encoder, H)
    last = p.depth - 1
    for i, layer in enumerate(p.layers):
        H = gnn_layer(layer, g, H)
        if i < last:
            H = ops.activation(p.activation, H)
    return H
