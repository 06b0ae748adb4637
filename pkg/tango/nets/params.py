"""Parameter containers and the tree utilities that walk them.

Containers are plain dataclasses whose Tensor fields (directly, or inside
lists and dicts) are the trainable arrays. Everything else on them is
static configuration and passes through the tree functions untouched.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from tango.autodiff.tape import Tape
from tango.autodiff.tensor import Tensor
from tango.errors import ShapeError

GCN_WEIGHTS = ("W",)
GCN_BIASES = ("b",)
GATEDGCN_WEIGHTS = ("U", "W", "A", "B")
GATEDGCN_BIASES = ("b_U", "b_gate")


@dataclass
class MlpParams:
    weights: List[Tensor]
    biases: List[Tensor]
    activation: str = "relu"

    def __post_init__(self):
        if len(self.weights) != len(self.biases) or not self.weights:
            raise ShapeError("an MLP needs one bias per weight matrix and at least one layer")
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if b.shape != (1, w.shape[1]):
                raise ShapeError(f"layer {i}: bias shape {b.shape} does not match weight {w.shape}")
            if i and self.weights[i - 1].shape[1] != w.shape[0]:
                raise ShapeError(f"layer {i}: input width {w.shape[0]} does not chain from {self.weights[i - 1].shape[1]}")

    @property
    def in_dim(self) -> int:
        return self.weights[0].shape[0]

    @property
    def out_dim(self) -> int:
        return self.weights[-1].shape[1]


@dataclass
class GnnLayerParams:
    kind: str
    weights: Dict[str, Tensor]
    biases: Dict[str, Tensor]

    def __post_init__(self):
        expected = {"gcn": (GCN_WEIGHTS, GCN_BIASES), "gatedgcn": (GATEDGCN_WEIGHTS, GATEDGCN_BIASES)}
        if self.kind not in expected:
            raise ShapeError(f"unknown layer kind {self.kind!r}")
        w_names, b_names = expected[self.kind]
        if set(self.weights) != set(w_names) or set(self.biases) != set(b_names):
            raise ShapeError(f"{self.kind} layer needs weights {w_names} and biases {b_names}")
        d = self.width
        for name, w in self.weights.items():
            if w.shape != (d, d):
                raise ShapeError(f"{self.kind}.{name} must be {d}x{d}, got {w.shape}")
        for name, b in self.biases.items():
            if b.shape != (1, d):
                raise ShapeError(f"{self.kind}.{name} must be 1x{d}, got {b.shape}")

    @property
    def width(self) -> int:
        return self.weights["W"].shape[0]


@dataclass
class BackboneParams:
    layers: List[GnnLayerParams]
    activation: str = "relu"
    encoder: Optional[MlpParams] = None

    def __post_init__(self):
        if not self.layers:
            raise ShapeError("a backbone needs at least one message-passing layer")
        widths = {layer.width for layer in self.layers}
        if len(widths) != 1:
            raise ShapeError(f"backbone layers disagree on width: {sorted(widths)}")
        if self.encoder is not None and self.encoder.out_dim != self.width:
            raise ShapeError(f"encoder outputs {self.encoder.out_dim} channels for width {self.width}")

    @property
    def width(self) -> int:
        return self.layers[0].width

    @property
    def depth(self) -> int:
        return len(self.layers)


# ---------------- tree utilities ----------------

def tree_map(fn: Callable[[Tensor], Tensor], obj: Any) -> Any:
    if isinstance(obj, Tensor):
        return fn(obj)
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return type(obj)(**{f.name: tree_map(fn, getattr(obj, f.name)) for f in dataclasses.fields(obj)})
    if isinstance(obj, list):
        return [tree_map(fn, v) for v in obj]
    if isinstance(obj, tuple):
        return tuple(tree_map(fn, v) for v in obj)
    if isinstance(obj, dict):
        return {k: tree_map(fn, obj[k]) for k in sorted(obj)}
    return obj


def tree_named(obj: Any, prefix: str = "") -> List[Tuple[str, Tensor]]:
    """(dotted name, tensor) pairs in a fixed traversal order."""
    out: List[Tuple[str, Tensor]] = []

    def walk(o, path):
        if isinstance(o, Tensor):
            out.append((path, o))
        elif dataclasses.is_dataclass(o) and not isinstance(o, type):
            for f in dataclasses.fields(o):
                walk(getattr(o, f.name), f"{path}.{f.name}" if path else f.name)
        elif isinstance(o, (list, tuple)):
            for i, v in enumerate(o):
                walk(v, f"{path}.{i}")
        elif isinstance(o, dict):
            for k in sorted(o):
                walk(o[k], f"{path}.{k}")

    walk(obj, prefix)
    return out


def tree_leaves(obj: Any) -> List[Tensor]:
    return [t for _, t in tree_named(obj)]


def tree_unflatten(obj: Any, leaves: Sequence) -> Any:
    """Same structure as `obj` with its tensors replaced, in tree order."""
    it: Iterator = iter(leaves)
    out = tree_map(lambda _: _as_tensor(next(it)), obj)
    if next(it, None) is not None:
        raise ShapeError("more leaves than the parameter tree holds")
    return out


def _as_tensor(v) -> Tensor:
    return v if isinstance(v, Tensor) else Tensor(v)


def bind(obj: Any, tape: Tape) -> Any:
    """Record every parameter as a leaf of `tape`."""
    return tree_map(tape.leaf, obj)


def detach(obj: Any) -> Any:
    return tree_map(lambda t: t.detach(), obj)


def count_params(obj: Any) -> int:
    return sum(t.size for t in tree_leaves(obj))


# ---------------- initialisation ----------------

def glorot(rng: np.random.Generator, fan_in: int, fan_out: int) -> Tensor:
    bound = math.sqrt(6.0 / (fan_in + fan_out))
    return Tensor(rng.uniform(-bound, bound, size=(fan_in, fan_out)))


def zeros(shape: Tuple[int, int]) -> Tensor:
    return Tensor(np.zeros(shape))


def init_mlp(rng: np.random.Generator, dims: Sequence[int], activation: str = "relu") -> MlpParams:
    if len(dims) < 2:
        raise ShapeError("an MLP needs at least input and output widths")
    weights = [glorot(rng, a, b) for a, b in zip(dims[:-1], dims[1:])]
    biases = [zeros((1, b)) for b in dims[1:]]
    return MlpParams(weights, biases, activation)


def init_gnn_layer(rng: np.random.Generator, kind: str, d: int) -> GnnLayerParams:
    if kind == "gcn":
        names, bias_names = GCN_WEIGHTS, GCN_BIASES
    elif kind == "gatedgcn":
        names, bias_names = GATEDGCN_WEIGHTS, GATEDGCN_BIASES
    else:
        raise ShapeError(f"unknown layer kind {kind!r}")
    return GnnLayerParams(kind, {k: glorot(rng, d, d) for k in names}, {k: zeros((1, d)) for k in bias_names})


def init_backbone(
    rng: np.random.Generator,
    d: int,
    depth: int,
    kind: str = "gatedgcn",
    activation: str = "relu",
    in_dim: Optional[int] = None,
) -> BackboneParams:
    encoder = init_mlp(rng, [in_dim, d], activation) if in_dim is not None else None
    layers = [init_gnn_layer(rng, kind, d) for _ in range(depth)]
    return BackboneParams(layers, activation, encoder)


def mlp_dims(d_in: int, hidden: int, d_out: int, layers: int) -> List[int]:
    """Widths for an MLP with `layers` affine maps."""
    return [d_in] + [hidden] * (layers - 1) + [d_out]


def init_params(spec: Dict[str, Any], rng: np.random.Generator) -> Any:
    """Build parameters from a shape spec.

    {"kind": "mlp", "dims": [...], "activation": ...}
    {"kind": "gcn" | "gatedgcn", "d": ...}
    {"kind": "backbone", "d": ..., "depth": ..., "layer": ..., "activation": ..., "in_dim": ...}
    """
    spec = dict(spec)
    kind = spec.pop("kind")
    if kind == "mlp":
        return init_mlp(rng, spec["dims"], spec.get("activation", "relu"))
    if kind in ("gcn", "gatedgcn"):
        return init_gnn_layer(rng, kind, spec["d"])
    if kind == "backbone":
        return init_backbone(
            rng,
            spec["d"],
            spec["depth"],
            spec.get("layer", "gatedgcn"),
            spec.get("activation", "relu"),
            spec.get("in_dim"),
        )
    raise ShapeError(f"unknown parameter kind {kind!r}")
