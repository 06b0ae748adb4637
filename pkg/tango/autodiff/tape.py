from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Tuple

import numpy as np

from tango.autodiff.tensor import Tensor, as_matrix
from tango.errors import TapeError

logger = logging.getLogger(__name__)

LEAF = "leaf"
CONST = "const"


@dataclass(frozen=True)
class Node:
    kind: str
    inputs: Tuple[int, ...]
    attrs: Mapping[str, Any]
    value: np.ndarray = field(repr=False)


class Tape:
    """Append-only record of operations.

    Node ids are positions in `nodes`, so every node's inputs precede it.
    A tape belongs to one logical evaluation and is not shared between threads.
    """

    def __init__(self):
        self.nodes: List[Node] = []

    def __len__(self) -> int:
        return len(self.nodes)

    def _append(self, kind: str, inputs: Tuple[int, ...], attrs: Mapping[str, Any], value: np.ndarray) -> Tensor:
        node_id = len(self.nodes)
        for i in inputs:
            if not 0 <= i < node_id:
                raise TapeError(f"node {node_id} ({kind}) references input {i} that is not recorded before it")
        self.nodes.append(Node(kind, tuple(inputs), dict(attrs), value))
        return Tensor._wrap(value, self, node_id)

    def leaf(self, data) -> Tensor:
        """Record a differentiable input (parameters, features)."""
        value = data.data if isinstance(data, Tensor) else as_matrix(data)
        return self._append(LEAF, (), {}, value)

    def const(self, data) -> Tensor:
        """Record a non-differentiable input."""
        value = data.data if isinstance(data, Tensor) else as_matrix(data)
        return self._append(CONST, (), {}, value)

    def record(self, kind: str, inputs: Tuple[int, ...], attrs: Mapping[str, Any], value: np.ndarray) -> Tensor:
        return self._append(kind, inputs, attrs, value)

    def tensor(self, node_id: int) -> Tensor:
        return Tensor._wrap(self.nodes[node_id].value, self, node_id)

    def is_leaf(self, node_id: int) -> bool:
        return self.nodes[node_id].kind == LEAF

    def leaves(self) -> List[int]:
        return [i for i, node in enumerate(self.nodes) if node.kind == LEAF]

    def replay(self) -> List[np.ndarray]:
        """Recompute every node from the recorded leaves and constants.

        Raises TapeError if any recomputed value differs bit-wise from the
        recorded one.
        """
        from tango.autodiff.ops import get_op

        values: List[np.ndarray] = []
        for node_id, node in enumerate(self.nodes):
            if node.kind in (LEAF, CONST):
                out = node.value
            else:
                out = get_op(node.kind).forward([values[i] for i in node.inputs], node.attrs)
                if out.shape != node.value.shape or not np.array_equal(out, node.value):
                    raise TapeError(f"replay mismatch at node {node_id} ({node.kind})")
            values.append(out)
        return values


class GradientMap:
    """Gradients keyed by tape node id; lookups accept a Tensor or an id."""

    def __init__(self, grads: Dict[int, Tensor]):
        self._grads = grads

    @staticmethod
    def _key(item) -> int:
        if isinstance(item, Tensor):
            if item.node_id is None:
                raise TapeError("tensor is not on a tape")
            return item.node_id
        return int(item)

    def __getitem__(self, item) -> Tensor:
        return self._grads[self._key(item)]

    def __contains__(self, item) -> bool:
        return self._key(item) in self._grads

    def __len__(self) -> int:
        return len(self._grads)

    def items(self):
        return self._grads.items()

    def get(self, item, default=None):
        return self._grads.get(self._key(item), default)
