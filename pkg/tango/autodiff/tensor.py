from __future__ import annotations

from typing import TYPE_CHECKING, Optional, Tuple, Union

import numpy as np

from tango.errors import NonFiniteError, ShapeError

if TYPE_CHECKING:
    from tango.autodiff.tape import Tape

ArrayLike = Union["Tensor", np.ndarray, float, int]


def as_matrix(data) -> np.ndarray:
    """Copy `data` into a fresh read-only float64 matrix (scalars become 1x1)."""
    arr = np.array(data, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    elif arr.ndim != 2:
        raise ShapeError(f"tensors are 2-D, got an array with {arr.ndim} dimensions")
    if not np.isfinite(arr).all():
        raise NonFiniteError("tensor values must be finite")
    arr.setflags(write=False)
    return arr


class Tensor:
    """Immutable dense 2-D float64 array, optionally bound to a node of a Tape.

    Tensors without a tape are constants: ops on them are evaluated eagerly
    and nothing is recorded.
    """

    __slots__ = ("data", "tape", "node_id")

    def __init__(self, data, tape: Optional["Tape"] = None, node_id: Optional[int] = None):
        self.data = as_matrix(data)
        self.tape = tape
        self.node_id = node_id

    @classmethod
    def _wrap(cls, arr: np.ndarray, tape: Optional["Tape"] = None, node_id: Optional[int] = None) -> "Tensor":
        # arr is freshly produced by an op and already checked
        t = cls.__new__(cls)
        arr.setflags(write=False)
        t.data = arr
        t.tape = tape
        t.node_id = node_id
        return t

    @property
    def shape(self) -> Tuple[int, int]:
        return self.data.shape

    @property
    def size(self) -> int:
        return int(self.data.size)

    @property
    def on_tape(self) -> bool:
        return self.tape is not None and self.node_id is not None

    def numpy(self) -> np.ndarray:
        return np.array(self.data)

    def item(self) -> float:
        if self.size != 1:
            raise ShapeError(f"item() needs a 1-element tensor, got shape {self.shape}")
        return float(self.data.reshape(-1)[0])

    def detach(self) -> "Tensor":
        return Tensor._wrap(self.data)

    def __repr__(self) -> str:
        where = f"node={self.node_id}" if self.on_tape else "const"
        return f"Tensor(shape={self.shape}, {where})"

    # operator sugar, all routed through the op registry
    def __add__(self, other):
        from tango.autodiff import ops
        if isinstance(other, (int, float)):
            return ops.shift(self, float(other))
        return ops.add(self, other)

    def __radd__(self, other):
        return self.__add__(other)

    def __sub__(self, other):
        from tango.autodiff import ops
        if isinstance(other, (int, float)):
            return ops.shift(self, -float(other))
        return ops.sub(self, other)

    def __rsub__(self, other):
        from tango.autodiff import ops
        if isinstance(other, (int, float)):
            return ops.shift(ops.neg(self), float(other))
        return ops.sub(other, self)

    def __mul__(self, other):
        from tango.autodiff import ops
        if isinstance(other, (int, float)):
            return ops.scale(self, float(other))
        return ops.mul(self, other)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        from tango.autodiff import ops
        if isinstance(other, (int, float)):
            return ops.scale(self, 1.0 / float(other))
        return ops.div(self, other)

    def __neg__(self):
        from tango.autodiff import ops
        return ops.neg(self)

    def __matmul__(self, other):
        from tango.autodiff import ops
        return ops.matmul(self, other)

    @property
    def T(self) -> "Tensor":
        from tango.autodiff import ops
        return ops.transpose(self)
