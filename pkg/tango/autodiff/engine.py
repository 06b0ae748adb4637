from __future__ import annotations

import logging
from typing import Dict, List, Optional, Sequence, Set

import numpy as np

from tango.autodiff import ops
from tango.autodiff.tape import CONST, LEAF, GradientMap, Tape
from tango.autodiff.tensor import Tensor
from tango.errors import ShapeError, TapeError

logger = logging.getLogger(__name__)


def backward(output: Tensor, *, create_graph: bool = False, wrt: Optional[Sequence[Tensor]] = None) -> GradientMap:
    """Reverse sweep from a 1-element `output` to the requested tape nodes.

    Without `wrt` the gradient of every leaf of the tape is returned. With
    `create_graph=True` the sweep records its own operations on the same tape,
    after the output node, so the returned gradients can be differentiated
    again. Targets the output does not depend on get a zero gradient.
    """
    if not isinstance(output, Tensor) or not output.on_tape:
        raise TapeError("backward needs an output recorded on a tape")
    if output.size != 1:
        raise ShapeError(f"backward needs a 1-element output, got shape {output.shape}")

    tape = output.tape
    end = output.node_id
    if wrt is None:
        targets = [i for i in range(end + 1) if tape.is_leaf(i)]
    else:
        targets = []
        for t in wrt:
            if not isinstance(t, Tensor) or not t.on_tape or t.tape is not tape:
                raise TapeError("gradient targets must live on the output's tape")
            targets.append(t.node_id)

    grads = _sweep(tape, end, set(targets), create_graph)
    result: Dict[int, Tensor] = {}
    for i in targets:
        g = grads.get(i)
        result[i] = g if g is not None else Tensor._wrap(np.zeros(tape.nodes[i].value.shape))
    return GradientMap(result)


def grad(output: Tensor, inputs: Sequence[Tensor], create_graph: bool = False) -> List[Tensor]:
    gm = backward(output, create_graph=create_graph, wrt=inputs)
    return [gm[t] for t in inputs]


def _sweep(tape: Tape, end: int, targets: Set[int], create_graph: bool) -> Dict[int, Tensor]:
    if not targets:
        return {}
    lo = min(targets)
    if lo > end:
        return {}
    nodes = tape.nodes

    # relevant[i - lo]: node i depends on some target
    relevant = [False] * (end + 1 - lo)
    for i in range(lo, end + 1):
        relevant[i - lo] = i in targets or any(j >= lo and relevant[j - lo] for j in nodes[i].inputs)
    if not relevant[end - lo]:
        return {}

    seed = np.ones((1, 1))
    grads: Dict[int, Tensor] = {end: tape.const(seed) if create_graph else Tensor._wrap(seed)}
    for i in range(end, lo - 1, -1):
        g = grads.get(i)
        node = nodes[i]
        if g is None or node.kind in (LEAF, CONST):
            continue
        flags = [j >= lo and relevant[j - lo] for j in node.inputs]
        if any(flags):
            if create_graph:
                xs = [tape.tensor(j) for j in node.inputs]
                out = tape.tensor(i)
            else:
                xs = [Tensor._wrap(nodes[j].value) for j in node.inputs]
                out = Tensor._wrap(node.value)
            contribs = ops.get_op(node.kind).vjp(g, xs, out, node.attrs)
            for j, needed, c in zip(node.inputs, flags, contribs):
                if not needed or c is None:
                    continue
                prev = grads.get(j)
                grads[j] = c if prev is None else ops.add(prev, c)
        if i not in targets:
            del grads[i]
    return grads
