from typing import NamedTuple, Optional

from tango.autodiff import ops
from tango.autodiff.engine import grad
from tango.autodiff.tape import Tape
from tango.autodiff.tensor import Tensor
from tango.graphs.graph import Graph
from tango.models.energy import EnergyModel
from tango.nets.layers import backbone_forward, mlp_forward
from tango.nets.params import tree_leaves


class EnergyTerms(NamedTuple):
    value: Tensor
    intermediate: Tensor
    gradient: Tensor


def find_tape(*objs) -> Optional[Tape]:
    """First tape found on a tensor or parameter tree among `objs`."""
    for obj in objs:
        leaves = [obj] if isinstance(obj, Tensor) else tree_leaves(obj)
        for t in leaves:
            if t.on_tape:
                return t.tape
    return None


def energy_intermediate(em: EnergyModel, g: Graph, H) -> Tensor:
    """H~ = sigma(EnergyGNN(H))."""
    return ops.activation(em.backbone.activation, backbone_forward(em.backbone, g, H))


def energy_from_intermediate(em: EnergyModel, Ht: Tensor) -> Tensor:
    return ops.reduce_mean(ops.square(mlp_forward(em.head, Ht)))


def energy_value(em: EnergyModel, g: Graph, H) -> Tensor:
    """V = mean over nodes of the squared per-node scores."""
    return energy_from_intermediate(em, energy_intermediate(em, g, H))


def energy_terms(em: EnergyModel, g: Graph, H) -> EnergyTerms:
    """V, H~ and dV/dH in one forward pass.

    When H or the model parameters live on a tape the gradient is recorded on
    that tape and stays differentiable. Otherwise a private tape is used and
    the results are plain constants.
    """
    H = H if isinstance(H, Tensor) else Tensor(H)
    tape = find_tape(H, em)
    eager = tape is None
    if eager:
        tape = Tape()
    Hn = H if H.on_tape and H.tape is tape else tape.leaf(H)
    Ht = energy_intermediate(em, g, Hn)
    V = energy_from_intermediate(em, Ht)
    (gV,) = grad(V, [Hn], create_graph=not eager)
    if eager:
        return EnergyTerms(V.detach(), Ht.detach(), gV)
    return EnergyTerms(V, Ht, gV)


def energy_gradient(em: EnergyModel, g: Graph, H) -> Tensor:
    return energy_terms(em, g, H).gradient


def alpha_coeff(em: EnergyModel, g: Graph, Ht) -> Tensor:
    """sigmoid(MLP_alpha(sum_pool(H~))), a 1x1 tensor in [0, 1]."""
    return ops.sigmoid(mlp_forward(em.alpha_head, ops.sum_pool(Ht)))
