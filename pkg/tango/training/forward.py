from typing import List, Optional, Union

from tango.autodiff import ops
from tango.autodiff.tensor import Tensor
from tango.dynamics.step import StepTrace, rollout
from tango.graphs.datasets import GraphSample
from tango.models.networks import GnnNetwork, TangoNetwork
from tango.nets.layers import gnn_layer, mlp_forward
from tango.schemas.config import TangoConfig

Network = Union[TangoNetwork, GnnNetwork]


def readout(p, H: Tensor, pooled: bool) -> Tensor:
    if pooled:
        return mlp_forward(p, ops.sum_pool(H))
    return mlp_forward(p, H)


def encode(net: Network, x) -> Tensor:
    if isinstance(net, TangoNetwork):
        return mlp_forward(net.encoder, x)
    return mlp_forward(net.backbone.encoder, x)


def final_features(
    net: Network,
    sample: GraphSample,
    cfg: TangoConfig,
    states: Optional[List[Tensor]] = None,
    traces: Optional[List[StepTrace]] = None,
) -> Tensor:
    H = encode(net, sample.x)
    if isinstance(net, TangoNetwork):
        H, step_traces = rollout(net.energy, net.tangent, sample.graph, H, cfg, states=states)
        if traces is not None:
            traces.extend(step_traces)
        return H
    if states is not None:
        states.append(H)
    for layer in net.backbone.layers:
        H = ops.add(H, ops.activation(net.backbone.activation, gnn_layer(layer, sample.graph, H)))
        if states is not None:
            states.append(H)
    return H


def predict(net: Network, sample: GraphSample, cfg: TangoConfig) -> Tensor:
    """n x 1 for node tasks, 1 x 1 for pooled graph tasks."""
    return readout(net.readout, final_features(net, sample, cfg), net.pooled)
