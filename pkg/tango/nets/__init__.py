from tango.nets.params import (
    BackboneParams,
    GnnLayerParams,
    MlpParams,
    bind,
    count_params,
    detach,
    glorot,
    init_backbone,
    init_gnn_layer,
    init_mlp,
    init_params,
    mlp_dims,
    tree_leaves,
    tree_map,
    tree_named,
    tree_unflatten,
)
from tango.nets.layers import backbone_forward, gatedgcn_layer, gcn_coefficients, gcn_layer, gnn_layer, mlp_forward, sum_pool
