import numpy as np
import pytest
from numpy.testing import assert_allclose

from tango.autodiff.tensor import Tensor
from tango.errors import ShapeError
from tango.graphs.graph import Graph
from tango.models.networks import init_gnn_network, init_tango_network, layer_param_count, matched_gnn_depth
from tango.nets.layers import backbone_forward, gatedgcn_layer, gcn_layer, gnn_layer, mlp_forward, sum_pool
from tango.nets.params import (
    GnnLayerParams,
    MlpParams,
    count_params,
    init_backbone,
    init_gnn_layer,
    init_params,
    tree_leaves,
    tree_named,
    tree_unflatten,
)
from tango.schemas.config import TangoConfig


def const(a):
    return Tensor(np.asarray(a, dtype=np.float64))


def gated_layer(d, U=0.0, W=0.0, A=0.0, B=0.0, b_U=0.0, b_gate=0.0):
    def full(v, shape):
        return const(np.full(shape, v) if np.isscalar(v) else v)

    return GnnLayerParams(
        "gatedgcn",
        {k: full(v, (d, d)) for k, v in dict(U=U, W=W, A=A, B=B).items()},
        {"b_U": full(b_U, (1, d)), "b_gate": full(b_gate, (1, d))},
    )


def test_mlp_identity_and_constant(rng):
    X = rng.standard_normal((4, 3))
    ident = MlpParams([const(np.eye(3))], [const(np.zeros((1, 3)))])
    assert_allclose(mlp_forward(ident, X).numpy(), X)
    c = np.array([[1.0, -2.0, 0.5]])
    flat = MlpParams([const(np.zeros((3, 3)))], [const(c)])
    assert_allclose(mlp_forward(flat, X).numpy(), np.repeat(c, 4, axis=0))


def test_mlp_two_layer_relu_by_hand():
    p = MlpParams(
        [const([[1.0, -1.0]]), const([[2.0], [3.0]])],
        [const([[0.0, 0.5]]), const([[1.0]])],
        "relu",
    )
    # x=-1: hidden relu([-1, 1.5]) = [0, 1.5] -> 4.5 + 1
    # x= 1: hidden relu([ 1, -0.5]) = [1, 0] -> 2 + 1
    assert_allclose(mlp_forward(p, [[-1.0], [1.0]]).numpy(), [[5.5], [3.0]])


def test_mlp_width_checks():
    with pytest.raises(ShapeError):
        MlpParams([const(np.eye(2)), const(np.eye(3))], [const(np.zeros((1, 2))), const(np.zeros((1, 3)))])
    p = MlpParams([const(np.eye(2))], [const(np.zeros((1, 2)))])
    with pytest.raises(ShapeError):
        mlp_forward(p, np.ones((3, 3)))


def test_gcn_single_node_identity():
    g = Graph.from_edges(1, [])
    p = GnnLayerParams("gcn", {"W": const(np.eye(2))}, {"b": const(np.zeros((1, 2)))})
    assert_allclose(gcn_layer(p, g, const([[3.0, -1.0]])).numpy(), [[3.0, -1.0]])


def test_gcn_zero_weights():
    g = Graph.from_edges(3, [(0, 1), (1, 2)])
    p = GnnLayerParams("gcn", {"W": const(np.zeros((2, 2)))}, {"b": const(np.zeros((1, 2)))})
    assert_allclose(gcn_layer(p, g, const(np.ones((3, 2)))).numpy(), np.zeros((3, 2)))


def test_gcn_two_node_path():
    g = Graph.from_edges(2, [(0, 1)])
    p = GnnLayerParams("gcn", {"W": const([[1.0]])}, {"b": const([[0.0]])})
    # both degrees are 2 with self-loops: every coefficient is 1/2
    assert_allclose(gcn_layer(p, g, const([[1.0], [0.0]])).numpy(), [[0.5], [0.5]])


def test_gated_isolated_node_is_self_term():
    g = Graph.from_edges(1, [])
    p = gated_layer(1, U=2.0, W=5.0, b_U=0.25)
    assert_allclose(gatedgcn_layer(p, g, const([[3.0]])).numpy(), [[6.25]])


def test_gated_closed_gates_leave_self_term():
    g = Graph.from_edges(2, [(0, 1)])
    p = gated_layer(1, U=1.0, W=1.0, b_gate=-40.0)
    out = gatedgcn_layer(p, g, const([[1.0], [2.0]])).numpy()
    # eta ~ 4e-18, so the gated mean is scaled by eta / (eta + eps)
    assert_allclose(out, [[1.0], [2.0]], atol=1e-9)


def test_gated_single_edge_by_hand():
    g = Graph.from_edges(2, [(0, 1)])
    p = gated_layer(1, U=0.5, W=2.0, A=1.0, B=-1.0, b_gate=0.3)
    H = [[1.0], [3.0]]
    out = gatedgcn_layer(p, g, const(H)).numpy()

    def sig(z):
        return 1.0 / (1.0 + np.exp(-z))

    eps = 1e-6
    eta_01 = sig(1.0 * 1.0 - 1.0 * 3.0 + 0.3)  # message from 0 into 1
    eta_10 = sig(1.0 * 3.0 - 1.0 * 1.0 + 0.3)  # message from 1 into 0
    expect0 = 0.5 * 1.0 + eta_10 * 2.0 * 3.0 / (eta_10 + eps)
    expect1 = 0.5 * 3.0 + eta_01 * 2.0 * 1.0 / (eta_01 + eps)
    assert_allclose(out, [[expect0], [expect1]], rtol=1e-12)


@pytest.mark.parametrize("kind", ["gcn", "gatedgcn"])
def test_layers_are_permutation_equivariant(kind, rng, small_graph):
    p = init_gnn_layer(rng, kind, 3)
    H = rng.standard_normal((5, 3))
    perm = rng.permutation(5)
    Hp = np.empty_like(H)
    Hp[perm] = H
    out = gnn_layer(p, small_graph, const(H)).numpy()
    out_p = gnn_layer(p, small_graph.permute(perm), const(Hp)).numpy()
    assert_allclose(out_p[perm], out, atol=1e-12)


def test_layer_rejects_wrong_rows(rng, path5):
    p = init_gnn_layer(rng, "gcn", 2)
    with pytest.raises(ShapeError):
        gnn_layer(p, path5, const(np.ones((4, 2))))


def test_sum_pool_examples(rng):
    assert_allclose(sum_pool(np.eye(2)).numpy(), [[1.0, 1.0]])
    assert_allclose(sum_pool([[2.0, 3.0]]).numpy(), [[2.0, 3.0]])
    H = rng.standard_normal((3, 2))
    loop = [sum(H[i, j] for i in range(3)) for j in range(2)]
    assert_allclose(sum_pool(H).numpy(), [loop])


def test_backbone_encoder_and_depth(rng, path5):
    p = init_backbone(rng, 4, 3, "gatedgcn", "relu", in_dim=1)
    assert p.depth == 3 and p.width == 4
    out = backbone_forward(p, path5, np.ones((5, 1)))
    assert out.shape == (5, 4)


def test_init_params_is_seeded():
    spec = {"kind": "backbone", "d": 3, "depth": 2, "layer": "gcn"}
    a = init_params(spec, np.random.default_rng(3))
    b = init_params(spec, np.random.default_rng(3))
    assert all(np.array_equal(x.data, y.data) for x, y in zip(tree_leaves(a), tree_leaves(b)))
    with pytest.raises(ShapeError):
        init_params({"kind": "conv"}, np.random.default_rng(0))


def test_tree_names_and_unflatten(rng):
    p = init_gnn_layer(rng, "gatedgcn", 2)
    names = [n for n, _ in tree_named(p)]
    assert names == ["weights.A", "weights.B", "weights.U", "weights.W", "biases.b_U", "biases.b_gate"]
    doubled = tree_unflatten(p, [t.numpy() * 2 for t in tree_leaves(p)])
    assert_allclose(doubled.weights["U"].numpy(), 2 * p.weights["U"].numpy())
    with pytest.raises(ShapeError):
        tree_unflatten(p, [t.numpy() for t in tree_leaves(p)] + [np.zeros((1, 1))])


def test_gated_layer_counts():
    assert layer_param_count("gatedgcn", 3) == 4 * 9 + 6
    assert count_params(init_gnn_layer(np.random.default_rng(0), "gatedgcn", 3)) == 42
    assert count_params(init_gnn_layer(np.random.default_rng(0), "gcn", 3)) == layer_param_count("gcn", 3)


def test_matched_baseline_depth_is_close_in_size():
    cfg = TangoConfig(d=10, L_gnn=2)
    depth = matched_gnn_depth(cfg)
    tango = count_params(init_tango_network(np.random.default_rng(0), cfg, 1, False))
    gnn = count_params(init_gnn_network(np.random.default_rng(0), cfg, 1, False, depth))
    assert abs(gnn - tango) <= layer_param_count(cfg.backbone, cfg.d) / 2
