"""First- and second-order results checked against torch.autograd."""
import numpy as np
import pytest
from numpy.testing import assert_allclose

from tango.autodiff import ops
from tango.autodiff.checks import analytic_gradient, hessian_vector_product
from tango.dynamics.energy import energy_gradient
from tango.graphs.graph import Graph
from tango.models.energy import init_energy_model
from tango.schemas.config import TangoConfig

torch = pytest.importorskip("torch")


def ours(x, w):
    h = ops.tanh(ops.matmul(x, w))
    h = ops.gelu(ops.scatter_add_edges(h, [0, 1, 1, 2], [1, 0, 2, 1], 3))
    return ops.reduce_mean(ops.square(ops.sigmoid(h)))


def theirs(x, w):
    h = torch.tanh(x @ w)
    senders = torch.tensor([0, 1, 1, 2])
    receivers = torch.tensor([1, 0, 2, 1])
    agg = torch.zeros_like(h).index_add(0, receivers, h[senders])
    h = torch.nn.functional.gelu(agg, approximate="tanh")
    return torch.sigmoid(h).pow(2).mean()


def test_gradient_matches_torch(rng):
    x0 = rng.standard_normal((3, 2))
    w = rng.standard_normal((2, 2))
    g = analytic_gradient(lambda x: ours(x, w), x0)

    xt = torch.tensor(x0, requires_grad=True)
    (gt,) = torch.autograd.grad(theirs(xt, torch.tensor(w)), xt)
    assert_allclose(g, gt.numpy(), rtol=1e-10, atol=1e-12)


def test_hvp_matches_torch(rng):
    x0 = rng.standard_normal((3, 2))
    v = rng.standard_normal((3, 2))
    w = rng.standard_normal((2, 2))
    hv = hessian_vector_product(lambda x: ours(x, w), x0, v)

    xt = torch.tensor(x0, requires_grad=True)
    (gt,) = torch.autograd.grad(theirs(xt, torch.tensor(w)), xt, create_graph=True)
    (hvt,) = torch.autograd.grad((gt * torch.tensor(v)).sum(), xt)
    assert_allclose(hv, hvt.numpy(), rtol=1e-9, atol=1e-12)


def torch_gcn_energy(em, g, H):
    """Reference energy of a one-layer GCN backbone written directly in torch."""
    layer = em.backbone.layers[0]
    deg = torch.tensor(g.degrees, dtype=torch.float64) + 1.0
    A = torch.zeros((g.n, g.n), dtype=torch.float64)
    for u, v in g.edges:
        A[u, v] = A[v, u] = 1.0
    A = A + torch.eye(g.n, dtype=torch.float64)
    norm = A / torch.sqrt(deg[:, None] * deg[None, :])
    W = torch.tensor(layer.weights["W"].numpy())
    b = torch.tensor(layer.biases["b"].numpy())
    Ht = torch.tanh(norm @ H @ W + b)
    X = Ht
    head = em.head
    for i, (w, bias) in enumerate(zip(head.weights, head.biases)):
        X = X @ torch.tensor(w.numpy()) + torch.tensor(bias.numpy())
        if i < len(head.weights) - 1:
            X = torch.tanh(X)
    return X.pow(2).mean()


def test_energy_gradient_matches_torch(rng):
    cfg = TangoConfig(d=3, L_gnn=1, activation="tanh", backbone="gcn")
    em = init_energy_model(rng, cfg)
    g = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)])
    H0 = rng.standard_normal((4, 3))

    Ht = torch.tensor(H0, requires_grad=True)
    (gt,) = torch.autograd.grad(torch_gcn_energy(em, g, Ht), Ht)
    assert_allclose(energy_gradient(em, g, H0).numpy(), gt.numpy(), rtol=1e-10, atol=1e-12)
