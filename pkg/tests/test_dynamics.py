import csv

import numpy as np
import pytest
from numpy.testing import assert_allclose

from tango.autodiff import ops
from tango.autodiff.checks import finite_diff_check
from tango.autodiff.tape import Tape
from tango.autodiff.tensor import Tensor
from tango.dynamics.baselines import dirichlet_flow_step, dirichlet_stable_step, newton_decomposition
from tango.dynamics.energy import alpha_coeff, energy_gradient, energy_terms, energy_value
from tango.dynamics.step import TRACE_COLUMNS, rollout, tango_step, write_trajectory_csv
from tango.dynamics.tangent import beta_coeff, project_orthogonal, tangent_raw
from tango.errors import ShapeError
from tango.graphs.graph import Graph, laplacian_max_eigenvalue
from tango.models.energy import EnergyModel, TangentModel, init_energy_model, init_tangent_model
from tango.nets.params import BackboneParams, GnnLayerParams, MlpParams, tree_map
from tango.schemas.config import TangoConfig


def const(a):
    return Tensor(np.asarray(a, dtype=np.float64))


def linear_head(w, b, d=1):
    return MlpParams([const(np.full((d, 1), w))], [const([[b]])], "tanh")


def identity_backbone(d, activation="tanh"):
    """One GCN layer on an edgeless graph with W = I: the layer is the identity."""
    layer = GnnLayerParams("gcn", {"W": const(np.eye(d))}, {"b": const(np.zeros((1, d)))})
    return BackboneParams([layer], activation)


def zeroed(model):
    return tree_map(lambda t: Tensor(np.zeros(t.shape)), model)


def test_zero_head_energy_is_zero(models, small_graph, rng):
    em, _ = models
    em0 = EnergyModel(em.backbone, zeroed(em.head), em.alpha_head)
    H = rng.standard_normal((5, 3))
    assert energy_value(em0, small_graph, H).item() == 0.0
    assert_allclose(energy_gradient(em0, small_graph, H).numpy(), np.zeros((5, 3)))


def test_energy_mean_of_squared_scores():
    # edgeless graph, identity backbone, head(x) = x: scores are tanh(h_v)
    g = Graph.from_edges(3, [])
    em = EnergyModel(identity_backbone(1), linear_head(1.0, 0.0), linear_head(0.0, 0.0))
    scores = np.array([0.5, 0.9, 0.2])
    H = np.arctanh(scores).reshape(-1, 1)
    assert energy_value(em, g, H).item() == pytest.approx(np.mean(scores ** 2), rel=1e-12)

    # scores forced to (1, 2, 3) with head(x) = 4x on tanh features (0.25, 0.5, 0.75)
    em4 = EnergyModel(identity_backbone(1), linear_head(4.0, 0.0), linear_head(0.0, 0.0))
    H4 = np.arctanh(np.array([[0.25], [0.5], [0.75]]))
    assert energy_value(em4, g, H4).item() == pytest.approx(14.0 / 3.0, rel=1e-12)


def test_energy_gradient_closed_form():
    g = Graph.from_edges(4, [])
    em = EnergyModel(identity_backbone(1), linear_head(1.0, 0.0), linear_head(0.0, 0.0))
    h = np.array([[-0.7], [0.1], [0.4], [1.3]])
    t = np.tanh(h)
    expected = 2.0 / 4.0 * t * (1.0 - t ** 2)
    assert_allclose(energy_gradient(em, g, h).numpy(), expected, rtol=1e-12)


def test_energy_nonnegative_and_fd(models, small_graph, rng):
    em, _ = models
    for _ in range(5):
        H = rng.standard_normal((5, 3))
        assert energy_value(em, small_graph, H).item() >= 0.0
        assert finite_diff_check(lambda X: energy_value(em, small_graph, X), H) <= 1e-4


def test_energy_terms_eager_results_are_constants(models, small_graph, rng):
    em, _ = models
    terms = energy_terms(em, small_graph, rng.standard_normal((5, 3)))
    assert not terms.value.on_tape and not terms.gradient.on_tape


def test_energy_terms_on_tape_stay_differentiable(models, small_graph, rng):
    em, _ = models
    tape = Tape()
    H = tape.leaf(rng.standard_normal((5, 3)))
    terms = energy_terms(em, small_graph, H)
    assert terms.gradient.on_tape and terms.gradient.tape is tape


def test_alpha_examples():
    g = Graph.from_edges(2, [(0, 1)])
    Ht = const([[0.3], [0.2]])
    em = EnergyModel(identity_backbone(1), linear_head(1.0, 0.0), linear_head(0.0, 0.0))
    assert alpha_coeff(em, g, Ht).item() == pytest.approx(0.5)
    em_big = EnergyModel(em.backbone, em.head, linear_head(0.0, 50.0))
    assert alpha_coeff(em_big, g, Ht).item() == pytest.approx(1.0, abs=1e-12)
    em_hand = EnergyModel(em.backbone, em.head, linear_head(2.0, -0.4))
    assert alpha_coeff(em_hand, g, Ht).item() == pytest.approx(1.0 / (1.0 + np.exp(-(2.0 * 0.5 - 0.4))))


def test_tangent_raw_zero_backbone_relu(small_graph, rng):
    cfg = TangoConfig(d=3, L_gnn=2, activation="relu")
    tm = init_tangent_model(rng, cfg)
    tm0 = TangentModel(zeroed(tm.backbone), tm.beta_head)
    assert_allclose(tangent_raw(tm0, small_graph, rng.standard_normal((5, 3))).numpy(), np.zeros((5, 3)))


def test_tangent_raw_is_equivariant(models, small_graph, rng):
    _, tm = models
    H = rng.standard_normal((5, 3))
    perm = rng.permutation(5)
    Hp = np.empty_like(H)
    Hp[perm] = H
    M = tangent_raw(tm, small_graph, H).numpy()
    Mp = tangent_raw(tm, small_graph.permute(perm), Hp).numpy()
    assert_allclose(Mp[perm], M, atol=1e-12)


def test_projection_examples():
    g = [[1.0], [1.0]]
    assert_allclose(project_orthogonal([[1.0], [0.0]], g, 1e-12).numpy(), [[0.5], [-0.5]])
    assert_allclose(project_orthogonal(g, g, 1e-12).numpy(), np.zeros((2, 1)), atol=1e-15)
    M = [[0.3], [-2.0]]
    assert_allclose(project_orthogonal(M, np.zeros((2, 1)), 1e-12).numpy(), M)


def test_printed_projection_only_orthogonal_for_unit_gradient(rng):
    M = rng.standard_normal((4, 2))
    grad = 3.0 * rng.standard_normal((4, 2))
    T = project_orthogonal(M, grad, 1e-12, "printed").numpy()
    assert abs(np.sum(T * grad)) > 1e-3
    unit = grad / np.linalg.norm(grad)
    T1 = project_orthogonal(M, unit, 1e-12, "printed").numpy()
    assert abs(np.sum(T1 * unit)) < 1e-12


def test_projection_errors():
    with pytest.raises(ShapeError):
        project_orthogonal(np.ones((2, 1)), np.ones((3, 1)), 1e-12)
    with pytest.raises(ValueError):
        project_orthogonal(np.ones((2, 1)), np.ones((2, 1)), 1e-12, "sideways")


def test_beta_examples():
    tm = TangentModel(identity_backbone(1), linear_head(0.0, 0.7))
    assert beta_coeff(tm, const([[5.0], [1.0]])).item() == pytest.approx(0.7)
    tm0 = TangentModel(identity_backbone(1), linear_head(1.0, 0.0))
    assert beta_coeff(tm0, np.zeros((3, 1))).item() == 0.0
    tm_hand = TangentModel(identity_backbone(1), linear_head(-1.5, 0.25))
    assert beta_coeff(tm_hand, const([[1.0], [3.0]])).item() == pytest.approx(-1.5 * 4.0 + 0.25)


def test_zero_step_is_identity(models, small_graph, rng, tanh_cfg):
    em, tm = models
    H = rng.standard_normal((5, 3))
    H1, _ = tango_step(em, tm, small_graph, H, tanh_cfg.model_copy(update={"epsilon": 0.0}))
    assert_allclose(H1.numpy(), H)


def test_descent_only_is_gradient_descent(models, small_graph, rng, tanh_cfg):
    em, tm = models
    H = rng.standard_normal((5, 3))
    cfg = tanh_cfg.model_copy(update={"variant": "descent-only"})
    H1, trace = tango_step(em, tm, small_graph, H, cfg)
    expected = H - cfg.epsilon * trace.alpha * energy_gradient(em, small_graph, H).numpy()
    assert_allclose(H1.numpy(), expected, rtol=1e-12, atol=1e-14)
    assert trace.beta == 0.0


@pytest.mark.parametrize("backbone", ["gcn", "gatedgcn"])
def test_full_step_tangent_is_orthogonal(backbone, small_graph, rng):
    cfg = TangoConfig(d=4, L_gnn=2, activation="tanh", backbone=backbone)
    em, tm = init_energy_model(rng, cfg), init_tangent_model(rng, cfg)
    for _ in range(10):
        _, trace = tango_step(em, tm, small_graph, rng.standard_normal((5, 4)), cfg)
        assert abs(trace.tangent_grad_inner) <= 1e-9 * max(1.0, trace.tangent_norm * trace.grad_norm)


def test_variant_update_directions(models, small_graph, rng, tanh_cfg):
    em, tm = models
    H = rng.standard_normal((5, 3))
    M = tangent_raw(tm, small_graph, H).numpy()
    grad = energy_gradient(em, small_graph, H).numpy()

    H1, tr = tango_step(em, tm, small_graph, H, tanh_cfg.model_copy(update={"variant": "non-tangent"}))
    expected = H + tanh_cfg.epsilon * (-tr.alpha * grad + tr.beta * M)
    assert_allclose(H1.numpy(), expected, rtol=1e-10, atol=1e-12)

    H2, tr2 = tango_step(em, tm, small_graph, H, tanh_cfg.model_copy(update={"variant": "non-energy"}))
    Ht = energy_terms(em, small_graph, H).intermediate.numpy()
    assert tr2.grad_norm == pytest.approx(np.linalg.norm(Ht))
    assert abs(tr2.tangent_grad_inner) <= 1e-9 * max(1.0, tr2.tangent_norm * tr2.grad_norm)


def test_flat_energy_moves_along_tangent(models, small_graph, rng, tanh_cfg):
    em, tm = models
    em_flat = EnergyModel(em.backbone, zeroed(em.head), em.alpha_head)
    H = rng.standard_normal((5, 3))
    H1, trace = tango_step(em_flat, tm, small_graph, H, tanh_cfg)
    M = tangent_raw(tm, small_graph, H).numpy()
    assert_allclose(H1.numpy() - H, tanh_cfg.epsilon * trace.beta * M, atol=1e-12)


def test_rollout_records_states(models, small_graph, rng, tanh_cfg):
    em, tm = models
    states = []
    H, traces = rollout(em, tm, small_graph, rng.standard_normal((5, 3)), tanh_cfg, states=states)
    assert len(traces) == tanh_cfg.L and len(states) == tanh_cfg.L + 1
    assert [t.step_index for t in traces] == list(range(tanh_cfg.L))
    assert np.array_equal(states[-1].numpy(), H.numpy())


def test_rollout_zero_models_relu_fixed_point(small_graph, rng):
    cfg = TangoConfig(d=3, L_gnn=1, L=4, activation="relu")
    em0 = zeroed(init_energy_model(rng, cfg))
    tm0 = zeroed(init_tangent_model(rng, cfg))
    H0 = rng.standard_normal((5, 3))
    H, _ = rollout(em0, tm0, small_graph, H0, cfg)
    assert_allclose(H.numpy(), H0)


def test_second_order_through_step(models, small_graph, rng, tanh_cfg):
    """Gradient of a post-step loss with respect to energy parameters."""
    em, tm = models
    H = rng.standard_normal((5, 3))
    target = rng.standard_normal((5, 3))
    w0 = em.head.weights[0].numpy()

    def loss(W):
        head = MlpParams([W] + em.head.weights[1:], em.head.biases, em.head.activation)
        H1, _ = tango_step(EnergyModel(em.backbone, head, em.alpha_head), tm, small_graph, H, tanh_cfg)
        return ops.reduce_mean(ops.square(ops.sub(H1, target)))

    assert finite_diff_check(loss, w0) <= 1e-3


def test_trajectory_csv(models, small_graph, rng, tanh_cfg, tmp_path):
    em, tm = models
    _, traces = rollout(em, tm, small_graph, rng.standard_normal((5, 3)), tanh_cfg)
    path = str(tmp_path / "traj.csv")
    write_trajectory_csv(path, traces)
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == TRACE_COLUMNS
    assert len(rows) == tanh_cfg.L + 1
    assert float(rows[1][1]) == traces[0].energy


def test_dirichlet_flow_examples(path5):
    two = Graph.from_edges(2, [(0, 1)])
    assert_allclose(dirichlet_flow_step(two, [[1.0], [0.0]], 0.5), [[0.5], [0.5]])
    H = np.full((5, 2), 3.0)
    assert_allclose(dirichlet_flow_step(path5, H, 0.1), H)
    assert dirichlet_stable_step(path5) == pytest.approx(2.0 / laplacian_max_eigenvalue(path5))


def test_dirichlet_flow_conserves_mass(path5, rng):
    H = rng.random((5, 1))
    for _ in range(10):
        H1 = dirichlet_flow_step(path5, H, 0.2)
        assert abs(H1.sum() - H.sum()) <= 1e-10
        H = H1


def test_dirichlet_large_step_warns(path5, caplog):
    with caplog.at_level("WARNING"):
        dirichlet_flow_step(path5, np.ones((5, 1)), 10.0)
    assert any("stab" in r.message for r in caplog.records)


def test_newton_decomposition_examples():
    alpha, T = newton_decomposition([1.0, 0.0], [1.0, 1.0])
    assert alpha == pytest.approx(1.0)
    assert_allclose(T, [0.0, 1.0])
    alpha, T = newton_decomposition([2.0, 0.0], [-3.0, 0.0])
    assert alpha == pytest.approx(-1.5)
    assert_allclose(T, [0.0, 0.0])
    with pytest.raises(ValueError):
        newton_decomposition([0.0, 0.0], [1.0, 0.0])
