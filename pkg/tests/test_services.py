import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from tango.errors import CheckpointError, ConfigError, ShapeError
from tango.graphs.datasets import barbell_demo
from tango.models.networks import init_gnn_network, init_tango_network
from tango.training.forward import final_features
from tango.nets.params import tree_leaves
from tango.schemas.config import DatasetConfig, ExperimentConfig, TangoConfig, TrainConfig
from tango.services import verification
from tango.services.barbell import barbell_tango_config, dirichlet_matrix_power, run_barbell_demo
from tango.services.checkpoint import load_checkpoint, network_meta, save_checkpoint
from tango.services.experiments import checkpoint_trajectory, evaluate_checkpoint, run_experiment
from tango.services.landscape import LANDSCAPE_COLUMNS, landscape_grid, landscape_models

SMALL_TANGO = TangoConfig(L=2, d=4, L_gnn=1, activation="tanh")


def experiment(tmp_path, **kw):
    base = dict(
        name="toy",
        dataset=DatasetConfig(task="sssp", sizes=(4, 2, 2), n_min=5, n_max=7, seed=0),
        tango=SMALL_TANGO,
        train=TrainConfig(max_epochs=2, patience=2, lr=1e-2, batch_size=2, threads=1),
        output_dir=str(tmp_path),
        seeds=[0, 1],
    )
    base.update(kw)
    return ExperimentConfig(**base)


def tiny_sizes(**kw):
    base = dict(
        gradient=2,
        second_order=1,
        orthogonality=20,
        dissipation=2,
        newton=1,
        gd_rate=1,
        equivariance=2,
        complexity=(30, 60),
    )
    base.update(kw)
    return verification.VerifySizes(**base)


# ---------------- checkpoints ----------------

@pytest.mark.parametrize("model", ["tango", "gnn"])
def test_checkpoint_round_trip(model, tmp_path, rng):
    cfg = ExperimentConfig(model=model, tango=SMALL_TANGO, gnn_depth=2)
    if model == "gnn":
        net = init_gnn_network(rng, SMALL_TANGO, 1, pooled=True, depth=2)
    else:
        net = init_tango_network(rng, SMALL_TANGO, 1, pooled=False)
    path = str(tmp_path / "ckpt.json")
    save_checkpoint(path, net, cfg, network_meta(net, 1))

    back, back_cfg, meta = load_checkpoint(path)
    assert back_cfg == cfg
    assert meta["pooled"] == net.pooled
    for a, b in zip(tree_leaves(net), tree_leaves(back)):
        assert np.array_equal(a.data, b.data)


def test_checkpoint_errors(tmp_path, rng):
    with pytest.raises(CheckpointError):
        load_checkpoint(str(tmp_path / "missing.json"))

    net = init_tango_network(rng, SMALL_TANGO, 1, pooled=False)
    path = tmp_path / "ckpt.json"
    save_checkpoint(str(path), net, ExperimentConfig(tango=SMALL_TANGO), network_meta(net, 1))
    payload = json.loads(path.read_text())

    dropped = dict(payload, arrays={k: v for k, v in payload["arrays"].items() if k != "readout.biases.0"})
    (tmp_path / "dropped.json").write_text(json.dumps(dropped))
    with pytest.raises(CheckpointError):
        load_checkpoint(str(tmp_path / "dropped.json"))

    name = next(iter(payload["arrays"]))
    rec = payload["arrays"][name]
    reshaped = json.loads(json.dumps(payload))
    reshaped["arrays"][name] = {"shape": [rec["shape"][0] * rec["shape"][1], 1], "values": rec["values"]}
    (tmp_path / "reshaped.json").write_text(json.dumps(reshaped))
    with pytest.raises(ShapeError):
        load_checkpoint(str(tmp_path / "reshaped.json"))

    (tmp_path / "garbage.json").write_text("{not json")
    with pytest.raises(CheckpointError):
        load_checkpoint(str(tmp_path / "garbage.json"))


# ---------------- experiments ----------------

def test_run_experiment_writes_artifacts(tmp_path):
    cfg = experiment(tmp_path)
    summary = run_experiment(cfg)
    out = tmp_path / "toy"
    assert (out / "summary.json").is_file()
    for seed in (0, 1):
        assert (out / f"checkpoint_seed{seed}.json").is_file()
        lines = (out / f"metrics_seed{seed}.csv").read_text().splitlines()
        assert lines[0] == "epoch,train_loss,val_loss,val_metric"
        assert len(lines) == 3

    values = [r.test_metric for r in summary.seeds]
    assert summary.test_metric_mean == pytest.approx(np.mean(values))
    assert summary.test_metric_std == pytest.approx(np.std(values))
    assert json.loads((out / "summary.json").read_text())["metric"] == "log10_mse"


def test_evaluate_checkpoint_reproduces_summary(tmp_path):
    summary = run_experiment(experiment(tmp_path, seeds=[3]))
    result = summary.seeds[0]
    assert evaluate_checkpoint(result.checkpoint, None, "log10_mse") == pytest.approx(result.test_metric, rel=1e-12)
    with pytest.raises(ConfigError):
        evaluate_checkpoint(result.checkpoint, str(tmp_path / "nope.jsonl"), "mse")


def test_checkpoint_trajectory_has_one_trace_per_step(tmp_path):
    summary = run_experiment(experiment(tmp_path, seeds=[0]))
    traces = checkpoint_trajectory(summary.seeds[0].checkpoint, None, index=1)
    assert len(traces) == SMALL_TANGO.L
    assert all(t.alpha > 0 for t in traces)
    with pytest.raises(ConfigError):
        checkpoint_trajectory(summary.seeds[0].checkpoint, None, index=99)


def test_gnn_experiment_rejects_trajectory(tmp_path):
    summary = run_experiment(experiment(tmp_path, model="gnn", gnn_depth=1, seeds=[0]))
    with pytest.raises(CheckpointError):
        checkpoint_trajectory(summary.seeds[0].checkpoint, None)


def test_missing_dataset_file_is_config_error(tmp_path):
    cfg = experiment(tmp_path, dataset=None, dataset_path=str(tmp_path / "absent.jsonl"))
    with pytest.raises(ConfigError):
        run_experiment(cfg)


# ---------------- barbell ----------------

def test_dirichlet_barbell_stays_on_the_left():
    result = run_barbell_demo(5, 50, "dirichlet")
    assert len(result.snapshots) == 51
    assert result.right_clique_mean < 0.25 * result.uniform_value
    expected = dirichlet_matrix_power(barbell_demo(5).graph, barbell_demo(5).x, 0.01, 50)[:, 0]
    assert_allclose(result.final, expected, atol=1e-12)
    # heat flow conserves total mass
    assert result.final.sum() == pytest.approx(1.0, abs=1e-12)


def test_barbell_rows_and_errors():
    result = run_barbell_demo(3, 2, "dirichlet")
    rows = result.rows()
    assert len(rows) == 3 * 6
    assert rows[0] == (0, 0, 1.0)
    with pytest.raises(ValueError):
        run_barbell_demo(3, 0, "dirichlet")
    with pytest.raises(ValueError):
        run_barbell_demo(3, 2, "wave")


def test_tango_barbell_runs_briefly():
    result = run_barbell_demo(3, 2, "tango", epochs=2)
    assert result.mode == "tango"
    assert len(result.snapshots) == 3
    assert result.meta["epochs"] == 2
    assert result.meta["epsilon"] == pytest.approx(0.5)
    assert result.meta["activation"] == "tanh"


@pytest.mark.parametrize("seed", range(5))
def test_untrained_barbell_rollout_stays_finite(seed):
    cfg = barbell_tango_config(50)
    sample = barbell_demo(5)
    net = init_tango_network(np.random.default_rng(seed), cfg, 1, pooled=False)
    states = []
    final_features(net, sample, cfg, states=states)
    assert len(states) == 51
    # every tanh-bounded step moves H by at most eps times a constant
    assert np.linalg.norm(states[-1].numpy()) < 1e3


@pytest.mark.slow
def test_tango_barbell_beats_dirichlet_at_default_settings():
    tango = run_barbell_demo(5, 50, "tango")
    dirichlet = run_barbell_demo(5, 50, "dirichlet")
    assert tango.final_mse <= 0.1 * dirichlet.final_mse


# ---------------- landscape ----------------

def test_landscape_grid_shape_and_orthogonality():
    rows = landscape_grid(1.0, 5, seed=0)
    assert len(rows) == 25
    assert all(len(r) == len(LANDSCAPE_COLUMNS) for r in rows)
    assert rows[0][:2] == (-1.0, -1.0)
    inner = LANDSCAPE_COLUMNS.index("tangent_grad_inner")
    assert max(abs(r[inner]) for r in rows) <= 1e-9


def test_flat_landscape_has_no_descent(rng):
    cfg, em, tm = landscape_models(0)
    flat = verification.flat_energy_model(em, rng)
    rows = landscape_grid(2.0, 4, models=(cfg, flat, tm))
    energies = {r[LANDSCAPE_COLUMNS.index("energy")] for r in rows}
    assert len(energies) == 1
    for r in rows:
        assert r[LANDSCAPE_COLUMNS.index("descent_x")] == 0.0
        assert r[LANDSCAPE_COLUMNS.index("descent_y")] == 0.0


def test_landscape_rejects_bad_grid():
    with pytest.raises(ValueError):
        landscape_grid(0.0, 5)
    with pytest.raises(ValueError):
        landscape_grid(1.0, 1)


# ---------------- verification ----------------

def test_property_checks_pass_on_small_counts(rng):
    for check in (
        lambda: verification.check_gradient_fd(rng, 3),
        lambda: verification.check_second_order_fd(rng, 2),
        lambda: verification.check_orthogonality(rng, 30, "normalized"),
        lambda: verification.check_dissipation(rng, 3),
        lambda: verification.check_flat_landscape(rng, 5),
        lambda: verification.check_newton_recovery(rng, 2),
        lambda: verification.check_gd_rate(rng, 2),
        lambda: verification.check_equivariance(rng, 4),
    ):
        result, _ = check()
        assert result.passed, result


def test_printed_projection_breaks_orthogonality(rng):
    result, _ = verification.check_orthogonality(rng, 30, "printed")
    assert not result.passed


def test_run_verify_reports_broken_projection():
    report = verification.run_verify(0, tiny_sizes(), break_projection=True)
    by_name = {c.check: c for c in report.checks}
    assert len(report.checks) == 9
    assert not by_name["orthogonality"].passed
    assert not report.passed
    payload = json.loads(report.to_json())
    assert payload["pass"] is False
    assert "FAIL" in report.table()


def test_verify_sizes_validation():
    with pytest.raises(ValueError):
        verification.VerifySizes(complexity=(100,))
    with pytest.raises(ValueError):
        verification.VerifySizes(complexity=(5, 50))
    scaled = verification.VerifySizes.scaled(20, (100, 200))
    assert scaled.gradient == 20 and scaled.orthogonality == 200 and scaled.second_order == 1


def test_random_spd_spectrum(rng):
    A, eigs = verification.random_spd(rng, 6, 50.0)
    assert_allclose(A, A.T, atol=1e-12)
    assert_allclose(np.linalg.eigvalsh(A), eigs, rtol=1e-9)


@pytest.mark.slow
def test_run_verify_passes():
    report = verification.run_verify(0, verification.VerifySizes.scaled(20, (500, 1000, 2000, 4000)))
    assert report.passed, report.table()
