"""Property suite for the engine and the dynamics.

Each check returns a CheckResult (name, pass, measured value, threshold).
A check that raises is reported as failed with an infinite value.
"""
import logging
import math
import time
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field, field_validator

from tango.autodiff import ops
from tango.autodiff.checks import finite_diff_check
from tango.autodiff.tensor import Tensor
from tango.dynamics.baselines import newton_decomposition
from tango.dynamics.energy import energy_value
from tango.dynamics.step import rollout, tango_step
from tango.dynamics.tangent import tangent_raw
from tango.errors import TangoError
from tango.graphs.generators import generate_family
from tango.graphs.graph import Graph
from tango.models.energy import EnergyModel, TangentModel, init_energy_model, init_tangent_model
from tango.nets.layers import gnn_layer
from tango.nets.params import MlpParams, init_gnn_layer, tree_leaves, tree_unflatten
from tango.schemas.config import FAMILY_NAMES, TangoConfig
from tango.schemas.report import CheckResult, VerifyReport

logger = logging.getLogger(__name__)

GRADIENT_TOL = 1e-4
SECOND_ORDER_TOL = 1e-3
ORTHOGONALITY_TOL = 1e-9
DISSIPATION_RATIO = 5.0
DISSIPATION_EPS = (1e-2, 1e-3, 1e-4)
FLAT_TOL = 1e-10
NEWTON_TOL = 1e-8
NEWTON_MIN_GD_STEPS = 100
GD_RATE_TOL = 0.05
GD_RATE_STEP = 200
EQUIVARIANCE_TOL = 1e-10
COMPLEXITY_SLOPE = 1.25
COMPLEXITY_SIZES = (1000, 2000, 4000, 8000)
COMPLEXITY_REPEATS = 3


class VerifySizes(BaseModel):
    gradient: int = Field(100, ge=1)
    second_order: int = Field(5, ge=1)
    orthogonality: int = Field(1000, ge=1)
    dissipation: int = Field(50, ge=1)
    newton: int = Field(10, ge=1)
    gd_rate: int = Field(10, ge=1)
    equivariance: int = Field(20, ge=1)
    complexity: Tuple[int, ...] = COMPLEXITY_SIZES

    @field_validator("complexity")
    @classmethod
    def _fit_needs_two_sizes(cls, sizes):
        if len(set(sizes)) < 2 or min(sizes) < 10:
            raise ValueError("complexity fit needs at least two distinct sizes of 10 or more")
        return sizes

    @classmethod
    def scaled(cls, instances: int, complexity: Sequence[int] = COMPLEXITY_SIZES) -> "VerifySizes":
        """Counts derived from the gradient-check instance count."""
        return cls(
            gradient=instances,
            second_order=max(1, instances // 20),
            orthogonality=10 * instances,
            dissipation=max(1, instances // 2),
            newton=max(1, instances // 10),
            gd_rate=max(1, instances // 10),
            equivariance=max(1, instances // 5),
            complexity=tuple(complexity),
        )


def random_graph(rng: np.random.Generator, n: int) -> Graph:
    family = FAMILY_NAMES[int(rng.integers(0, len(FAMILY_NAMES)))]
    if family == "barabasi-albert" and n <= 2:
        family = "line"
    return generate_family(family, n, rng)


def random_instance(
    rng: np.random.Generator,
    n: Optional[int] = None,
    d: Optional[int] = None,
    projection: str = "normalized",
) -> Tuple[TangoConfig, EnergyModel, TangentModel, Graph, np.ndarray]:
    """Small tanh model, graph and features for the property checks."""
    n = n or int(rng.integers(3, 9))
    d = d or int(rng.integers(2, 7))
    backbone = "gatedgcn" if rng.random() < 0.5 else "gcn"
    cfg = TangoConfig(d=d, L_gnn=int(rng.integers(1, 3)), activation="tanh", backbone=backbone, projection=projection, L=1)
    em = init_energy_model(rng, cfg)
    tm = init_tangent_model(rng, cfg)
    return cfg, em, tm, random_graph(rng, n), rng.standard_normal((n, d))


def _result(name: str, passed: bool, value: float, threshold: float) -> CheckResult:
    return CheckResult(check=name, passed=bool(passed), value=float(value), threshold=float(threshold))


def check_gradient_fd(rng: np.random.Generator, count: int) -> Tuple[CheckResult, Dict[str, Any]]:
    worst = 0.0
    for _ in range(count):
        cfg, em, _, g, H = random_instance(rng, n=5, d=4)
        worst = max(worst, finite_diff_check(lambda X: energy_value(em, g, X), H, 1e-5))
    return _result("gradient-fd", worst <= GRADIENT_TOL, worst, GRADIENT_TOL), {}


def check_second_order_fd(rng: np.random.Generator, count: int) -> Tuple[CheckResult, Dict[str, Any]]:
    """Parameter gradient of a loss taken after one step, which differentiates
    through the energy gradient."""
    worst = 0.0
    for i in range(count):
        cfg, em, tm, g, H = random_instance(rng, n=5, d=3)
        target = rng.standard_normal(H.shape)
        leaves = tree_leaves(em)
        index = i % len(leaves)

        def loss(P, em=em, leaves=leaves, index=index, tm=tm, g=g, H=H, target=target, cfg=cfg):
            swapped = list(leaves)
            swapped[index] = P
            H1, _ = tango_step(tree_unflatten(em, swapped), tm, g, H, cfg)
            return ops.reduce_mean(ops.square(ops.sub(H1, target)))

        worst = max(worst, finite_diff_check(loss, leaves[index].data, 1e-5))
    return _result("second-order-fd", worst <= SECOND_ORDER_TOL, worst, SECOND_ORDER_TOL), {}


def check_orthogonality(rng: np.random.Generator, count: int, projection: str) -> Tuple[CheckResult, Dict[str, Any]]:
    worst, flat = 0.0, 0
    for _ in range(count):
        cfg, em, tm, g, H = random_instance(rng, projection=projection)
        _, trace = tango_step(em, tm, g, H, cfg)
        if trace.grad_norm <= cfg.grad_zero_tol * math.sqrt(H.size):
            flat += 1
            continue
        scale = max(1.0, trace.tangent_norm * trace.grad_norm)
        worst = max(worst, abs(trace.tangent_grad_inner) / scale)
    return _result("orthogonality", worst <= ORTHOGONALITY_TOL, worst, ORTHOGONALITY_TOL), {"orthogonality_flat_instances": flat}


def check_dissipation(rng: np.random.Generator, count: int) -> Tuple[CheckResult, Dict[str, Any]]:
    """Mean |dV/eps + alpha ||grad V||^2| must shrink with eps."""
    residuals = np.zeros(len(DISSIPATION_EPS))
    for _ in range(count):
        cfg, em, tm, g, H = random_instance(rng)
        V0 = energy_value(em, g, H).item()
        for j, eps in enumerate(DISSIPATION_EPS):
            step_cfg = cfg.model_copy(update={"epsilon": eps})
            H1, trace = tango_step(em, tm, g, H, step_cfg)
            V1 = energy_value(em, g, H1).item()
            residuals[j] += abs((V1 - V0) / eps + trace.alpha * trace.grad_norm ** 2)
    residuals /= count
    ratios = [residuals[j] / residuals[j + 1] if residuals[j + 1] > 0 else math.inf for j in range(len(residuals) - 1)]
    value = min(ratios)
    details = {"dissipation_residuals": residuals.tolist(), "dissipation_eps": list(DISSIPATION_EPS)}
    return _result("dissipation-slope", value >= DISSIPATION_RATIO, value, DISSIPATION_RATIO), details


def flat_energy_model(em: EnergyModel, rng: np.random.Generator) -> EnergyModel:
    """Zero the last score weights so V is a constant."""
    head = em.head
    weights = list(head.weights)
    weights[-1] = Tensor(np.zeros(weights[-1].shape))
    biases = list(head.biases)
    biases[-1] = Tensor(rng.standard_normal(biases[-1].shape))
    return EnergyModel(em.backbone, MlpParams(weights, biases, head.activation), em.alpha_head)


def check_flat_landscape(rng: np.random.Generator, count: int) -> Tuple[CheckResult, Dict[str, Any]]:
    worst, stalled = 0.0, 0
    for _ in range(count):
        cfg, em, tm, g, H = random_instance(rng)
        em = flat_energy_model(em, rng)
        H1, trace = tango_step(em, tm, g, H, cfg)
        M = tangent_raw(tm, g, H).numpy()
        moved = float(np.linalg.norm(H1.numpy() - H))
        expected = cfg.epsilon * abs(trace.beta) * float(np.linalg.norm(M))
        if moved == 0.0:
            stalled += 1
        worst = max(worst, abs(moved - expected))
    value = worst if not stalled else math.inf
    return _result("flat-landscape-motion", value <= FLAT_TOL, value, FLAT_TOL), {"flat_landscape_stalled": stalled}


def random_spd(rng: np.random.Generator, dim: int, kappa: float) -> Tuple[np.ndarray, np.ndarray]:
    """SPD matrix with eigenvalues spanning [1, kappa] and its eigenvalues."""
    inner = np.sort(rng.uniform(1.0, kappa, size=dim - 2)) if dim > 2 else np.array([])
    eigs = np.concatenate([[1.0], inner, [kappa]])
    Q, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    return (Q * eigs) @ Q.T, eigs


def exact_line_search_steps(A: np.ndarray, e0: np.ndarray, tol: float, limit: int) -> int:
    """Steepest-descent steps on 1/2 e^T A e until ||e|| <= tol, capped at `limit`."""
    e = e0.copy()
    for k in range(limit):
        if np.linalg.norm(e) <= tol:
            return k
        g = A @ e
        e = e - (g @ g) / (g @ A @ g) * g
    return limit


def check_newton_recovery(rng: np.random.Generator, count: int) -> Tuple[CheckResult, Dict[str, Any]]:
    worst, fewest_gd = 0.0, math.inf
    for _ in range(count):
        dim = int(rng.integers(10, 51))
        kappa = float(10 ** rng.uniform(3.0, 4.0))
        A, _ = random_spd(rng, dim, kappa)
        h_star = rng.standard_normal(dim)
        h0 = rng.standard_normal(dim)
        grad = A @ (h0 - h_star)
        newton = np.linalg.solve(A, grad)
        alpha, T = newton_decomposition(grad, newton)
        h1 = h0 - (alpha * grad + T)
        worst = max(worst, float(np.linalg.norm(h1 - h_star)))
        fewest_gd = min(fewest_gd, exact_line_search_steps(A, h0 - h_star, NEWTON_TOL, NEWTON_MIN_GD_STEPS))
    passed = worst <= NEWTON_TOL and fewest_gd >= NEWTON_MIN_GD_STEPS
    return _result("newton-recovery", passed, worst, NEWTON_TOL), {"newton_min_gd_steps": fewest_gd}


def check_gd_rate(rng: np.random.Generator, count: int) -> Tuple[CheckResult, Dict[str, Any]]:
    """Per-step contraction of fixed-step gradient descent with step 2/(l_max + l_min)."""
    worst = 0.0
    for _ in range(count):
        kappa = float(rng.uniform(10.0, 100.0))
        A, eigs = random_spd(rng, 20, kappa)
        lo, hi = eigs[0], eigs[-1]
        rate = (hi - lo) / (hi + lo)
        step = 2.0 / (hi + lo)
        e = rng.standard_normal(A.shape[0])
        for _ in range(GD_RATE_STEP - 1):
            e = e - step * (A @ e)
            e /= np.linalg.norm(e)
        measured = float(np.linalg.norm(e - step * (A @ e)))
        worst = max(worst, abs(measured - rate) / rate)
    return _result("gd-rate", worst <= GD_RATE_TOL, worst, GD_RATE_TOL), {}


def check_equivariance(rng: np.random.Generator, count: int) -> Tuple[CheckResult, Dict[str, Any]]:
    worst = 0.0
    for i in range(count):
        n = int(rng.integers(4, 11))
        d = int(rng.integers(2, 6))
        g = random_graph(rng, n)
        H = rng.standard_normal((n, d))
        perm = rng.permutation(n)
        gp = g.permute(perm)
        Hp = np.empty_like(H)
        Hp[perm] = H
        layer = init_gnn_layer(rng, ("gcn", "gatedgcn")[i % 2], d)
        out = gnn_layer(layer, g, Tensor(H)).numpy()
        out_p = gnn_layer(layer, gp, Tensor(Hp)).numpy()
        worst = max(worst, float(np.max(np.abs(out_p[perm] - out))))

        cfg = TangoConfig(d=d, L_gnn=1, activation="tanh", L=1)
        em, tm = init_energy_model(rng, cfg), init_tangent_model(rng, cfg)
        H1 = tango_step(em, tm, g, H, cfg)[0].numpy()
        H1p = tango_step(em, tm, gp, Hp, cfg)[0].numpy()
        worst = max(worst, float(np.max(np.abs(H1p[perm] - H1))))
    return _result("permutation-equivariance", worst <= EQUIVARIANCE_TOL, worst, EQUIVARIANCE_TOL), {}


def time_rollout(g: Graph, cfg: TangoConfig, em: EnergyModel, tm: TangentModel, H: np.ndarray, repeats: int) -> float:
    best = math.inf
    for _ in range(repeats):
        start = time.perf_counter()
        rollout(em, tm, g, H, cfg)
        best = min(best, time.perf_counter() - start)
    return best


def check_complexity(rng: np.random.Generator, sizes: Sequence[int]) -> Tuple[CheckResult, Dict[str, Any]]:
    """Log-log slope of rollout time against |V| + |E| on attachment-2 graphs."""
    cfg = TangoConfig(d=8, L_gnn=1, L=2, activation="tanh")
    em, tm = init_energy_model(rng, cfg), init_tangent_model(rng, cfg)
    measured_sizes, times = [], []
    for target in sizes:
        g = generate_family("barabasi-albert", max(3, target // 3), rng)
        H = rng.standard_normal((g.n, cfg.d))
        time_rollout(g, cfg, em, tm, H, 1)
        measured_sizes.append(g.n + g.m)
        times.append(time_rollout(g, cfg, em, tm, H, COMPLEXITY_REPEATS))
    x, y = np.log(measured_sizes), np.log(times)
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    details = {"complexity_sizes": measured_sizes, "complexity_seconds": times, "complexity_fit_residual": residual}
    return _result("complexity-slope", slope <= COMPLEXITY_SLOPE, float(slope), COMPLEXITY_SLOPE), details


def run_verify(seed: int, sizes: Optional[VerifySizes] = None, break_projection: bool = False) -> VerifyReport:
    sizes = sizes or VerifySizes()
    rng = np.random.default_rng(seed)
    projection = "printed" if break_projection else "normalized"
    checks: List[Tuple[str, float, Callable[[], Tuple[CheckResult, Dict[str, Any]]]]] = [
        ("gradient-fd", GRADIENT_TOL, lambda: check_gradient_fd(rng, sizes.gradient)),
        ("second-order-fd", SECOND_ORDER_TOL, lambda: check_second_order_fd(rng, sizes.second_order)),
        ("orthogonality", ORTHOGONALITY_TOL, lambda: check_orthogonality(rng, sizes.orthogonality, projection)),
        ("dissipation-slope", DISSIPATION_RATIO, lambda: check_dissipation(rng, sizes.dissipation)),
        ("flat-landscape-motion", FLAT_TOL, lambda: check_flat_landscape(rng, sizes.gradient)),
        ("newton-recovery", NEWTON_TOL, lambda: check_newton_recovery(rng, sizes.newton)),
        ("gd-rate", GD_RATE_TOL, lambda: check_gd_rate(rng, sizes.gd_rate)),
        ("permutation-equivariance", EQUIVARIANCE_TOL, lambda: check_equivariance(rng, sizes.equivariance)),
        ("complexity-slope", COMPLEXITY_SLOPE, lambda: check_complexity(rng, sizes.complexity)),
    ]
    report = VerifyReport(seed=seed)
    for name, threshold, run in checks:
        start = time.perf_counter()
        try:
            result, details = run()
        except (TangoError, ArithmeticError, ValueError, np.linalg.LinAlgError) as e:
            logger.error(f"check {name} raised: {e}")
            result, details = _result(name, False, math.inf, threshold), {f"{name}_error": str(e)}
        report.checks.append(result)
        report.details.update(details)
        logger.info(f"{name}: {'pass' if result.passed else 'FAIL'} value={result.value:.4g} ({time.perf_counter() - start:.1f}s)")
    return report
