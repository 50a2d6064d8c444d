"""Outer loop: local smoothed steps glued by finite-time consensus.

Oracles: closed-form quadratic prox steps, a hand-rolled centralized
gradient-descent loop for the single-agent case, and the analytic
minimizer (mean of centers) for a network of translated quadratics.
"""

import numpy as np
import pytest

from ddcsim import (
    DcFunction,
    L1Norm,
    LeastSquaresL1,
    ScaledQuadratic,
    SolverConfig,
    Zero,
    column_stochastic_weights,
    erdos_renyi,
    run,
    smoothed_gradient,
)
from ddcsim.graph import Digraph
from ddcsim.solver import (
    SolverState,
    effective_alpha,
    gaussian_init,
    gradient_step,
    outer_iteration,
    parse_variant,
    zeros_init,
)


def quadratic_problem(centers):
    return [DcFunction(f=ScaledQuadratic(1.0, center=c), g=Zero()) for c in centers]


def small_network(n, seed, prob=0.5):
    g = erdos_renyi(n, prob, seed=seed)
    return g, column_stochastic_weights(g)


def test_gradient_step_quadratic_closed_form():
    # f = 0.5||x||^2, g = 0: prox_f(y) = y/(1+mu), prox_g(y) = y, so
    # z = y - (alpha/mu) * (y - y/(1+mu)) = (1 - alpha/(1+mu)) y.
    dc = DcFunction(f=ScaledQuadratic(1.0), g=Zero())
    cfg = SolverConfig(alpha=0.5, mu=1.0)
    y = np.array([2.0, -4.0, 1.0])
    for n in (1, 3, 17):  # network size must not scale the local step
        np.testing.assert_allclose(
            gradient_step(dc, y, cfg, n), 0.75 * y, atol=1e-14
        )
    np.testing.assert_allclose(
        gradient_step(dc, y, cfg, 5, alpha=0.25), 0.875 * y, atol=1e-14
    )


def test_gradient_step_identical_halves_is_identity():
    dc = DcFunction(f=L1Norm(0.7), g=L1Norm(0.7))
    cfg = SolverConfig(alpha=0.2, mu=0.5)
    y = np.array([1.5, -0.2, 0.0, 3.0])
    np.testing.assert_allclose(gradient_step(dc, y, cfg, 4), y, atol=1e-15)


def test_single_agent_equals_centralized_descent():
    rng = np.random.Generator(np.random.Philox(53))
    A = rng.standard_normal((8, 5))
    dc = DcFunction(
        f=LeastSquaresL1(A, rng.standard_normal(8), 0.2),
        g=ScaledQuadratic(0.05),
    )
    mu = 1.0 / float(np.linalg.eigvalsh(A.T @ A)[-1])
    cfg = SolverConfig(alpha=mu / 4.0, mu=mu, outer_iters=20)
    graph = Digraph(1, ())
    weights = column_stochastic_weights(graph)
    y0 = rng.standard_normal((1, 5))
    res = run([dc], graph, weights, cfg, y0)
    assert res.alpha_used == cfg.alpha  # mu/4 < 1/L_F, so no clipping
    # reference: plain gradient descent on the smoothed objective
    y = y0[0].copy()
    for _ in range(20):
        y = y - cfg.alpha * smoothed_gradient(dc, y, mu)
    np.testing.assert_allclose(res.y_final[0], y, atol=1e-10)
    assert res.consensus_rounds_total == 20  # one self-round per outer step


def test_network_of_quadratics_finds_mean_center():
    rng = np.random.Generator(np.random.Philox(123))
    n, p = 5, 3
    centers = rng.uniform(-2, 2, size=(n, p))
    graph, weights = small_network(n, seed=3)
    cfg = SolverConfig(alpha=0.1, mu=0.5, theta=1.5, outer_iters=300)
    res = run(quadratic_problem(centers), graph, weights, cfg, gaussian_init(n, p, 9))
    # the average objective (1/n) sum 0.5||x - c_i||^2 and its smoothing
    # share the unique minimizer mean(c_i)
    c_bar = centers.mean(axis=0)
    assert np.linalg.norm(res.y_final.mean(axis=0) - c_bar) < 1e-6
    for i in range(n):
        assert np.linalg.norm(res.y_final[i] - c_bar) < 1e-6


def test_effective_alpha_clipping_warns():
    cfg = SolverConfig(alpha=10.0, mu=0.5)
    with pytest.warns(UserWarning, match="clipping"):
        assert effective_alpha(cfg, m_f=0.0) == pytest.approx(0.25)  # 1/L_F
    assert effective_alpha(SolverConfig(alpha=0.2, mu=0.5), m_f=0.0) == 0.2


def test_parse_variant():
    assert parse_variant("consensus") == ("consensus", None)
    assert parse_variant(" Mixing ") == ("mixing", None)
    assert parse_variant("inexact-10") == ("inexact", 10)
    assert parse_variant("inexact-100") == ("inexact", 100)
    with pytest.raises(ValueError):
        parse_variant("gossip")


def test_run_is_deterministic():
    rng = np.random.Generator(np.random.Philox(61))
    centers = rng.uniform(-1, 1, size=(4, 2))
    graph, weights = small_network(4, seed=8)
    cfg = SolverConfig(alpha=0.1, mu=0.5, outer_iters=15)
    y0 = gaussian_init(4, 2, 77)
    first = run(quadratic_problem(centers), graph, weights, cfg, y0)
    second = run(quadratic_problem(centers), graph, weights, cfg, y0)
    assert first.y_final.tobytes() == second.y_final.tobytes()
    rows_a = [r.to_csv_row() for r in first.records]
    rows_b = [r.to_csv_row() for r in second.records]
    assert rows_a == rows_b


def test_records_cover_initial_point_and_every_step():
    centers = np.eye(3)
    graph, weights = small_network(3, seed=2)
    cfg = SolverConfig(alpha=0.1, mu=0.5, outer_iters=7)
    res = run(quadratic_problem(centers), graph, weights, cfg, zeros_init(3, 3))
    assert [r.k for r in res.records] == list(range(8))
    assert res.records[0].consensus_rounds == 0


def test_stop_stationarity_halts_early():
    rng = np.random.Generator(np.random.Philox(67))
    centers = np.tile(rng.uniform(-1, 1, size=2), (4, 1))  # identical agents
    graph, weights = small_network(4, seed=8)
    cfg = SolverConfig(alpha=0.2, mu=0.5, outer_iters=500, stop_stationarity=1e-6)
    res = run(quadratic_problem(centers), graph, weights, cfg, gaussian_init(4, 2, 5))
    assert res.records[-1].k < 500
    assert res.records[-1].stationarity_residual <= 1e-6
    assert all(r.stationarity_residual > 1e-6 for r in res.records[:-1])


def test_identical_agents_stay_in_consensus():
    dc = DcFunction(f=ScaledQuadratic(1.0, center=np.ones(2)), g=Zero())
    graph, weights = small_network(5, seed=4)
    cfg = SolverConfig(alpha=0.1, mu=0.5, outer_iters=3)
    y0 = np.tile(np.array([3.0, -1.0]), (5, 1))
    state = SolverState(y=y0, z=y0)
    for _ in range(3):
        state = outer_iteration(state, [dc] * 5, graph, weights, cfg)
        # identical inputs produce identical steps; consensus must not split them
        assert np.ptp(state.y, axis=0).max() < 1e-12
        assert np.ptp(state.z, axis=0).max() < 1e-12
    assert state.k == 3


def test_mixing_variant_uses_one_round_per_step():
    rng = np.random.Generator(np.random.Philox(71))
    centers = rng.uniform(-1, 1, size=(4, 2))
    graph, weights = small_network(4, seed=8)
    cfg = SolverConfig(alpha=0.1, mu=0.5, outer_iters=25, variant="mixing")
    res = run(quadratic_problem(centers), graph, weights, cfg, gaussian_init(4, 2, 6))
    assert res.consensus_rounds_total == 25
    assert all(r.consensus_rounds == 1 for r in res.records[1:])


def test_consensus_keeps_iterates_near_step_average():
    rng = np.random.Generator(np.random.Philox(73))
    n, p = 6, 3
    centers = rng.uniform(-2, 2, size=(n, p))
    graph, weights = small_network(n, seed=11)
    cfg = SolverConfig(alpha=0.1, mu=0.5, theta=0.3, outer_iters=40)
    res = run(
        quadratic_problem(centers),
        graph,
        weights,
        cfg,
        gaussian_init(n, p, 21),
        trace=True,
    )
    assert len(res.y_history) == len(res.z_history) == 41
    for k in range(1, 41):
        z_bar = res.z_history[k].mean(axis=0)
        dev = max(
            np.linalg.norm(res.y_history[k][i] - z_bar) for i in range(n)
        )
        # finite-time consensus guarantee: every agent lands within 2*n*eta_k
        # of the average of the communicated steps
        assert dev <= 2 * n * cfg.eta(k)


def test_eta_schedule():
    cfg = SolverConfig(alpha=0.1, mu=0.5, theta=0.5, eta0=3.0)
    assert cfg.eta(0) == 3.0
    assert cfg.eta(1) == pytest.approx(1.0)
    assert cfg.eta(4) == pytest.approx(4.0 ** (-1.5))
    assert cfg.eta(9) > cfg.eta(10)  # strictly decreasing


def test_inexact_budget_changes_steps_and_converges_with_budget():
    rng = np.random.Generator(np.random.Philox(79))
    n, m, p = 3, 10, 6
    A = rng.standard_normal((n, m, p))
    b = rng.standard_normal((n, m))
    lam = max(float(np.linalg.eigvalsh(A[i].T @ A[i])[-1]) for i in range(n))
    mu = 1.0 / lam
    problem = [
        DcFunction(f=LeastSquaresL1(A[i], b[i], 0.1), g=L1Norm(0.1)) for i in range(n)
    ]
    graph, weights = small_network(n, seed=14)
    y0 = gaussian_init(n, p, 31)

    def final(variant, budget=None):
        cfg = SolverConfig(
            alpha=0.01, mu=mu, outer_iters=10, variant=variant, inner_budget=budget
        )
        return run(problem, graph, weights, cfg, y0).y_final

    exact = final("consensus")
    crude = final("inexact", 1)
    rich = final("inexact", 400)
    assert np.linalg.norm(crude - exact) > np.linalg.norm(rich - exact)
    np.testing.assert_allclose(rich, exact, atol=1e-7)


def test_init_helpers():
    a = gaussian_init(3, 4, seed=5)
    b = gaussian_init(3, 4, seed=5)
    assert a.shape == (3, 4) and np.array_equal(a, b)
    assert not np.array_equal(a, gaussian_init(3, 4, seed=6))
    assert not zeros_init(2, 2).any()
