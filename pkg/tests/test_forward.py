import math

import numpy as np
import pytest

from flowhjm.basis import eval_basis, eval_curve, gauss_legendre
from flowhjm.forward import (
    CurveSimulator,
    ContractSpec,
    NoiseSpec,
    drift_value,
    flow_forward_price,
    sample_payoff,
    sample_payoffs,
    simulate_log_forward,
)

C = ContractSpec()
ONE = NoiseSpec.one_dim()
MULTI = NoiseSpec.multi_dim(7, 100)
TAU = 1 / 12


def test_specs_validate():
    with pytest.raises(ValueError):
        NoiseSpec("one-dim", dim=3)
    with pytest.raises(ValueError):
        NoiseSpec.multi_dim(7, 0)
    with pytest.raises(ValueError):
        NoiseSpec("jumpy")
    with pytest.raises(ValueError):
        ContractSpec(tau=0.2, t1=0.1, t2=0.3)
    with pytest.raises(ValueError):
        ContractSpec(strike=0.0)
    with pytest.raises(ValueError):
        ContractSpec(quad_points=1)
    assert C.tau == C.t1 == TAU and C.t2 == 2 / 12 and C.strike == 1.0 and C.rate == 0.0


def test_drift_one_dim():
    assert drift_value(ONE, 0.0) == -0.5
    assert drift_value(ONE, 3.3) == -0.5


def test_drift_multi_dim():
    assert drift_value(MULTI, 0.0) == pytest.approx(-0.5, abs=1e-15)
    expected = -0.5 * sum(eval_basis(i, 1.0) ** 2 for i in range(1, 8))
    assert drift_value(MULTI, 1.0) == pytest.approx(expected, rel=1e-14)


def test_one_dim_zero_curve_zero_draw():
    grid = [0.0, 0.03, 0.1]
    y = simulate_log_forward(np.zeros(7), ONE, C, grid, normals=[0.0])
    np.testing.assert_allclose(y, -TAU / 2, atol=1e-15)


def test_one_dim_level_only():
    x = np.zeros(7)
    x[0] = 0.37
    y = simulate_log_forward(x, ONE, C, [0.0, 0.5], normals=[0.0])
    np.testing.assert_allclose(y, 0.37 - TAU / 2, atol=1e-15)


def test_one_dim_exact_formula():
    rng = np.random.default_rng(3)
    x = rng.uniform(-0.5, 0.5, 7)
    grid = np.array([0.0, 0.02, 0.07])
    z = 0.8
    y = simulate_log_forward(x, ONE, C, grid, normals=[z])
    expected = [
        x[0] - TAU / 2 + z * math.sqrt(TAU) + sum(x[k] * eval_basis(k + 1, g + TAU) for k in range(1, 7))
        for g in grid
    ]
    np.testing.assert_allclose(y, expected, atol=1e-14)


def test_multi_dim_drift_sum_by_hand():
    L = 100
    ds = TAU / L
    hand = 0.0
    for j in range(1, L + 1):
        for i in range(1, 8):
            hand += eval_basis(i, TAU - j * ds) ** 2 * ds
    hand *= -0.5
    y = simulate_log_forward(np.zeros(7), MULTI, C, [0.0], normals=np.zeros(7 * L))
    assert y[0] == pytest.approx(hand, rel=1e-12)


def test_multi_dim_noise_loading_by_hand():
    # unit increment of B_3 in the last step moves Y(xi) by e_3(xi) sqrt(ds)
    L = 100
    z = np.zeros((7, L))
    z[2, L - 1] = 1.0
    grid = np.array([0.0, 0.05])
    base = simulate_log_forward(np.zeros(7), MULTI, C, grid, normals=np.zeros(7 * L))
    y = simulate_log_forward(np.zeros(7), MULTI, C, grid, normals=z.ravel())
    np.testing.assert_allclose(y - base, eval_basis(3, grid) * math.sqrt(TAU / L), atol=1e-15)


def test_simulate_errors():
    with pytest.raises(ValueError):
        simulate_log_forward(np.zeros(7), ONE, C, [], normals=[0.0])
    with pytest.raises(ValueError):
        simulate_log_forward(np.zeros(7), ONE, C, [0.0], normals=[0.0, 1.0])
    with pytest.raises(ValueError):
        simulate_log_forward(np.zeros(7), ONE, C, [0.0])
    with pytest.raises(ValueError):
        CurveSimulator(NoiseSpec.multi_dim(5), C, [0.0], n_basis=7)


def test_flow_forward_constant_curves():
    assert flow_forward_price(np.zeros(64), C) == pytest.approx(1.0, abs=1e-14)
    assert flow_forward_price(np.full(64, 0.3), C) == pytest.approx(math.exp(0.3), rel=1e-14)


def test_flow_forward_decaying_curve():
    nodes, _ = C.delivery_grid()
    val = flow_forward_price(-nodes, C)
    assert val == pytest.approx(12 * (1 - math.exp(-1 / 12)), rel=1e-13)
    assert val == pytest.approx(0.95947, abs=1e-5)


def test_flow_forward_grid_mismatch():
    with pytest.raises(ValueError):
        flow_forward_price(np.zeros(10), C)


def test_delivery_grid_for_general_contract():
    c = ContractSpec(tau=0.05, t1=0.1, t2=0.3)
    nodes, wts = c.delivery_grid()
    assert nodes.min() > 0.05 and nodes.max() < 0.25
    assert wts.sum() == pytest.approx(1.0, abs=1e-14)


def test_payoff_out_of_the_money():
    assert sample_payoff(np.zeros(7), ONE, C, normals=[-2.0]) == 0.0


def test_payoff_flat_curve_forced_to_two():
    # B(tau) = tau/2 + ln 2 gives F = exp(B - tau/2) = 2
    z = (TAU / 2 + math.log(2)) / math.sqrt(TAU)
    assert sample_payoff(np.zeros(7), ONE, C, normals=[z]) == pytest.approx(1.0, abs=1e-13)


def test_payoff_level_shift():
    x = np.zeros(7)
    x[0] = 0.3
    val = sample_payoff(x, ONE, C, normals=[0.0])
    assert val == pytest.approx(math.exp(0.3 - 1 / 24) - 1, rel=1e-13)
    assert val == pytest.approx(0.295, abs=1e-3)


def test_payoff_discounting():
    c = ContractSpec(rate=0.05)
    x = np.zeros(7)
    x[0] = 0.3
    val = sample_payoff(x, ONE, c, normals=[0.0])
    assert val == pytest.approx(math.exp(-0.05 * TAU) * (math.exp(0.3 - 1 / 24) - 1), rel=1e-13)


def test_shared_noise_across_grid():
    # one-dim: Y(xi) - Y(xi') is draw independent
    x = np.random.default_rng(1).uniform(-0.5, 0.5, 7)
    grid = [0.0, 0.04, 0.09]
    a = simulate_log_forward(x, ONE, C, grid, rng=np.random.default_rng(5))
    b = simulate_log_forward(x, ONE, C, grid, rng=np.random.default_rng(6))
    assert a[0] != b[0]
    np.testing.assert_allclose(np.diff(a), np.diff(b), atol=1e-14)


def test_multi_dim_single_draw_shared():
    # with one shared draw the xi-profile is smooth; independent per-point noise would not be
    x = np.zeros(7)
    grid = np.linspace(0, 0.08, 9)
    y = simulate_log_forward(x, MULTI, C, grid, rng=np.random.default_rng(2))
    normals = np.random.default_rng(2).standard_normal((1, 700))
    expected = CurveSimulator(MULTI, C, grid).simulate(x[None], normals=normals)[0]
    np.testing.assert_array_equal(y, expected)


def test_determinism():
    x = np.random.default_rng(1).uniform(-0.5, 0.5, 7)
    for spec in (ONE, MULTI):
        a = sample_payoff(x, spec, C, rng=np.random.default_rng(11))
        b = sample_payoff(x, spec, C, rng=np.random.default_rng(11))
        assert a == b


def test_batch_payoffs_match_single():
    X = np.random.default_rng(4).uniform(-0.5, 0.5, (3, 7))
    batch = sample_payoffs(X, MULTI, C, np.random.default_rng(8))
    z = np.random.default_rng(8).standard_normal((3, 700))
    single = [sample_payoff(X[i], MULTI, C, normals=z[i]) for i in range(3)]
    np.testing.assert_allclose(batch, single, rtol=1e-13)


def test_martingale_one_dim_small():
    x = np.random.default_rng(9).uniform(-0.5, 0.5, 7)
    grid = np.array([0.0, 1 / 24])
    sim = CurveSimulator(ONE, C, grid)
    y = sim.simulate(np.tile(x, (100_000, 1)), rng=np.random.default_rng(0))
    fx = np.exp(y)
    mean, se = fx.mean(axis=0), fx.std(axis=0, ddof=1) / math.sqrt(len(fx))
    target = np.exp(eval_curve(x, grid + TAU))
    assert np.all(np.abs(mean - target) < 4 * se)


def test_multi_dim_discrete_law_is_martingale():
    # drift and noise use the same right endpoints, so E exp(Y) is exact for every L
    grid = np.array([0.0, 0.05])
    x = np.random.default_rng(2).uniform(-0.5, 0.5, 7)
    for L in (3, 50):
        sim = CurveSimulator(NoiseSpec.multi_dim(7, L), C, grid)
        var = np.sum(sim.loadings**2, axis=0)
        log_mean = sim.deterministic(x)[0] + 0.5 * var
        np.testing.assert_allclose(log_mean, eval_curve(x, grid + TAU), atol=1e-14)
