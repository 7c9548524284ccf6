import math

import numpy as np
import pytest

from hswnet.coherence import coherence_from_spectrum, h1_closed, h2_closed
from hswnet.dynamics import (
    SimConfig,
    default_noisy_config,
    estimate_h1,
    estimate_h2,
    noisy_pass,
    noisy_trial_means,
    simulate_delay,
    simulate_noiseless,
    trial_rng,
)
from hswnet.errors import SimulationError
from hswnet.graph import build_baseline
from hswnet.hsw import build_hsw
from hswnet.spectral import extremes, numeric_spectrum

K2 = build_baseline("complete", 2)
P3 = build_baseline("path", 3)
M22 = build_hsw(2, 2).graph


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("kwargs", [
    dict(dt=0, steps=10),
    dict(dt=0.1, steps=10, burn_in=10),
    dict(dt=0.1, steps=10, trials=0),
    dict(dt=0.1, steps=10, eps=-1),
    dict(dt=0.1, steps=10, seed=2**64),
    dict(dt=0.1, steps=10, method="leapfrog"),
])
def test_config_rejects(kwargs):
    with pytest.raises(SimulationError):
        SimConfig(**kwargs)


# ---------------------------------------------------------------------------
# noiseless
# ---------------------------------------------------------------------------

def test_k2_converges_to_average():
    tr = simulate_noiseless(K2, [0.0, 2.0], SimConfig(dt=0.01, steps=2000))
    assert tr.converged
    np.testing.assert_allclose(tr.states[-1], [1.0, 1.0], atol=1e-8)


@pytest.mark.parametrize("method", ["euler", "rk4"])
def test_k2_matches_exponential(method):
    errs = []
    for dt in (0.02, 0.01):
        tr = simulate_noiseless(K2, [0.0, 2.0], SimConfig(dt=dt, steps=round(3 / dt), method=method))
        exact = -2 * np.exp(-2 * tr.times)
        errs.append(np.max(np.abs(tr.states[:, 0] - tr.states[:, 1] - exact)))
    if method == "euler":
        # first order: error <= C dt and halves with dt
        assert errs[0] < 0.02 * 2 and errs[1] / errs[0] == pytest.approx(0.5, abs=0.05)
    else:
        assert errs[1] < 1e-8


def test_m22_converges_at_lambda2_rate():
    x0 = np.random.default_rng(11).normal(size=7)
    dt = 0.01
    tr = simulate_noiseless(M22, x0, SimConfig(dt=dt, steps=4000))
    assert tr.converged
    np.testing.assert_allclose(tr.states[-1], x0.mean(), atol=1e-8)
    dev0 = np.linalg.norm(x0 - x0.mean())
    dev = np.linalg.norm(tr.states - tr.states.mean(axis=1, keepdims=True), axis=1)
    # every Euler mode factor |1 - dt lambda| is at most 1 - dt <= exp(-dt)
    assert np.all(dev <= dev0 * np.exp(-tr.times) * (1 + 1e-12) + 1e-13)
    # ... and the late-time decay rate is that mode's, not faster
    late = (tr.times > 10) & (tr.times < 20)
    slope = np.polyfit(tr.times[late], np.log(tr.disagreement[late]), 1)[0]
    assert slope == pytest.approx(-math.log(1 - dt) / dt * -1, rel=0.01)


def test_noiseless_conserves_mean():
    x0 = np.random.default_rng(5).uniform(-3, 3, 7)
    tr = simulate_noiseless(M22, x0, SimConfig(dt=0.05, steps=1000))
    assert tr.max_mean_step <= 1e-12
    assert np.max(np.abs(tr.states.mean(axis=1) - x0.mean())) <= 1e-12


def test_noiseless_rejects_unstable_dt():
    # lambda_N(M_2^2) = 7, so dt = 0.3 gives dt*lambda_N = 2.1
    with pytest.raises(SimulationError):
        simulate_noiseless(M22, np.zeros(7), SimConfig(dt=0.3, steps=10))


def test_noiseless_record_every():
    tr = simulate_noiseless(K2, [0.0, 1.0], SimConfig(dt=0.1, steps=25, record_every=10))
    np.testing.assert_allclose(tr.times, [0, 1.0, 2.0, 2.5])


# ---------------------------------------------------------------------------
# delay
# ---------------------------------------------------------------------------

def test_star3_threshold():
    star = build_baseline("star", 3)
    assert extremes(numeric_spectrum(star)).eps_max == pytest.approx(math.pi / 6)
    ok = simulate_delay(star, [0.0, 1.0, 2.0], SimConfig(dt=0.001, steps=60000, eps=0.25))
    assert ok.converged and not ok.diverged
    bad = simulate_delay(star, [0.0, 1.0, 2.0], SimConfig(dt=0.001, steps=200000, eps=1.1))
    assert bad.diverged and not bad.converged


@pytest.mark.parametrize("graph", [K2, P3, build_baseline("cycle", 5), build_baseline("complete", 4), M22],
                         ids=["K2", "P3", "C5", "K4", "M22"])
def test_delay_bracket(graph):
    eps_max = extremes(numeric_spectrum(graph)).eps_max
    x0 = np.random.default_rng(2).normal(size=graph.n)
    for factor, expect_converge in ((0.5, True), (2.0, False)):
        eps = factor * eps_max
        dt = eps / 100
        # growth at twice the threshold can be slow; the run stops early once it blows up
        tr = simulate_delay(graph, x0, SimConfig(dt=dt, steps=round(400 / dt), eps=eps))
        assert tr.converged is expect_converge
        assert tr.diverged is (not expect_converge)


def test_delay_conserves_mean():
    x0 = np.arange(7.0)
    tr = simulate_delay(M22, x0, SimConfig(dt=0.001, steps=5000, eps=0.05))
    assert tr.max_mean_step <= 1e-12


def test_small_delay_approaches_noiseless():
    x0 = np.array([0.0, 1.0, 3.0])
    dt = 1e-3
    diffs = []
    for slots in (20, 40):
        eps = slots * dt
        d = simulate_delay(P3, x0, SimConfig(dt=dt, steps=3000, eps=eps))
        n = simulate_noiseless(P3, x0, SimConfig(dt=dt, steps=3000))
        diffs.append(np.max(np.abs(d.states - n.states)))
    # difference shrinks proportionally to the delay
    assert diffs[0] < diffs[1] and diffs[0] < 0.05
    assert diffs[1] / diffs[0] == pytest.approx(2, rel=0.2)


@pytest.mark.parametrize("eps,dt", [(0.105, 0.01), (0.1, 0.01), (0.0, 0.01)])
def test_delay_grid_checks(eps, dt):
    # 10.5 slots: off grid; 10 slots: too coarse; eps = 0: not a delay
    with pytest.raises(SimulationError):
        simulate_delay(P3, [0, 1, 2], SimConfig(dt=dt, steps=100, eps=eps))


def test_delay_trace_csv():
    tr = simulate_delay(K2, [0.0, 1.0], SimConfig(dt=0.01, steps=3, eps=0.2))
    lines = tr.to_csv().splitlines()
    assert lines[0] == "t,x_0,x_1,disagreement"
    assert len(lines) == 5


# ---------------------------------------------------------------------------
# noisy
# ---------------------------------------------------------------------------

def test_trial_streams_independent():
    a = trial_rng(7, 0).standard_normal(5)
    b = trial_rng(7, 1).standard_normal(5)
    assert not np.allclose(a, b)
    np.testing.assert_array_equal(a, trial_rng(7, 0).standard_normal(5))


def test_trial_results_do_not_depend_on_batch():
    cfg3 = SimConfig(dt=0.05, steps=600, burn_in=200, trials=3, seed=9)
    cfg5 = SimConfig(dt=0.05, steps=600, burn_in=200, trials=5, seed=9)
    m3 = noisy_trial_means(K2, cfg3, 1)
    m5 = noisy_trial_means(K2, cfg5, 1)
    assert m3.tobytes() == m5[:3].tobytes()


def test_noisy_bit_reproducible():
    cfg = SimConfig(dt=0.05, steps=800, burn_in=400, trials=4, seed=123)
    assert estimate_h1(P3, cfg) == estimate_h1(P3, cfg)
    assert estimate_h2(P3, cfg) == estimate_h2(P3, cfg)


def test_h1_k2():
    cfg = default_noisy_config(K2, 1, trials=200, seed=3)
    est, err = estimate_h1(K2, cfg)
    assert noisy_pass(est, err, 0.125)


def test_h2_k2():
    cfg = default_noisy_config(K2, 2, trials=200, seed=3)
    est, err = estimate_h2(K2, cfg)
    assert noisy_pass(est, err, 0.0625)


def test_h1_p3_and_m22():
    for graph, target in ((P3, 2 / 9), (M22, h1_closed(2, 2))):
        est, err = estimate_h1(graph, default_noisy_config(graph, 1, trials=200, seed=4))
        assert noisy_pass(est, err, target)


def test_h2_p3_and_m22():
    for graph, target in ((P3, 5 / 27), (M22, h2_closed(2, 2))):
        est, err = estimate_h2(graph, default_noisy_config(graph, 2, trials=200, seed=4))
        assert noisy_pass(est, err, target)


def test_halving_dt_reduces_bias():
    # per mode the Euler-Maruyama stationary variance is 1/(lambda (2 - dt lambda)),
    # so the estimate sits above H1 by a factor that shrinks with dt
    target = coherence_from_spectrum(numeric_spectrum(K2), 1)
    ests = []
    for dt in (0.2, 0.1):
        burn = round(10 / dt)
        cfg = SimConfig(dt=dt, steps=burn + round(400 / dt), burn_in=burn, trials=200, seed=17)
        ests.append(estimate_h1(K2, cfg)[0])
    assert ests[0] > ests[1] > target * 0.98
    assert abs(ests[1] - target) < abs(ests[0] - target)
    # K_2: one mode, lambda = 2, spread over n = 2 vertices
    assert ests[0] == pytest.approx(1 / (2 * (2 - 0.2 * 2)) / 2, rel=0.03)


def test_noisy_rejects_bad_configs():
    lam_n = 7
    with pytest.raises(SimulationError):
        estimate_h1(M22, SimConfig(dt=2.5 / lam_n, steps=2000, burn_in=1000, trials=2))
    with pytest.raises(SimulationError):
        # burn-in of 1 time unit: exp(-1) > 1e-3
        estimate_h1(M22, SimConfig(dt=0.01, steps=2000, burn_in=100, trials=2))
    with pytest.raises(SimulationError):
        estimate_h2(M22, SimConfig(dt=0.01, steps=2000, burn_in=100, trials=2))
    with pytest.raises(SimulationError):
        estimate_h1(M22, SimConfig(dt=0.01, steps=3000, burn_in=2000, trials=200_000))


def test_second_order_stability_check():
    # lambda = 2: roots -1 +- i, so |1 + dt s|^2 = 1 - 2 dt + 2 dt^2 reaches 1 at dt = 1
    with pytest.raises(SimulationError):
        estimate_h2(K2, SimConfig(dt=1.0, steps=100, burn_in=50, trials=2))
    estimate_h2(K2, SimConfig(dt=0.9, steps=100, burn_in=50, trials=2))
