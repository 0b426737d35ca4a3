import math

import numpy as np
import pytest

import infoval


def test_sstar_hand_values():
    assert infoval.quantile_score_sstar(-1.0, -2.0, 0.1) == pytest.approx(-1.0 * 9.0 + 20.0)
    assert infoval.quantile_score_sstar(-1.0, 0.0, 0.1) == pytest.approx(1.0)


def test_es_identity_standard_normal():
    rng = np.random.default_rng(3)
    y = rng.standard_normal(400_000)
    q = -2.3263478740408408
    m = infoval.mean_sstar(np.full(y.size, q), y, 0.01)
    target = math.exp(-q * q / 2) / math.sqrt(2 * math.pi) / 0.01
    assert m == pytest.approx(target, rel=0.01)


def test_dm_test_identical_and_shifted():
    r = infoval.dm_test([0.0] * 100)
    assert r.identical_forecasts and r.p_value == 1.0
    z = np.random.default_rng(1).standard_normal(2000) + 0.5
    assert infoval.dm_test(z).rejects(0.01)


def test_garch_roundtrip():
    p = infoval.garch_preset(1)
    r, v = infoval.simulate_garch(p, 20000, 5)
    assert len(r) == len(v) == 20000
    assert np.var(r) == pytest.approx(p.unconditional_variance(), rel=0.15)
    fit = infoval.fit_garch(r)
    assert abs(fit["params"].beta - p.beta) < 0.05


def test_dcc_shape():
    x = infoval.simulate_dcc(1, 500, 2)
    assert x.shape == (500, 2)


def test_backtest_ideal():
    r, v = infoval.simulate_garch(infoval.garch_preset(1), 20000, 9)
    f = -2.3263478740408408 * np.sqrt(v)
    report = infoval.backtest(f, r, 0.01)
    assert report["empirical_rate"] == pytest.approx(0.01, abs=0.003)


def test_run_experiment_and_config_errors():
    text = "seed: 2\ndgp: {type: garch, preset: 1}\nalphas: [0.05]\nn: 20000\n"
    report = infoval.run_experiment(text)
    row = report["mean_scores"][0]
    assert row["m_F"] > row["m_G"]
    assert row["rel_diff"] == pytest.approx(row["diff"] / row["m_F"], abs=1e-12)
    with pytest.raises(infoval.ConfigError):
        infoval.run_experiment("bogus: 1\n")


def test_mixture_demo():
    m = infoval.mixture_demo(n=100_000)
    assert m["quantile_indistinguishable"]
    assert m["log_score_separates"]
