import json
import math

import numpy as np
import pytest

import oracles
from corrbreak import kernels
from corrbreak.bootstrap import (BootstrapConfig, block_sums, bootstrap_paths, centered_blocks,
                                 critical_value, order_index, p_value)
from corrbreak.classical import cusum_statistic, run_classical_test, zero_statistic
from corrbreak.errors import DataError, InsufficientLength, WindowTooLarge
from corrbreak.io import dumps
from corrbreak.simulation import simulate


def test_cusum_hand_example():
    assert cusum_statistic([1, 2, 3, 0]) == 1.5


def test_zero_statistic_hand_example():
    assert zero_statistic([1, -1, 1, -1]) == 1.0
    assert zero_statistic(np.zeros(7)) == 0.0


def test_cusum_constant_interior_is_zero():
    assert cusum_statistic(np.full(50, 0.3)) == pytest.approx(0.0, abs=1e-12)


def test_zero_and_cusum_not_comparable():
    drift = -np.ones(10)
    assert zero_statistic(drift) > cusum_statistic(drift)
    tent = np.r_[np.ones(5), -np.ones(5)]
    assert cusum_statistic(tent) == zero_statistic(tent)
    # and the other way round when the series drifts back to zero
    bump = np.r_[np.ones(5), -np.ones(5)] + 0.5
    assert cusum_statistic(bump) < zero_statistic(bump)


def test_cusum_matches_naive_oracle():
    rng = np.random.default_rng(2)
    p = rng.standard_normal((2, 150))
    dev = np.array([oracles.cusum_deviations(p[u]) for u in range(2)])
    ref = np.sqrt((dev**2).sum(axis=0)).max()
    assert cusum_statistic(p) == pytest.approx(ref, abs=1e-12)


def test_phi_hand_example():
    phi = bootstrap_paths([1, 0, 2, 0, 1], 2, np.ones(4))
    np.testing.assert_allclose(phi, [-0.6, -0.2, 0.2, -0.4] / np.sqrt(8), atol=1e-12)
    np.testing.assert_allclose(phi, [-0.2121320, -0.0707107, 0.0707107, -0.1414214], atol=1e-7)
    np.testing.assert_allclose(block_sums([1, 0, 2, 0, 1], 2), [1, 2, 2, 1])


def test_phi_zero_multipliers():
    np.testing.assert_array_equal(bootstrap_paths(np.arange(10.0), 3, np.zeros(8)), 0.0)


@pytest.mark.parametrize("m", [2, 5, 13])
def test_phi_matches_naive_oracle(m):
    rng = np.random.default_rng(m)
    w = rng.standard_normal(120)
    R = rng.standard_normal(120 - m + 1)
    np.testing.assert_allclose(bootstrap_paths(w, m, R), oracles.phi_path(w, m, R), atol=1e-12, rtol=0)


@pytest.mark.parametrize("zero", [False, True])
def test_bootstrap_maxima_match_naive_oracle(zero):
    rng = np.random.default_rng(7)
    n, m, B = 90, 4, 5
    p = rng.standard_normal((2, n))
    R = rng.standard_normal((B, n - m + 1))
    got = kernels.classical_bootstrap(centered_blocks(p, m), R, m, n, zero)
    ref = [oracles.classical_max(p, m, R[r], zero) for r in range(B)]
    np.testing.assert_allclose(got, ref, atol=1e-12, rtol=0)


def test_phi_conditional_mean_is_zero():
    w = np.random.default_rng(1).standard_normal(200)
    B = 4000
    R = np.random.default_rng(2).standard_normal((B, 200 - 5 + 1))
    paths = np.array([bootstrap_paths(w, 5, r) for r in R])
    sd = paths.std(axis=0)
    assert np.all(np.abs(paths.mean(axis=0)) <= 4 * sd / math.sqrt(B) + 1e-12)


def test_order_statistic_and_p_value():
    sample = np.arange(1.0, 101.0)
    assert order_index(100, 0.05) == 95
    assert critical_value(sample, 0.05) == 95.0
    assert p_value(sample, 95.0) == pytest.approx(0.05)
    assert p_value(sample, 0.5) == 1.0
    assert p_value(sample, 1e9) == 0.0


def test_config_checks():
    with pytest.raises(DataError):
        BootstrapConfig(B=10).validate()
    with pytest.raises(DataError):
        BootstrapConfig(alpha=0.7).validate()
    with pytest.raises(WindowTooLarge):
        run_classical_test(simulate("I", 400, 0), boot=BootstrapConfig(B=100, window=201))


def test_length_guards():
    with pytest.raises(InsufficientLength):
        run_classical_test(simulate("I", 99, 0))
    with pytest.warns(UserWarning):
        run_classical_test(simulate("I", 150, 0), boot=BootstrapConfig(B=100))


def test_report_is_deterministic_and_consistent():
    s = simulate("I", 400, 3)
    boot = BootstrapConfig(B=300, seed=11)
    a = run_classical_test(s, (1, 2), boot=boot)
    b = run_classical_test(s, (1, 2), boot=boot)
    assert dumps(a.to_dict()) == dumps(b.to_dict())
    assert a.reject == (a.statistic > a.critical_value)
    assert a.rejects_at(0.05) == a.reject
    assert 0 <= a.p_value <= 1
    assert (a.p_value <= 0.05) == a.reject or abs(a.p_value - 0.05) < 1 / 300
    d = json.loads(dumps(a.to_dict()))
    assert d["mode"] == "constant-correlation" and [x["lag"] for x in d["per_lag"]] == [1, 2]


def test_zero_mode_detects_nonzero_correlation():
    rep = run_classical_test(simulate("III", 500, 1), mode="zero", boot=BootstrapConfig(B=300))
    assert rep.reject and rep.mode == "zero"


def test_strong_break_is_detected():
    from corrbreak.simulation import get_model

    rep = run_classical_test(simulate(get_model("Iprime", lam=0.6), 500, 2), boot=BootstrapConfig(B=300))
    assert rep.reject
