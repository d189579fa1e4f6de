import numpy as np
import pytest

import oracles
from corrbreak.conventions import Series
from corrbreak.errors import AllInfeasible, BandwidthTooSmall, EmptyGrid, SideTooShort
from corrbreak.simulation import c_scale, d_scale, get_model, simulate, simulate_errors
from corrbreak.tuning import prepare
from corrbreak.smoothing import (DEFAULT_GRID, fit_mean, fit_variance, gcv_bandwidth, gcv_score,
                                 kernel_value, local_linear, variance_grid)


@pytest.mark.parametrize("kind", ["epanechnikov", "quartic"])
def test_kernels_integrate_to_one(kind):
    x = np.linspace(-1, 1, 20001)
    assert np.trapezoid(kernel_value(x, kind), x) == pytest.approx(1.0, abs=1e-8)
    assert kernel_value(1.0, kind) == 0.0


def test_constant_input():
    level, slope = local_linear(np.full(50, 3.5), 0.2)
    np.testing.assert_allclose(level, 3.5, atol=1e-12)
    np.testing.assert_allclose(slope, 0.0, atol=1e-10)


@pytest.mark.parametrize("b", [0.075, 0.15, 0.3, 1.0])
def test_affine_reproduced_exactly(b):
    t = np.arange(1, 201) / 200
    fit = fit_mean(Series(2 + 3 * t), b)
    np.testing.assert_allclose(fit.mean, 2 + 3 * t, atol=1e-10)
    np.testing.assert_allclose(fit.slope, 3.0, atol=1e-8)
    np.testing.assert_allclose(fit.residuals, 0.0, atol=1e-10)


@pytest.mark.parametrize("kind", ["epanechnikov", "quartic"])
@pytest.mark.parametrize("n,b", [(20, 0.3), (57, 0.12), (150, 0.075)])
def test_matches_dense_oracle(kind, n, b):
    rng = np.random.default_rng(n)
    y = rng.standard_normal(n)
    t = np.arange(1, n + 1) / n
    level, slope = local_linear(y, b, kind)
    ref_level, ref_slope = oracles.dense_local_linear(t, y, b, kind)
    np.testing.assert_allclose(level, ref_level, atol=1e-10, rtol=0)
    np.testing.assert_allclose(slope, ref_slope, atol=1e-8, rtol=0)


def test_irregular_design_matches_oracle():
    rng = np.random.default_rng(3)
    t = np.sort(rng.uniform(size=40))
    y = rng.standard_normal(40)
    level, _ = local_linear(y, 0.3, t=t)
    np.testing.assert_allclose(level, oracles.dense_local_linear(t, y, 0.3)[0], atol=1e-10)


def test_too_small_bandwidth():
    with pytest.raises(BandwidthTooSmall):
        local_linear(np.arange(10.0), 0.05)


@pytest.mark.parametrize("b", [0.15, 0.3])
def test_gcv_matches_hat_matrix(b):
    rng = np.random.default_rng(11)
    n = 60
    y = np.sin(3 * np.arange(1, n + 1) / n) + rng.standard_normal(n)
    assert gcv_score(y, b) == pytest.approx(oracles.gcv(y, b), abs=1e-10, rel=1e-10)


def test_gcv_single_candidate_and_errors():
    y = np.random.default_rng(0).standard_normal(100)
    assert gcv_bandwidth(y, grid=[0.2]) == 0.2
    with pytest.raises(EmptyGrid):
        gcv_bandwidth(y, grid=[])
    with pytest.raises(AllInfeasible):
        gcv_bandwidth(y[:10], grid=[0.01, 0.02])


def test_gcv_tie_goes_to_smaller_bandwidth():
    # all-zero data: every bandwidth scores exactly 0
    assert gcv_bandwidth(np.zeros(100), grid=[0.3, 0.2, 0.1]) == 0.1


def _noise_selections(n=300, reps=200):
    return [gcv_bandwidth(np.random.default_rng(1000 + k).standard_normal(n)) for k in range(reps)]


@pytest.mark.slow
@pytest.mark.xfail(strict=True, reason="hat-trace GCV picks the grid maximum for pure noise "
                   "in about 2/3 of samples at every n, not 80%")
def test_gcv_oversmooths_pure_noise():
    assert sum(b == max(DEFAULT_GRID) for b in _noise_selections()) >= 160


@pytest.mark.slow
def test_gcv_grid_maximum_is_modal_for_pure_noise():
    sel = _noise_selections()
    values, counts = np.unique(sel, return_counts=True)
    assert values[np.argmax(counts)] == max(DEFAULT_GRID)
    assert counts.max() >= 0.5 * len(sel)


def test_variance_grid_cap():
    assert variance_grid(0.1) == [0.075]
    assert variance_grid(0.3)[-1] == 0.25
    assert variance_grid(0.05) == [pytest.approx(0.045)]


def test_variance_constant():
    e = np.tile([2.0, -2.0], 100)
    fit = fit_variance(e, 0.2)
    np.testing.assert_allclose(fit.variance, 4.0, atol=1e-10)


def test_variance_split_reproduces_affine_pieces():
    n, k = 200, 90
    t = np.arange(1, n + 1) / n
    target = np.where(np.arange(1, n + 1) <= k, 1 + 2 * t, 6 - t)
    fit = fit_variance(np.sqrt(target), 0.1, break_index=k)
    np.testing.assert_allclose(fit.variance, target, atol=1e-10)
    assert fit.break_index == k and len(fit.bandwidths) == 2


def test_variance_side_too_short():
    with pytest.raises(SideTooShort):
        fit_variance(np.ones(100), 0.2, break_index=30)


def test_variance_auto_bandwidth_fits_short_side():
    e = np.random.default_rng(4).standard_normal(500)
    fit = fit_variance(e, "auto", break_index=108, mean_bandwidth=0.3)
    assert all(np.ceil(2 * c * 500) <= side for c, side in zip(fit.bandwidths, (108, 392)))


def test_variance_positive_near_split():
    # a sharp drop at the edge of the right side drives the local linear
    # extrapolation negative; the fallback keeps it at a sensible level
    n, k = 400, 200
    e = np.ones(n)
    e[k:k + 10] = 0.0
    e[k + 10:] = 2.0
    fit = fit_variance(e, 0.1, break_index=k)
    assert fit.variance.min() > 0.1


@pytest.mark.slow
def test_variance_tracks_analytic_curve_model_ii():
    # relative error of the Monte Carlo mean curve, break estimated as in the tests
    n = 500
    t = np.arange(1, n + 1) / n
    truth = np.where(t <= 0.5, c_scale(t) ** 2, d_scale(t) ** 2) / (1 - 0.2**2)
    curves = [prepare(simulate("II", n, k), (1,)).variance_fit.variance for k in range(200)]
    rel = np.mean(curves, axis=0) / truth - 1
    interior = (t > 0.1) & (t < 0.9)
    assert np.abs(rel[interior]).max() < 0.25


def test_residuals_of_simulated_noise_free_model():
    m = get_model("I")
    n = 300
    e = simulate_errors(m, n, innovations=np.zeros(1000 + n))
    np.testing.assert_array_equal(e, 0.0)
