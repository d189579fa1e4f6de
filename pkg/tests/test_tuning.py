import numpy as np
import pytest

from corrbreak.errors import GridTooSmall
from corrbreak.simulation import simulate
from corrbreak.tuning import (MVConfig, Tuning, default_mv_grid, mv_window, prepare, probe_quantile,
                              window_cap)


def test_default_grid_at_500():
    assert window_cap(500) == 11
    assert default_mv_grid(500) == (4, 8, 11)


def test_grid_respects_bounds():
    for n in (100, 300, 1000, 5000):
        g = default_mv_grid(n)
        assert len(g) >= 3 and min(g) >= 2 and max(g) <= min(n / 2, window_cap(n))


def test_three_point_grid_forces_middle():
    p = np.random.default_rng(0).standard_normal((1, 500))
    assert mv_window(p, MVConfig(grid=(3, 6, 9))) == 6


def test_constant_quantiles_tie_to_smallest_interior():
    assert mv_window(np.zeros((1, 500)), MVConfig(grid=(3, 4, 5, 6, 7))) == 4


def test_grid_too_small():
    with pytest.raises(GridTooSmall):
        mv_window(np.zeros((1, 500)), MVConfig(grid=(3, 4)))
    with pytest.raises(GridTooSmall):
        mv_window(np.zeros((1, 500)), MVConfig(grid=(3, 4, 5), h=2))


def test_deterministic_given_seed():
    p = np.random.default_rng(1).standard_normal((2, 800))
    cfg = MVConfig(grid=(2, 4, 6, 8, 10, 12, 14))
    assert mv_window(p, cfg, seed=3) == mv_window(p, cfg, seed=3)
    assert probe_quantile(p, 4, 200, 0.95, 3) == probe_quantile(p, 4, 200, 0.95, 3)


def test_prepare_honours_overrides():
    s = simulate("II", 500, 0)
    prep = prepare(s, (1, 2), Tuning(mean_bandwidth=0.2, variance_break=250))
    assert prep.mean_fit.bandwidth == 0.2
    assert prep.variance_fit.break_index == 250
    assert prep.products.shape == (2, 500)
    smooth = prepare(s, (1,), Tuning(variance="smooth"))
    assert smooth.variance_fit.break_index is None


def test_unknown_variance_mode():
    with pytest.raises(ValueError):
        Tuning(variance="spline")


@pytest.mark.slow
def test_model_i_window_in_plausible_band():
    n = 500
    lo, hi = n ** (1 / 3) / 2, 3 * n ** (1 / 3)
    picks = [mv_window(prepare(simulate("I", n, k), (1,)).products, seed=k) for k in range(100)]
    assert np.mean([lo <= m <= hi for m in picks]) >= 0.9
