import numpy as np
import pytest

from corrbreak.conventions import Series, lag_products, rng_for, safe_ratio, validate_lags
from corrbreak.errors import DataError, NonPositiveVariance


def test_series_grid_and_immutability():
    s = Series([1.0, 2.0, 4.0, 8.0])
    assert s.n == 4
    np.testing.assert_allclose(s.t, [0.25, 0.5, 0.75, 1.0])
    with pytest.raises(ValueError):
        s.values[0] = 3.0


def test_series_segment_regrids():
    s = Series(np.arange(10.0))
    seg = s.segment(2, 6)
    np.testing.assert_array_equal(seg.values, [2, 3, 4, 5])
    np.testing.assert_allclose(seg.t, [0.25, 0.5, 0.75, 1.0])


@pytest.mark.parametrize("bad", [[1.0], [1.0, np.nan], [np.inf, 0.0]])
def test_series_rejects_bad_input(bad):
    with pytest.raises(DataError):
        Series(bad)


def test_safe_ratio_zero_over_zero_is_one():
    assert safe_ratio(0.0, 0.0) == 1.0
    np.testing.assert_allclose(safe_ratio([0, 2, 3], [0, 4, 0]), [1.0, 0.5, np.inf])


def test_lag_products_zero_residuals():
    np.testing.assert_array_equal(lag_products(np.zeros(5), np.full(5, 3.0), 2), np.zeros(5))


def test_lag_products_padding():
    np.testing.assert_array_equal(lag_products([1, 1, 1, 1], [1, 1, 1, 1], 1), [1, 1, 1, 0])


def test_lag_products_hand_example():
    out = lag_products([1, 2, -1, 3], [2, 2, 2, 2], 2)
    np.testing.assert_allclose(out, [-0.5, 3.0, 0.0, 0.0])


def test_lag_products_product_standardization():
    e = np.array([1.0, 2.0, 3.0])
    v = np.array([1.0, 4.0, 9.0])
    np.testing.assert_allclose(lag_products(e, v, 1, "product"), [2 / 2, 6 / 6, 0])


def test_lag_products_requires_positive_variance():
    with pytest.raises(NonPositiveVariance):
        lag_products([1, 2, 3], [1, 0, 1], 1)


def test_validate_lags():
    assert validate_lags([1, 2], 100) == (1, 2)
    for bad in ([], [2, 1], [1, 1], [0], [25]):
        with pytest.raises(DataError):
            validate_lags(bad, 100)


def test_rng_streams_are_reproducible_and_distinct():
    a = rng_for(7, 0).standard_normal(5)
    b = rng_for(7, 0).standard_normal(5)
    c = rng_for(7, 1).standard_normal(5)
    np.testing.assert_array_equal(a, b)
    assert not np.allclose(a, c)
