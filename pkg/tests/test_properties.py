import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

import oracles
from corrbreak.bootstrap import bootstrap_paths
from corrbreak.classical import cusum_statistic, zero_statistic
from corrbreak.conventions import lag_products
from corrbreak.relevant import cusum_process, relevant_statistic
from corrbreak.smoothing import local_linear
from corrbreak.varbreak import contrast_path

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
vectors = st.integers(12, 60).flatmap(lambda n: arrays(float, n, elements=finite))
scales = st.floats(0.01, 100).flatmap(lambda a: st.sampled_from([a, -a]))


@settings(max_examples=50, deadline=None)
@given(vectors, scales, finite)
def test_local_linear_is_affine_equivariant(y, a, c):
    level, _ = local_linear(y, 0.4)
    moved, _ = local_linear(a * y + c, 0.4)
    np.testing.assert_allclose(moved, a * level + c, atol=1e-7 * (1 + abs(a) * np.abs(y).max() + abs(c)))


@settings(max_examples=50, deadline=None)
@given(vectors, finite)
def test_cusum_ignores_level_shift(w, c):
    assert np.isclose(cusum_statistic(w + c), cusum_statistic(w), atol=1e-8 * (1 + abs(c)) * w.size)


@settings(max_examples=50, deadline=None)
@given(vectors, scales)
def test_statistics_are_absolutely_homogeneous(w, a):
    assert np.isclose(cusum_statistic(a * w), abs(a) * cusum_statistic(w), rtol=1e-9, atol=1e-9)
    assert np.isclose(zero_statistic(a * w), abs(a) * zero_statistic(w), rtol=1e-9, atol=1e-9)
    assert np.isclose(relevant_statistic(a * w, 0.5), a * a * relevant_statistic(w, 0.5), rtol=1e-9, atol=1e-9)


@settings(max_examples=50, deadline=None)
@given(vectors)
def test_cusum_process_matches_oracle(w):
    np.testing.assert_allclose(cusum_process(w), oracles.V(w), atol=1e-9 * (1 + np.abs(w).sum()))


@settings(max_examples=30, deadline=None)
@given(vectors, st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_bootstrap_paths_linear_in_multipliers(w, m, seed):
    rng = np.random.default_rng(seed)
    R1, R2 = rng.standard_normal((2, w.size - m + 1))
    lhs = bootstrap_paths(w, m, 2 * R1 - R2)
    rhs = 2 * bootstrap_paths(w, m, R1) - bootstrap_paths(w, m, R2)
    np.testing.assert_allclose(lhs, rhs, atol=1e-8 * (1 + np.abs(w).sum()))
    np.testing.assert_allclose(bootstrap_paths(w, m, R1), oracles.phi_path(w, m, R1),
                               atol=1e-8 * (1 + np.abs(w).sum()))


@settings(max_examples=50, deadline=None)
@given(vectors, st.floats(0.1, 10), st.integers(1, 5))
def test_lag_products_scale_free(e, c, k):
    v = np.ones_like(e)
    np.testing.assert_allclose(lag_products(c * e, c * c * v, k), lag_products(e, v, k), atol=1e-9 * (1 + e @ e))


@settings(max_examples=50, deadline=None)
@given(vectors, st.integers(2, 5))
def test_contrast_path_matches_oracle(sq, L):
    sq = np.abs(sq)
    ref = [oracles.contrast(sq, L, i) for i in range(L, sq.size - L + 2)]
    np.testing.assert_allclose(contrast_path(sq, L), ref, atol=1e-9 * (1 + sq.sum()))
