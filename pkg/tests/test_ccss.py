import numpy as np
import pytest
from hypothesis import given, strategies as st

from cumsense.ccss import (
    CumulantSlice,
    estimate_slice,
    estimate_slice_uncompressed,
    pair_table,
    slice_of_cumulant,
)
from cumsense.cumulant_est import StationaryCumulant, analytic_ma_cumulant, analytic_ma_slice
from cumsense.sampler import SparseRuler, compress, extend_ruler, ruler_sampler, solve_minimal_ruler
from cumsense.signal_gen import (
    DEFAULT_ARMA_NOISE,
    DEFAULT_MA3,
    BlockStream,
    MaModel,
    colored_gaussian_blocks,
    generate_ma_blocks,
)

R4 = SparseRuler(4, (0, 1, 3))


def test_single_pair_examples():
    y = np.array([[1.0, 2.0, 4.0]])
    assert estimate_slice(y, R4, 2).at(2) == 8.0
    assert estimate_slice(y, R4, 3).at(2) == 32.0
    # tau = 0 averages the three squares / cubes
    assert estimate_slice(y, R4, 2).at(0) == pytest.approx((1 + 4 + 16) / 3)


def test_pair_counts():
    s = estimate_slice(np.ones((2, 3)), R4, 2)
    assert s.pair_counts.tolist() == [1, 1, 1, 3, 1, 1, 1]
    assert np.all(s.pair_counts >= 1)
    _, _, _, counts = pair_table(solve_minimal_ruler(16))
    assert np.all(counts[15:] >= 1) and counts.size == 31


def test_errors():
    with pytest.raises(ValueError):
        estimate_slice(np.ones((2, 3)), R4, 5)
    with pytest.raises(ValueError):
        estimate_slice(np.ones((2, 4)), R4, 2)
    with pytest.raises(ValueError):
        estimate_slice(np.ones((2, 3)), R4, 4, correction="other")
    with pytest.raises(ValueError):
        CumulantSlice(3, 4, np.zeros(6))
    # a mark set that misses a lag cannot be turned into a ruler
    with pytest.raises(ValueError):
        SparseRuler(6, (0, 1, 5))


def test_white_noise_covariance_slice():
    r = np.random.default_rng(0)
    full = SparseRuler(8, tuple(range(8)))
    s = estimate_slice(r.standard_normal((10000, 8)), full, 2)
    expect = np.zeros(15)
    expect[7] = 1.0
    assert np.max(np.abs(s.values - expect)) < 0.05


def test_all_marks_matches_lag_averaged_autocovariance():
    r = np.random.default_rng(1)
    N = 6
    x = r.standard_normal((50, N))
    s = estimate_slice(x, SparseRuler(N, tuple(range(N))), 2)
    for tau in range(N):
        ref = np.mean([np.mean(x[:, n] * x[:, n + tau]) for n in range(N - tau)])
        assert s.at(tau) == pytest.approx(ref, rel=1e-12)
        assert s.at(-tau) == pytest.approx(ref, rel=1e-12)


@given(st.integers(0, 2 ** 31), st.sampled_from([2, 3, 4]), st.integers(4, 16), st.sampled_from(["global", "per_block"]))
def test_compressed_equals_uncompressed_bitwise(seed, q, N, correction):
    r = np.random.default_rng(seed)
    base = solve_minimal_ruler(N)
    ruler = extend_ruler(base, int(r.integers(base.size, N + 1)), seed)
    x = BlockStream(r.standard_normal((int(r.integers(1, 30)), N)))
    a = estimate_slice(compress(ruler_sampler(ruler), x), ruler, q, correction)
    b = estimate_slice_uncompressed(x, ruler, q, correction)
    assert np.array_equal(a.values, b.values)
    assert np.array_equal(a.pair_counts, b.pair_counts)


@given(st.integers(0, 2 ** 31))
def test_q2_slice_symmetric(seed):
    r = np.random.default_rng(seed)
    ruler = solve_minimal_ruler(10)
    s = estimate_slice(r.standard_normal((20, ruler.size)), ruler, 2)
    np.testing.assert_allclose(s.values, s.values[::-1], rtol=1e-12, atol=1e-14)


def test_ma_slices_converge():
    N = 12
    ruler = solve_minimal_ruler(N)
    x = generate_ma_blocks(DEFAULT_MA3, N, 20000, 4)
    y = compress(ruler_sampler(ruler), x)
    for q in (2, 3, 4):
        est = estimate_slice(y, ruler, q).values
        truth = analytic_ma_slice(DEFAULT_MA3, q, N)
        assert np.linalg.norm(est - truth) / np.linalg.norm(truth) < 0.15


def test_fourth_order_slice_of_gaussian_noise_vanishes():
    N = 16
    ruler = solve_minimal_ruler(N)
    v = colored_gaussian_blocks(DEFAULT_ARMA_NOISE, N, 10000, 2)
    v /= v.std()
    s = estimate_slice(compress(ruler_sampler(ruler), BlockStream(v)), ruler, 4)
    assert np.max(np.abs(s.values)) < 0.1


def test_per_block_correction_is_biased_for_single_pairs():
    # with one pair per lag the per-block product keeps a -2 sigma^4-scale bias
    N = 16
    ruler = solve_minimal_ruler(N)
    v = np.random.default_rng(3).standard_normal((20000, N))
    y = compress(ruler_sampler(ruler), BlockStream(v))
    glob = estimate_slice(y, ruler, 4, "global")
    per = estimate_slice(y, ruler, 4, "per_block")
    assert np.max(np.abs(glob.values)) < 0.1
    assert np.max(np.abs(per.values)) > 0.3


def test_slice_of_cumulant():
    c = analytic_ma_cumulant(DEFAULT_MA3, 8)
    s = slice_of_cumulant(c)
    assert s.q == 3 and s.at(0) == pytest.approx(2.6555, abs=1e-4)
    for t in range(-7, 8):
        assert s.at(t) == c.at(t, t)
    # (-t, -t) is the image (t1 - t2, -t2) of (0, t)
    for t in range(8):
        assert s.at(-t) == pytest.approx(c.at(0, t), abs=1e-12)
    assert not np.any(slice_of_cumulant(StationaryCumulant.zeros(5)).values)


def test_rows_and_lags():
    s = estimate_slice(np.ones((1, 3)), R4, 2)
    rows = list(s.rows())
    assert rows[0] == (-3, 1.0, 1) and len(rows) == 7
    with pytest.raises(IndexError):
        s.at(4)
    analytic = slice_of_cumulant(analytic_ma_cumulant(MaModel((1.0,)), 2))
    assert list(analytic.rows())[1] == (0, 2.0, 0)
