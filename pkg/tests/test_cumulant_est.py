import numpy as np
import pytest
from hypothesis import given, strategies as st

from cumsense.c3cs import kron_mapped
from cumsense.cumulant_est import (
    StationaryCumulant,
    analytic_harmonic_slice,
    analytic_ma_cumulant,
    analytic_ma_slice,
    block_lag_cross_moments,
    empirical_stationary_cumulant,
    empirical_third_moment_vector,
    mse,
)
from cumsense.mapping import build_P, build_T, compress_to_principal, expand
from cumsense.sampler import compress, gaussian_sampler
from cumsense.signal_gen import DEFAULT_HARMONICS, DEFAULT_MA3, BlockStream, MaModel, generate_ma_blocks

C000 = 2 * (1 + 0.9 ** 3 + 0.385 ** 3 + (-0.771) ** 3)


def test_third_moment_examples():
    assert empirical_third_moment_vector([[1.0, 2.0]], demean=False).tolist() == [1, 2, 2, 4, 2, 4, 4, 8]
    v = empirical_third_moment_vector([[1.5, 0.0, 0.0]], demean=False)
    assert v[0] == 1.5 ** 3 and not np.any(v[1:])
    with pytest.raises(ValueError):
        empirical_third_moment_vector(np.zeros((0, 3)))


def test_auto_demean_only_when_significant():
    r = np.random.default_rng(0)
    x = r.standard_normal((4000, 3))
    assert np.array_equal(empirical_third_moment_vector(x), empirical_third_moment_vector(x, demean=False))
    shifted = x + 5.0
    np.testing.assert_allclose(empirical_third_moment_vector(shifted),
                               empirical_third_moment_vector(shifted, demean=True))


@given(st.integers(0, 2 ** 31))
def test_third_moment_permutation_invariant(seed):
    x = np.random.default_rng(seed).standard_normal((7, 4))
    m = empirical_third_moment_vector(x, demean=False).reshape(4, 4, 4)
    for perm in [(0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)]:
        assert np.array_equal(m, m.transpose(perm))


def test_ma3_diagonal_near_oracle():
    m = empirical_third_moment_vector(generate_ma_blocks(DEFAULT_MA3, 20, 10000, 1)).reshape(20, 20, 20)
    assert np.mean(np.diagonal(np.diagonal(m))) == pytest.approx(C000, rel=0.05)
    assert m[5, 5, 5] == pytest.approx(C000, rel=0.15)


def test_analytic_oracle():
    c = analytic_ma_cumulant(DEFAULT_MA3, 20)
    assert c.at(0, 0) == pytest.approx(C000, rel=1e-12)
    assert c.at(0, 0) == pytest.approx(2.6555, abs=1e-4)
    assert c.at(1, 2) == c.at(2, 1)
    assert c.at(4, 0) == 0.0 and c.at(0, -4) == 0.0 and c.at(2, 6) == 0.0
    assert c.symmetry_defect() < 1e-12


def test_stationary_cumulant_shape_and_support():
    with pytest.raises(ValueError):
        StationaryCumulant(3, np.zeros((4, 4)))
    c = StationaryCumulant(3, np.ones((5, 5)))
    assert c.at(2, -2) == 0.0 and c.at(2, 1) == 1.0 and c.at(3, 0) == 0.0
    assert len(list(c.rows())) == 19


def test_empirical_stationary_examples():
    assert not np.any(empirical_stationary_cumulant(np.zeros((10, 6))).values)
    est = empirical_stationary_cumulant(generate_ma_blocks(DEFAULT_MA3, 20, 10000, 2))
    truth = analytic_ma_cumulant(DEFAULT_MA3, 20)
    # relative L2 error on the vectorised N^3 tensor
    T = build_T(20)
    assert mse(expand(est.hexagon_vector(), T), expand(truth.hexagon_vector(), T)) < 0.1 ** 2
    assert est.symmetry_defect() < 1e-12
    w = empirical_stationary_cumulant(generate_ma_blocks(MaModel((1.0,), "gaussian"), 10, 10000, 3))
    assert np.max(np.abs(w.values)) < 0.05


def test_compressed_moments_converge():
    N, M = 10, 7
    Phi = gaussian_sampler(M, N, 4)
    y = compress(Phi, generate_ma_blocks(DEFAULT_MA3, N, 10000, 5))
    expect = kron_mapped(Phi, build_P(N)) @ compress_to_principal(analytic_ma_cumulant(DEFAULT_MA3, N))
    got = empirical_third_moment_vector(y)
    assert np.linalg.norm(got - expect) / np.linalg.norm(expect) < 0.15


def test_block_lag_cross_moments_layout():
    y = np.arange(12.0).reshape(6, 2)
    v = block_lag_cross_moments(y, 1, demean=False)
    assert v.size == 9 * 8
    # first lag block is (t1, t2) = (1, 1): E{y[k] y[k+1] y[k+1]}
    expect = np.einsum("ki,kj,kl->ijl", y[:5], y[1:], y[1:]).ravel() / 5
    np.testing.assert_allclose(v[:8], expect)
    # centre block is (0, 0)
    np.testing.assert_allclose(v[4 * 8:5 * 8], np.einsum("ki,kj,kl->ijl", y, y, y).ravel() / 6)
    with pytest.raises(ValueError):
        block_lag_cross_moments(y[:2], 1)


def test_mse_examples():
    t = np.array([1.0, -2.0, 3.0])
    assert mse(t, t) == 0.0
    assert mse(np.zeros(3), t) == 1.0
    assert mse(2 * t, t) == 1.0
    with pytest.raises(ValueError):
        mse(t, np.zeros(3))
    with pytest.raises(ValueError):
        mse(t, np.ones(2))


def test_analytic_slices():
    s3 = analytic_ma_slice(DEFAULT_MA3, 3, 8)
    assert s3[7] == pytest.approx(C000)
    c = analytic_ma_cumulant(DEFAULT_MA3, 8)
    np.testing.assert_allclose(s3, [c.at(t, t) for t in range(-7, 8)])
    s2 = analytic_harmonic_slice(DEFAULT_HARMONICS, 2, 16)
    assert s2[15] == pytest.approx(1.0)
    assert not np.any(analytic_harmonic_slice(DEFAULT_HARMONICS, 3, 16))
    assert analytic_harmonic_slice(DEFAULT_HARMONICS, 4, 16)[15] == pytest.approx(-0.75)
    with pytest.raises(ValueError):
        analytic_harmonic_slice(DEFAULT_HARMONICS, 5, 16)
