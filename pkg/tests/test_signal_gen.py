import numpy as np
import pytest

from cumsense.cumulant_est import analytic_ma_cumulant, third_moment_tensor
from cumsense.signal_gen import (
    DEFAULT_ARMA_NOISE,
    DEFAULT_HARMONICS,
    DEFAULT_MA3,
    DEFAULT_MA5_NOISE,
    ColoredNoiseModel,
    HarmonicModel,
    MaModel,
    colored_gaussian,
    colored_gaussian_blocks,
    generate_harmonic_blocks,
    generate_ma_blocks,
    measured_snr_db,
)


def test_model_validation():
    with pytest.raises(ValueError):
        MaModel(())
    with pytest.raises(ValueError):
        MaModel((0.0, 1.0))
    with pytest.raises(ValueError):
        MaModel((1.0,), "uniform")
    with pytest.raises(ValueError):
        HarmonicModel((0.2, 0.1))
    with pytest.raises(ValueError):
        HarmonicModel((0.6,))
    with pytest.raises(ValueError):
        ColoredNoiseModel((1.0,), (2.0, 1.0))


def test_driver_cumulants():
    assert DEFAULT_MA3.driver_skewness == 2.0
    assert DEFAULT_MA3.driver_cumulant(2) == 1.0
    assert DEFAULT_MA3.driver_cumulant(4) == 6.0
    assert MaModel((1.0,), "gaussian").driver_cumulant(3) == 0.0


def test_models_round_trip():
    for m in (DEFAULT_MA3, DEFAULT_HARMONICS, DEFAULT_ARMA_NOISE):
        assert type(m).from_dict(m.to_dict()) == m


def test_white_ma0_mean_vanishes():
    x = generate_ma_blocks(MaModel((1.0,), "gaussian"), 8, 20000, 1).blocks
    assert abs(x.mean()) < 0.01
    assert x.var() == pytest.approx(1.0, rel=0.02)


def test_ma3_third_moment_near_oracle():
    x = generate_ma_blocks(DEFAULT_MA3, 20, 10000, 7)
    est = np.mean(x.blocks ** 3)
    assert est == pytest.approx(analytic_ma_cumulant(DEFAULT_MA3, 20).at(0, 0), rel=0.05)


def test_determinism():
    a = generate_ma_blocks(DEFAULT_MA3, 20, 50, 3).blocks
    b = generate_ma_blocks(DEFAULT_MA3, 20, 50, 3).blocks
    assert np.array_equal(a, b)
    h1 = generate_harmonic_blocks(DEFAULT_HARMONICS, DEFAULT_ARMA_NOISE, 16, 30, 9).blocks
    h2 = generate_harmonic_blocks(DEFAULT_HARMONICS, DEFAULT_ARMA_NOISE, 16, 30, 9).blocks
    assert np.array_equal(h1, h2)
    assert not np.array_equal(a, generate_ma_blocks(DEFAULT_MA3, 20, 50, 4).blocks)


def test_contiguous_blocks_join_up():
    # the boundary pair of neighbouring blocks is one lag apart only in a contiguous stream
    h = np.asarray(DEFAULT_MA3.coefficients)
    r1 = float(np.sum(h[:-1] * h[1:]))
    cont = generate_ma_blocks(DEFAULT_MA3, 8, 20000, 5, contiguous=True).blocks
    indep = generate_ma_blocks(DEFAULT_MA3, 8, 20000, 5).blocks
    assert np.mean(cont[:-1, -1] * cont[1:, 0]) == pytest.approx(r1, abs=0.1)
    assert abs(np.mean(indep[:-1, -1] * indep[1:, 0])) < 0.1


@pytest.mark.parametrize("N, K", [(3, 10), (20, 0), (2.5, 3)])
def test_invalid_dims(N, K):
    with pytest.raises(ValueError):
        generate_ma_blocks(DEFAULT_MA3, N, K, 0)


def test_single_harmonic_power():
    x = generate_harmonic_blocks(HarmonicModel((0.25,)), None, 16, 4000, 2).blocks
    assert np.mean(x ** 2) == pytest.approx(0.5, rel=0.02)


def test_snr_hits_target():
    clean = generate_harmonic_blocks(DEFAULT_HARMONICS, None, 16, 4096, 11)
    noisy = generate_harmonic_blocks(DEFAULT_HARMONICS, DEFAULT_ARMA_NOISE, 16, 4096, 11)
    assert abs(measured_snr_db(clean.blocks, noisy.blocks)) < 0.2


def test_noise_autocorrelation_matches_filter():
    v = colored_gaussian_blocks(DEFAULT_MA5_NOISE, 12, 10000, 3)
    g = np.asarray(DEFAULT_MA5_NOISE.ma_coefficients)
    for tau in range(6):
        expect = np.sum(g[: g.size - tau] * g[tau:])
        got = np.mean(v[:, : 12 - tau] * v[:, tau:])
        assert got == pytest.approx(expect, rel=0.05, abs=0.05 * np.sum(g ** 2))


def test_colored_gaussian_examples():
    w = colored_gaussian(ColoredNoiseModel(), 50000, 1)
    assert w.var() == pytest.approx(1.0, rel=0.03)
    y = colored_gaussian(ColoredNoiseModel((1.0, 1.0)), 50000, 1)
    assert y.var() == pytest.approx(2.0, rel=0.03)


def test_arma_spectrum_peaks_near_04():
    h = DEFAULT_ARMA_NOISE.impulse_response(4096)
    spec = np.abs(np.fft.rfft(h)) ** 2
    w = np.fft.rfftfreq(4096)
    assert abs(w[np.argmax(spec)] - 0.4) < 0.02


def test_warmup_and_stability():
    assert DEFAULT_ARMA_NOISE.warmup() >= 10 * 2
    assert DEFAULT_ARMA_NOISE.pole_radius() < 1
    with pytest.raises(ValueError):
        ColoredNoiseModel((1.0,), (1.0, -1.5)).check_stable()
    with pytest.raises(ValueError):
        generate_harmonic_blocks(DEFAULT_HARMONICS, ColoredNoiseModel((1.0,), (1.0, -1.5)), 16, 4, 0)


def test_gaussian_noise_third_cumulant_vanishes():
    v = colored_gaussian_blocks(DEFAULT_MA5_NOISE, 8, 10000, 5)
    sigma = v.std()
    assert abs(np.mean(v ** 3)) < 0.05 * sigma ** 3
    m = third_moment_tensor(v / sigma)
    assert np.max(np.abs(m)) < 0.1
