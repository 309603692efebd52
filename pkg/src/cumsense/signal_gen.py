"""Stochastic processes used in the experiments.

Every generator is a deterministic function of ``(model, dims, seed)``.
Blocks are drawn as independent realisations: block ``k`` is row ``k`` of
a single vectorised draw, each row with its own driver segment and its own
filter warm-up, so no state is shared between blocks.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter

__all__ = [
    "MaModel",
    "HarmonicModel",
    "ColoredNoiseModel",
    "BlockStream",
    "DEFAULT_MA3",
    "DEFAULT_MA5_NOISE",
    "DEFAULT_ARMA_NOISE",
    "DEFAULT_HARMONICS",
    "generate_ma_blocks",
    "generate_harmonic_blocks",
    "colored_gaussian",
    "colored_gaussian_blocks",
    "add_colored_noise",
    "measured_snr_db",
]

_DRIVERS = ("exponential", "gaussian")


@dataclass(frozen=True)
class MaModel:
    """Moving-average filter driven by i.i.d. noise.

    The ``exponential`` driver is a rate-1 exponential with its mean removed:
    variance 1, third central moment 2, fourth cumulant 6.
    """

    coefficients: tuple
    driver: str = "exponential"

    def __post_init__(self):
        h = tuple(float(c) for c in self.coefficients)
        if not h:
            raise ValueError("MA coefficients must be non-empty")
        if h[0] == 0.0:
            raise ValueError("leading MA coefficient must be nonzero")
        if self.driver not in _DRIVERS:
            raise ValueError(f"driver must be one of {_DRIVERS}")
        object.__setattr__(self, "coefficients", h)

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    @property
    def driver_skewness(self) -> float:
        return self.driver_cumulant(3)

    def driver_cumulant(self, q: int) -> float:
        # cumulants of Exp(1) are (q-1)!; the shift only changes the mean
        if q == 1:
            return 0.0
        if self.driver == "gaussian":
            return 1.0 if q == 2 else 0.0
        return float(np.prod(np.arange(1, q)))

    def to_dict(self):
        return {"coefficients": list(self.coefficients), "driver": self.driver}

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(d["coefficients"]), d.get("driver", "exponential"))


@dataclass(frozen=True)
class HarmonicModel:
    """Real sinusoids with i.i.d. uniform phases on [-pi, pi] per block."""

    frequencies: tuple
    amplitudes: tuple | None = None

    def __post_init__(self):
        f = tuple(float(w) for w in self.frequencies)
        if not f:
            raise ValueError("need at least one frequency")
        if any(not 0.0 < w < 0.5 for w in f):
            raise ValueError("frequencies must lie in (0, 0.5) cycles/sample")
        if any(b <= a for a, b in zip(f, f[1:])):
            raise ValueError("frequencies must be strictly increasing")
        a = (1.0,) * len(f) if self.amplitudes is None else tuple(float(x) for x in self.amplitudes)
        if len(a) != len(f):
            raise ValueError("one amplitude per frequency")
        if any(x < 0 for x in a):
            raise ValueError("amplitudes must be nonnegative")
        object.__setattr__(self, "frequencies", f)
        object.__setattr__(self, "amplitudes", a)

    @property
    def power(self) -> float:
        return float(sum(x * x for x in self.amplitudes) / 2)

    def to_dict(self):
        return {"frequencies": list(self.frequencies), "amplitudes": list(self.amplitudes)}

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(d["frequencies"]), tuple(d["amplitudes"]) if d.get("amplitudes") else None)


@dataclass(frozen=True)
class ColoredNoiseModel:
    """Gaussian noise shaped by ``B(z)/A(z)``; ``ar_coefficients`` start with 1."""

    ma_coefficients: tuple = (1.0,)
    ar_coefficients: tuple = (1.0,)
    target_snr_db: float = 0.0

    def __post_init__(self):
        b = tuple(float(c) for c in self.ma_coefficients)
        a = tuple(float(c) for c in self.ar_coefficients)
        if not b or not a:
            raise ValueError("filter coefficients must be non-empty")
        if a[0] != 1.0:
            raise ValueError("AR polynomial must be monic (leading coefficient 1)")
        object.__setattr__(self, "ma_coefficients", b)
        object.__setattr__(self, "ar_coefficients", a)
        object.__setattr__(self, "target_snr_db", float(self.target_snr_db))

    def pole_radius(self) -> float:
        if len(self.ar_coefficients) == 1:
            return 0.0
        return float(np.max(np.abs(np.roots(self.ar_coefficients))))

    def check_stable(self):
        if self.pole_radius() >= 1.0:
            raise ValueError(f"AR polynomial {self.ar_coefficients} is not stable")

    def warmup(self) -> int:
        """Samples discarded before the first output sample.

        At least ten times the filter memory; for IIR filters also long enough
        for the slowest pole to decay below 1e-12.
        """
        self.check_stable()
        memory = max(len(self.ma_coefficients), len(self.ar_coefficients)) - 1
        n = 10 * max(memory, 1)
        rho = self.pole_radius()
        if rho > 0:
            n = max(n, int(np.ceil(np.log(1e-12) / np.log(rho))))
        return n

    def impulse_response(self, length: int) -> np.ndarray:
        imp = np.zeros(length)
        imp[0] = 1.0
        return lfilter(self.ma_coefficients, self.ar_coefficients, imp)

    def to_dict(self):
        return {
            "ma_coefficients": list(self.ma_coefficients),
            "ar_coefficients": list(self.ar_coefficients),
            "target_snr_db": self.target_snr_db,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            tuple(d.get("ma_coefficients", (1.0,))),
            tuple(d.get("ar_coefficients", (1.0,))),
            d.get("target_snr_db", 0.0),
        )


@dataclass
class BlockStream:
    """``K`` blocks of length ``N`` stored as a ``(K, N)`` array."""

    blocks: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        b = np.asarray(self.blocks, dtype=float)
        if b.ndim != 2 or b.shape[0] < 1 or b.shape[1] < 1:
            raise ValueError(f"blocks must be a non-empty (K, N) array, got {b.shape}")
        self.blocks = b

    @property
    def block_length(self) -> int:
        return self.blocks.shape[1]

    @property
    def block_count(self) -> int:
        return self.blocks.shape[0]

    def __len__(self):
        return self.block_count


DEFAULT_MA3 = MaModel((1.0, 0.9, 0.385, -0.771), "exponential")
DEFAULT_MA5_NOISE = ColoredNoiseModel((1.0, -2.33, 0.75, 0.5, -1.3, -1.4), (1.0,), 0.0)
DEFAULT_ARMA_NOISE = ColoredNoiseModel((1.0, 2.0, 1.0), (1.0, 1.4563, 0.81), 0.0)
DEFAULT_HARMONICS = HarmonicModel((0.1, 0.2), (1.0, 1.0))


def _check_dims(N, K):
    if int(N) != N or N < 1:
        raise ValueError(f"block length must be a positive integer, got {N}")
    if int(K) != K or K < 1:
        raise ValueError(f"block count must be a positive integer, got {K}")


def _driver(rng, model: MaModel, shape):
    if model.driver == "gaussian":
        return rng.standard_normal(shape)
    return rng.exponential(1.0, shape) - 1.0


def generate_ma_blocks(model: MaModel, N: int, K: int, seed: int, contiguous: bool = False) -> BlockStream:
    """``K`` length-``N`` windows of the stationary MA output.

    With ``contiguous=False`` each block has its own driver segment (the
    FIR warm-up is exactly the filter order, so every sample is stationary).
    ``contiguous=True`` cuts one long stream into consecutive blocks, which is
    what the inter-block lag estimators need.
    """
    _check_dims(N, K)
    if N < model.order + 1:
        raise ValueError(f"N={N} is shorter than the filter length {model.order + 1}")
    rng = np.random.default_rng(seed)
    q = model.order
    h = np.asarray(model.coefficients)
    if contiguous:
        w = _driver(rng, model, K * N + q)
        x = lfilter(h, [1.0], w)[q:].reshape(K, N)
    else:
        w = _driver(rng, model, (K, N + q))
        x = lfilter(h, [1.0], w, axis=1)[:, q:]
    return BlockStream(x, {"kind": "ma", "model": model.to_dict(), "seed": seed, "contiguous": contiguous})


def colored_gaussian(model: ColoredNoiseModel, length: int, seed: int) -> np.ndarray:
    """Unit-variance white Gaussian noise passed through the model filter."""
    model.check_stable()
    rng = np.random.default_rng(seed)
    warm = model.warmup()
    w = rng.standard_normal(length + warm)
    return lfilter(model.ma_coefficients, model.ar_coefficients, w)[warm:]


def colored_gaussian_blocks(model: ColoredNoiseModel, N: int, K: int, seed: int) -> np.ndarray:
    """``(K, N)`` independent colored-noise blocks, each with its own warm-up."""
    _check_dims(N, K)
    model.check_stable()
    rng = np.random.default_rng(seed)
    warm = model.warmup()
    w = rng.standard_normal((K, N + warm))
    return lfilter(model.ma_coefficients, model.ar_coefficients, w, axis=1)[:, warm:]


def add_colored_noise(stream: BlockStream, noise: ColoredNoiseModel, seed: int) -> BlockStream:
    """Add colored Gaussian noise so that the ensemble SNR hits the target.

    SNR is mean signal power over mean noise power, both measured over all
    ``K * N`` Nyquist-grid samples of the stream.
    """
    K, N = stream.blocks.shape
    v = colored_gaussian_blocks(noise, N, K, seed)
    ps = np.mean(stream.blocks ** 2)
    pn = np.mean(v ** 2)
    if pn == 0.0:
        raise ValueError("noise realisation has zero power")
    scale = np.sqrt(ps / (pn * 10.0 ** (noise.target_snr_db / 10.0)))
    meta = dict(stream.meta, noise=noise.to_dict(), noise_seed=seed, noise_scale=float(scale))
    return BlockStream(stream.blocks + scale * v, meta)


def generate_harmonic_blocks(
    model: HarmonicModel, noise: ColoredNoiseModel | None, N: int, K: int, seed: int
) -> BlockStream:
    """Random-phase sinusoids, optionally plus colored noise at the target SNR."""
    _check_dims(N, K)
    if N < 2:
        raise ValueError("harmonic blocks need N >= 2")
    if noise is not None:
        noise.check_stable()
    ss = np.random.SeedSequence(seed)
    phase_seed, noise_seed = (int(s.generate_state(1)[0]) for s in ss.spawn(2))
    rng = np.random.default_rng(phase_seed)
    f = np.asarray(model.frequencies)
    a = np.asarray(model.amplitudes)
    phases = rng.uniform(-np.pi, np.pi, (K, f.size))
    n = np.arange(N)
    arg = 2 * np.pi * f[None, :, None] * n[None, None, :] + phases[:, :, None]
    x = np.einsum("p,kpn->kn", a, np.cos(arg))
    stream = BlockStream(x, {"kind": "harmonic", "model": model.to_dict(), "seed": seed})
    if noise is None:
        return stream
    return add_colored_noise(stream, noise, noise_seed)


def measured_snr_db(signal: np.ndarray, noisy: np.ndarray) -> float:
    noise = np.asarray(noisy) - np.asarray(signal)
    return float(10 * np.log10(np.mean(np.asarray(signal) ** 2) / np.mean(noise ** 2)))

