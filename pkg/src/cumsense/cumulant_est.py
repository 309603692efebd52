"""Empirical moment/cumulant estimators and analytic ground truth.

At third order the cumulant of a zero-mean process equals its third
moment, so the moment vectors here are used directly as cumulant vectors.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mapping import build_T, hexagon_lags
from .signal_gen import BlockStream, HarmonicModel, MaModel

__all__ = [
    "StationaryCumulant",
    "third_moment_tensor",
    "empirical_third_moment_vector",
    "empirical_stationary_cumulant",
    "block_lag_cross_moments",
    "analytic_ma_cumulant",
    "analytic_ma_slice",
    "analytic_harmonic_slice",
    "mse",
]


def _symmetry_images(a, b):
    return ((a, b), (b, a), (-b, a - b), (-a, b - a), (b - a, -a), (a - b, -b))


@dataclass
class StationaryCumulant:
    """``c3(tau1, tau2)`` on the hexagon ``|tau1|, |tau2|, |tau1 - tau2| <= N-1``.

    ``values`` is a ``(2N-1, 2N-1)`` array indexed by ``tau + N - 1``;
    entries outside the hexagon are zero.
    """

    N: int
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        n = 2 * self.N - 1
        if v.shape != (n, n):
            raise ValueError(f"values must have shape {(n, n)}, got {v.shape}")
        t = np.arange(1 - self.N, self.N)
        outside = np.abs(t[:, None] - t[None, :]) > self.N - 1
        v[outside] = 0.0
        self.values = v

    @classmethod
    def zeros(cls, N):
        return cls(N, np.zeros((2 * N - 1, 2 * N - 1)))

    @classmethod
    def from_function(cls, N, f):
        t = range(1 - N, N)
        vals = np.array([[f(a, b) if abs(a - b) <= N - 1 else 0.0 for b in t] for a in t])
        return cls(N, vals)

    @classmethod
    def from_hexagon_vector(cls, N, vec):
        lags = hexagon_lags(N).lags
        vec = np.asarray(vec, dtype=float)
        if vec.shape != (len(lags),):
            raise ValueError("hexagon vector has the wrong length")
        vals = np.zeros((2 * N - 1, 2 * N - 1))
        vals[lags[:, 0] + N - 1, lags[:, 1] + N - 1] = vec
        return cls(N, vals)

    def at(self, tau1: int, tau2: int) -> float:
        n = self.N - 1
        if abs(tau1) > n or abs(tau2) > n or abs(tau1 - tau2) > n:
            return 0.0
        return float(self.values[tau1 + n, tau2 + n])

    __call__ = at

    def hexagon_vector(self) -> np.ndarray:
        lags = hexagon_lags(self.N).lags
        return self.values[lags[:, 0] + self.N - 1, lags[:, 1] + self.N - 1]

    def symmetrized(self) -> "StationaryCumulant":
        """Average every value with its six symmetry images."""
        out = np.zeros_like(self.values)
        n = self.N - 1
        for a, b in hexagon_lags(self.N).lags:
            out[a + n, b + n] = np.mean([self.at(x, y) for x, y in _symmetry_images(int(a), int(b))])
        return StationaryCumulant(self.N, out)

    def symmetry_defect(self) -> float:
        """Largest deviation between a value and any of its symmetry images."""
        worst = 0.0
        for a, b in hexagon_lags(self.N).lags:
            ref = self.at(int(a), int(b))
            for x, y in _symmetry_images(int(a), int(b)):
                worst = max(worst, abs(ref - self.at(x, y)))
        return worst

    def rows(self):
        """``(tau1, tau2, value)`` triples over the hexagon, for CSV output."""
        for (a, b), v in zip(hexagon_lags(self.N).lags, self.hexagon_vector()):
            yield int(a), int(b), float(v)


def _blocks(stream) -> np.ndarray:
    b = stream.blocks if isinstance(stream, BlockStream) else np.asarray(stream, dtype=float)
    if b.ndim != 2 or b.shape[0] < 1:
        raise ValueError("need a non-empty (K, d) array of blocks")
    return b


def _maybe_demean(b: np.ndarray, demean) -> np.ndarray:
    # auto mode: remove the grand mean only when it is > 5 standard errors from 0
    if demean is None:
        mu = b.mean()
        se = b.std() / np.sqrt(b.size) if b.size > 1 else 0.0
        demean = se > 0 and abs(mu) > 5 * se
    return b - b.mean() if demean else b


def third_moment_tensor(stream, demean=None) -> np.ndarray:
    """``(1/K) sum_k y[k] o y[k] o y[k]`` as a ``(d, d, d)`` array."""
    b = _maybe_demean(_blocks(stream), demean)
    m = np.einsum("ki,kj,kl->ijl", b, b, b, optimize=True) / b.shape[0]
    # read every entry from its sorted-index representative so that the
    # tensor is exactly (not just up to rounding) permutation symmetric
    i, j, l = np.sort(np.indices(m.shape), axis=0)
    return m[i, j, l]


def empirical_third_moment_vector(stream, demean=None) -> np.ndarray:
    """Length-``d^3`` vectorised third-moment tensor of the blocks.

    Entry ``(i1, i2, i3)`` sits at ``i1 d^2 + i2 d + i3`` (0-based). Each
    entry is an average of the same product in any index order, so the
    result is exactly permutation invariant.

    Parameters
    ----------
    stream : BlockStream or array_like, shape (K, d)
    demean : bool or None
        ``None`` subtracts the grand sample mean only when it is
        statistically distinguishable from zero.
    """
    return third_moment_tensor(stream, demean).ravel()


def empirical_stationary_cumulant(stream, demean=None) -> StationaryCumulant:
    """Lag-averaged third-order cumulant of Nyquist-grid blocks.

    For each hexagon lag ``(t1, t2)`` the product ``x[n] x[n+t1] x[n+t2]``
    is averaged over every ``n`` keeping all three indices inside the block
    and over all blocks; the result is then symmetrised over the six images.
    """
    b = _blocks(stream)
    N = b.shape[1]
    if N < 1:
        raise ValueError("blocks are empty")
    m = third_moment_tensor(b, demean).ravel()
    T = build_T(N)
    counts = T.column_counts()
    sums = np.bincount(T.row_to_col, weights=m, minlength=T.n_cols)
    return StationaryCumulant.from_hexagon_vector(N, sums / counts).symmetrized()


def block_lag_cross_moments(stream, L: int, demean=None) -> np.ndarray:
    """Inter-block cross-moments stacked for the direct engine.

    Needs a contiguous stream (block ``k+1`` follows block ``k`` in time).
    Returns the length ``(2L+1)^2 M^3`` vector whose lag blocks
    ``E{y_i1[k] y_i2[k+t1] y_i3[k+t2]}`` run over ``t2 = L..-L`` (outer) and
    ``t1 = L..-L`` (inner).
    """
    y = _maybe_demean(_blocks(stream), demean)
    K, M = y.shape
    if L < 1 or K <= 2 * L:
        raise ValueError(f"need L >= 1 and more than 2L={2 * L} blocks")
    out = []
    for t2 in range(L, -L - 1, -1):
        for t1 in range(L, -L - 1, -1):
            lo = max(0, -t1, -t2)
            hi = min(K, K - t1, K - t2)
            a = y[lo:hi]
            b = y[lo + t1:hi + t1]
            c = y[lo + t2:hi + t2]
            out.append(np.einsum("ki,kj,kl->ijl", a, b, c, optimize=True).ravel() / (hi - lo))
    return np.concatenate(out)


def analytic_ma_cumulant(model: MaModel, N: int) -> StationaryCumulant:
    """``gamma3 * sum_n h(n) h(n+t1) h(n+t2)`` over the block hexagon."""
    h = np.asarray(model.coefficients)
    g3 = model.driver_skewness
    q = h.size - 1

    def c3(a, b):
        lo = max(0, -a, -b)
        hi = min(q, q - a, q - b)
        if hi < lo:
            return 0.0
        n = np.arange(lo, hi + 1)
        return g3 * float(np.sum(h[n] * h[n + a] * h[n + b]))

    return StationaryCumulant.from_function(N, c3)


def analytic_ma_slice(model: MaModel, q: int, N: int) -> np.ndarray:
    """Diagonal slice ``c_q(tau, ..., tau)`` for ``tau = 1-N .. N-1``."""
    h = np.asarray(model.coefficients)
    g = model.driver_cumulant(q)
    order = h.size - 1
    out = np.zeros(2 * N - 1)
    for i, tau in enumerate(range(1 - N, N)):
        lo = max(0, -tau)
        hi = min(order, order - tau)
        if hi >= lo:
            n = np.arange(lo, hi + 1)
            out[i] = g * np.sum(h[n] * h[n + tau] ** (q - 1))
    return out


def analytic_harmonic_slice(model: HarmonicModel, q: int, N: int) -> np.ndarray:
    """Diagonal slice of random-phase sinusoids.

    ``q=2``: ``sum a^2/2 cos(2 pi w tau)``; ``q=3``: zero;
    ``q=4``: ``-3/8 sum a^4 cos(2 pi w tau)``.
    """
    tau = np.arange(1 - N, N)
    f = np.asarray(model.frequencies)[:, None]
    a = np.asarray(model.amplitudes)[:, None]
    cos = np.cos(2 * np.pi * f * tau[None, :])
    if q == 2:
        return np.sum(a ** 2 / 2 * cos, axis=0)
    if q == 3:
        return np.zeros(tau.size)
    if q == 4:
        return np.sum(-3.0 / 8.0 * a ** 4 * cos, axis=0)
    raise ValueError("q must be 2, 3 or 4")


def mse(estimate, truth) -> float:
    """Normalised squared error ``||est - truth||^2 / ||truth||^2``."""
    if isinstance(estimate, StationaryCumulant):
        estimate = estimate.values
    if isinstance(truth, StationaryCumulant):
        truth = truth.values
    e = np.asarray(estimate, dtype=float)
    t = np.asarray(truth, dtype=float)
    if e.shape != t.shape:
        raise ValueError(f"shape mismatch {e.shape} vs {t.shape}")
    denom = float(np.sum(t ** 2))
    if denom == 0.0:
        raise ValueError("truth has zero norm")
    return float(np.sum((e - t) ** 2) / denom)
