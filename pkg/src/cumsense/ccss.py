"""Diagonal cumulant slices from sparse-ruler samples.

Because the Nyquist process is stationary, ``c_q(tau, ..., tau)`` can be
estimated from any pair of retained samples whose positions differ by
``tau``. A ruler keeps at least one such pair for every lag, so averaging
the lag-matched products of the compressed outputs recovers the full slice.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cumulant_est import StationaryCumulant
from .sampler import SparseRuler
from .signal_gen import BlockStream

__all__ = [
    "CumulantSlice",
    "SUPPORTED_ORDERS",
    "pair_table",
    "estimate_slice",
    "estimate_slice_uncompressed",
    "slice_of_cumulant",
]

SUPPORTED_ORDERS = (2, 3, 4)


@dataclass
class CumulantSlice:
    """``c_q(tau, ..., tau)`` for ``tau = 1-N .. N-1``.

    ``pair_counts[t]`` is how many ordered mark pairs were averaged for lag
    ``t - (N-1)``; it is None for slices read off an analytic cumulant.
    """

    q: int
    N: int
    values: np.ndarray
    pair_counts: np.ndarray | None = None

    def __post_init__(self):
        if self.q not in SUPPORTED_ORDERS:
            raise ValueError(f"unsupported order q={self.q}; expected one of {SUPPORTED_ORDERS}")
        v = np.asarray(self.values, dtype=float)
        if v.shape != (2 * self.N - 1,):
            raise ValueError(f"slice must have 2N-1={2 * self.N - 1} values, got {v.shape}")
        self.values = v
        if self.pair_counts is not None:
            self.pair_counts = np.asarray(self.pair_counts, dtype=int)

    @property
    def lags(self) -> np.ndarray:
        return np.arange(1 - self.N, self.N)

    def at(self, tau: int) -> float:
        if abs(tau) > self.N - 1:
            raise IndexError(f"lag {tau} outside +-{self.N - 1}")
        return float(self.values[tau + self.N - 1])

    def nonnegative(self) -> np.ndarray:
        """Values for ``tau = 0 .. N-1``."""
        return self.values[self.N - 1:]

    def rows(self):
        counts = self.pair_counts if self.pair_counts is not None else np.zeros(self.values.size, int)
        for t, v, c in zip(self.lags, self.values, counts):
            yield int(t), float(v), int(c)


def pair_table(ruler: SparseRuler):
    """Ordered mark pairs ``(i, j)`` and their lags ``m_j - m_i``.

    Returns ``(I, J, lag_index, counts)`` where ``lag_index = m_j - m_i + N - 1``
    and ``counts`` has one entry per lag in ``1-N .. N-1``.
    """
    m = np.asarray(ruler.marks)
    I, J = np.meshgrid(np.arange(m.size), np.arange(m.size), indexing="ij")
    I, J = I.ravel(), J.ravel()
    lag_index = m[J] - m[I] + ruler.N - 1
    counts = np.bincount(lag_index, minlength=2 * ruler.N - 1)
    if np.any(counts == 0):
        missing = np.flatnonzero(counts == 0) - (ruler.N - 1)
        raise ValueError(f"ruler does not cover lags {missing.tolist()}")
    return I, J, lag_index, counts


def _lag_means(prod: np.ndarray, lag_index: np.ndarray, counts: np.ndarray) -> np.ndarray:
    # (K, pairs) -> (K, 2N-1): average the pair products sharing a lag
    W = np.zeros((lag_index.size, counts.size))
    W[np.arange(lag_index.size), lag_index] = 1.0 / counts[lag_index]
    return prod @ W


def _slice_kernel(y: np.ndarray, ruler: SparseRuler, q: int, correction: str) -> CumulantSlice:
    if q not in SUPPORTED_ORDERS:
        raise ValueError(f"unsupported order q={q}; expected one of {SUPPORTED_ORDERS}")
    if correction not in ("global", "per_block"):
        raise ValueError("correction must be 'global' or 'per_block'")
    if y.ndim != 2 or y.shape[1] != ruler.size or y.shape[0] < 1:
        raise ValueError(f"expected (K, {ruler.size}) compressed samples, got {y.shape}")
    I, J, lag_index, counts = pair_table(ruler)
    yi, yj = y[:, I], y[:, J]
    main = _lag_means(yi * yj ** (q - 1), lag_index, counts)
    if q < 4:
        values = main.mean(axis=0)
    else:
        cross = _lag_means(yi * yj, lag_index, counts)
        power = _lag_means(yj * yj, lag_index, counts)
        if correction == "per_block":
            values = (main - 3.0 * cross * power).mean(axis=0)
        else:
            values = main.mean(axis=0) - 3.0 * cross.mean(axis=0) * power.mean(axis=0)
    return CumulantSlice(q, ruler.N, values, counts)


def estimate_slice(stream, ruler: SparseRuler, q: int, correction: str = "global") -> CumulantSlice:
    """Lag-matched pair average of the compressed outputs.

    For every block and lag ``tau``, the products ``y_i y_j^(q-1)`` over the
    ordered pairs with ``m_j - m_i = tau`` are averaged (divisor: the pair
    count), then the block estimates are averaged. For ``q = 4`` the Gaussian
    part ``3 E{y_i y_j} E{y_j^2}`` is removed.

    Parameters
    ----------
    stream : BlockStream or array_like, shape (K, M)
        Output of ``compress`` with ``ruler_sampler(ruler)``; column ``i``
        holds the samples at mark ``m_i``.
    ruler : SparseRuler
    q : {2, 3, 4}
    correction : {"global", "per_block"}
        Where the ``q = 4`` second-moment products are formed. ``"global"``
        averages each moment over all blocks first; ``"per_block"`` forms the
        product inside each block. The per-block product of two one-pair
        averages is biased by a multiple of ``sigma^4`` that does not shrink
        with ``K``, which is why the global form is the default.
    """
    y = stream.blocks if isinstance(stream, BlockStream) else np.asarray(stream, dtype=float)
    return _slice_kernel(y, ruler, q, correction)


def estimate_slice_uncompressed(x_blocks, ruler: SparseRuler, q: int, correction: str = "global") -> CumulantSlice:
    """Same estimator evaluated on Nyquist blocks restricted to the ruler marks."""
    x = x_blocks.blocks if isinstance(x_blocks, BlockStream) else np.asarray(x_blocks, dtype=float)
    if x.ndim != 2 or x.shape[1] != ruler.N:
        raise ValueError(f"expected (K, {ruler.N}) blocks, got {x.shape}")
    return _slice_kernel(x[:, list(ruler.marks)], ruler, q, correction)


def slice_of_cumulant(c: StationaryCumulant) -> CumulantSlice:
    """Third-order diagonal slice ``c(tau, tau)``."""
    return CumulantSlice(3, c.N, np.array([c.at(t, t) for t in range(1 - c.N, c.N)]))
