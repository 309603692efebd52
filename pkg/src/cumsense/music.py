"""MUSIC line-spectrum estimation from a covariance or cumulant slice."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import toeplitz
from scipy.signal import find_peaks

from .ccss import CumulantSlice

__all__ = ["PseudoSpectrum", "music", "slice_matrix"]


@dataclass
class PseudoSpectrum:
    grid: np.ndarray
    values: np.ndarray
    peaks: np.ndarray

    def peaks_near(self, w: float, tol: float) -> np.ndarray:
        return self.peaks[np.abs(self.peaks - w) <= tol]

    def rows(self):
        for w, v in zip(self.grid, self.values):
            yield float(w), float(v)


def slice_matrix(slc: CumulantSlice, order: int) -> np.ndarray:
    """Symmetric Toeplitz matrix with first row ``slice(0 .. order-1)``."""
    if order < 2:
        raise ValueError("matrix order must be at least 2")
    if order > slc.N:
        raise ValueError(f"matrix order {order} exceeds the {slc.N} available lags")
    return toeplitz(slc.nonnegative()[:order])


def music(slc: CumulantSlice, num_real_harmonics: int, matrix_order: int = 12,
          grid_size: int = 2048, symmetry_tol: float = 1e-9) -> PseudoSpectrum:
    """MUSIC pseudospectrum on ``[0, 0.5]`` cycles/sample.

    Each real sinusoid occupies two complex exponentials, so the signal
    subspace has dimension ``2 * num_real_harmonics``. Eigenvalues are
    ranked by magnitude: the fourth-order slice of a sinusoid carries a
    negative weight, so its signal eigenvalues are the most negative ones.
    Peaks are local maxima above the median of the pseudospectrum.
    """
    d = 2 * num_real_harmonics
    if num_real_harmonics < 1 or d >= matrix_order:
        raise ValueError(f"need 1 <= 2*num_real_harmonics < matrix_order, got {d} vs {matrix_order}")
    if grid_size < 3:
        raise ValueError("grid_size must be at least 3")
    if slc.q == 2:
        v = slc.values
        scale = max(np.max(np.abs(v)), np.finfo(float).tiny)
        if np.max(np.abs(v - v[::-1])) > symmetry_tol * scale:
            raise ValueError("covariance slice is not symmetric in the lag")
    R = slice_matrix(slc, matrix_order)
    evals, evecs = np.linalg.eigh(R)
    order = np.argsort(np.abs(evals))[::-1]
    En = evecs[:, order[d:]]
    grid = np.linspace(0.0, 0.5, grid_size)
    steer = np.exp(2j * np.pi * np.outer(np.arange(matrix_order), grid))
    proj = np.sum(np.abs(En.T @ steer) ** 2, axis=0)
    values = 1.0 / np.maximum(proj, np.finfo(float).tiny)
    idx, _ = find_peaks(values)
    idx = idx[values[idx] > np.median(values)]
    return PseudoSpectrum(grid, values, grid[idx])
