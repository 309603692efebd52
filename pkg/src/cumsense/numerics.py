"""Dense linear-algebra kernel shared by the reconstruction engines.

Least squares goes through a thin SVD so that rank-deficient systems still
return the minimum-norm minimiser together with a rank report. The DFT is
numpy's FFT, unnormalised forward and ``1/n`` inverse.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "LeastSquaresSolution",
    "as_finite_matrix",
    "default_rank_tol",
    "solve_least_squares",
    "numerical_rank",
    "dft",
]


@dataclass(frozen=True)
class LeastSquaresSolution:
    solution: np.ndarray
    residual_norm: float
    rank: int
    condition_estimate: float


def as_finite_matrix(A, name: str = "A") -> np.ndarray:
    A = np.asarray(A)
    if A.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {A.shape}")
    if A.shape[0] < 1 or A.shape[1] < 1:
        raise ValueError(f"{name} must have at least one row and column")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} has non-finite entries")
    return A


def default_rank_tol(shape) -> float:
    return 1e-10 * max(shape)


def _rank_from_singular_values(s: np.ndarray, rel_tol: float) -> int:
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rel_tol * s[0]))


def numerical_rank(A, rel_tol: float | None = None) -> int:
    """Number of singular values above ``rel_tol`` times the largest one."""
    A = as_finite_matrix(A)
    if rel_tol is None:
        rel_tol = default_rank_tol(A.shape)
    if not 0.0 < rel_tol < 1.0:
        raise ValueError("rel_tol must lie in (0, 1)")
    s = np.linalg.svd(A, compute_uv=False)
    return _rank_from_singular_values(s, rel_tol)


def solve_least_squares(A, b, rel_tol: float | None = None) -> LeastSquaresSolution:
    """Minimum-norm minimiser of ``||b - A x||_2``.

    Singular values at or below ``rel_tol * s_max`` are treated as zero, so
    the returned vector is the truncated pseudo-inverse solution. Works for
    real and complex systems.

    Parameters
    ----------
    A : array_like, shape (m, n)
    b : array_like, shape (m,)
    rel_tol : float, optional
        Relative singular-value cutoff. Defaults to ``1e-10 * max(m, n)``.

    Returns
    -------
    LeastSquaresSolution
        ``condition_estimate`` is ``s_max / s_min`` over the retained
        singular values (``inf`` if none is retained).
    """
    A = as_finite_matrix(A)
    b = np.asarray(b)
    if b.ndim != 1 or b.shape[0] != A.shape[0]:
        raise ValueError(f"b must have length {A.shape[0]}, got shape {b.shape}")
    if not np.all(np.isfinite(b)):
        raise ValueError("b has non-finite entries")
    if rel_tol is None:
        rel_tol = default_rank_tol(A.shape)

    U, s, Vh = np.linalg.svd(A, full_matrices=False)
    r = _rank_from_singular_values(s, rel_tol)
    if r == 0:
        x = np.zeros(A.shape[1], dtype=np.result_type(A, b))
        cond = np.inf
    else:
        coef = (U[:, :r].conj().T @ b) / s[:r]
        x = Vh[:r].conj().T @ coef
        cond = float(s[0] / s[r - 1])
    res = float(np.linalg.norm(b - A @ x))
    return LeastSquaresSolution(solution=x, residual_norm=res, rank=r, condition_estimate=cond)


def dft(v, inverse: bool = False) -> np.ndarray:
    """Unnormalised forward DFT, or its inverse (which carries the ``1/n``)."""
    v = np.asarray(v, dtype=complex)
    if v.ndim != 1 or v.size < 1:
        raise ValueError("dft expects a non-empty 1-D vector")
    if not np.all(np.isfinite(v)):
        raise ValueError("dft input has non-finite entries")
    return np.fft.ifft(v) if inverse else np.fft.fft(v)
