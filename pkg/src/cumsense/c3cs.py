"""Third-order cumulant reconstruction from compressive measurements.

Two engines:

* alternative -- least squares on ``c3y = (Phi kron Phi kron Phi) G c``
  where ``G`` is the symmetry mapping (principal region) or the
  stationarity mapping (hexagon). Only intra-block moments are used.
* direct -- inter-block cross-cumulants up to block lag ``L``, related to
  the Nyquist cumulant by a block-circulant operator that the
  ``(2L+1)^2``-point DFT splits into independent per-frequency systems.

Sampler rows double as the branch filters: row ``i`` of ``Phi`` is
``(e_i[0], e_i[-1], ..., e_i[1-N])``.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from math import comb

import numpy as np
import scipy.sparse as sp

from .mapping import MappingMatrix
from .numerics import as_finite_matrix, default_rank_tol, solve_least_squares
from .sampler import SamplingMatrix

log = logging.getLogger(__name__)

__all__ = [
    "FeasibilityReport",
    "ReconstructionResult",
    "DirectSystem",
    "feasibility",
    "min_feasible_M",
    "kron_mapped",
    "reconstruct_alternative",
    "filter_cross_cumulant",
    "filter_cross_cumulant_table",
    "assemble_direct_system",
    "reconstruct_direct",
    "direct_lag_layout",
    "direct_long_vector",
]


@dataclass(frozen=True)
class FeasibilityReport:
    N: int
    M: int
    unique_y_count: int
    dof_principal: int
    dof_hexagon: int
    feasible_principal: bool
    feasible_hexagon: bool
    min_ratio_approx: float


def feasibility(N: int, M: int) -> FeasibilityReport:
    """Count-based sufficient conditions for a Gaussian sampler.

    ``C(M+2, 3)`` distinct third-order products of ``M`` outputs against
    ``N(N+1)/2`` principal-region unknowns and ``3N^2-3N+1`` hexagon
    unknowns. Flags use exact integer arithmetic.
    """
    if not 1 <= M <= N:
        raise ValueError(f"need 1 <= M <= N, got M={M}, N={N}")
    unique = comb(M + 2, 3)
    dof_p = N * (N + 1) // 2
    dof_h = 3 * N * N - 3 * N + 1
    return FeasibilityReport(
        N=N,
        M=M,
        unique_y_count=unique,
        dof_principal=dof_p,
        dof_hexagon=dof_h,
        feasible_principal=unique >= dof_p,
        feasible_hexagon=unique >= dof_h,
        min_ratio_approx=(3 * N * N) ** (1 / 3) / N,
    )


def min_feasible_M(N: int, mapping: str = "principal") -> int | None:
    """Smallest ``M <= N`` passing the count test, or None if none does."""
    key = {"principal": "feasible_principal", "hexagon": "feasible_hexagon"}[mapping]
    for M in range(1, N + 1):
        if getattr(feasibility(N, M), key):
            return M
    return None


@dataclass
class ReconstructionResult:
    c_tilde: np.ndarray
    residual_norm: float
    rank_ok: bool
    runtime_ms: float
    rank: int = 0
    unknowns: int = 0
    condition_estimate: float = float("nan")
    imag_residue: float = 0.0
    engine: str = ""

    def summary(self) -> dict:
        return {
            "engine": self.engine,
            "residual_norm": self.residual_norm,
            "rank_ok": self.rank_ok,
            "rank": self.rank,
            "unknowns": self.unknowns,
            "condition_estimate": self.condition_estimate,
            "imag_residue": self.imag_residue,
            "runtime_ms": self.runtime_ms,
        }


def _phi(Phi) -> np.ndarray:
    return Phi.matrix if isinstance(Phi, SamplingMatrix) else as_finite_matrix(Phi, "Phi")


def kron_mapped(Phi, mapping: MappingMatrix) -> np.ndarray:
    """``(Phi kron Phi kron Phi) @ G`` without forming the ``M^3 x N^3`` product.

    ``G`` is scattered into a sparse ``N x (N^2 Q)`` array, then the three
    mode products are applied one at a time.
    """
    Phi = _phi(Phi)
    M, N = Phi.shape
    if mapping.n_rows != N ** 3:
        raise ValueError(f"mapping has {mapping.n_rows} rows, expected N^3={N ** 3}")
    Q = mapping.n_cols
    i, j, l = np.indices((N, N, N)).reshape(3, -1)
    cols = (j * N + l) * Q + mapping.row_to_col
    S = sp.csr_matrix((np.ones(N ** 3), (i, cols)), shape=(N, N * N * Q))
    X = np.asarray((S.T @ Phi.T).T).reshape(M, N, N, Q)
    X = np.einsum("bj,ajlq->ablq", Phi, X, optimize=True)
    X = np.einsum("cl,ablq->abcq", Phi, X, optimize=True)
    return X.reshape(M ** 3, Q)


def reconstruct_alternative(c3y, Phi, mapping: MappingMatrix, rel_tol: float | None = None) -> ReconstructionResult:
    """Least-squares fit of the compact cumulant vector to ``c3y``.

    Parameters
    ----------
    c3y : array_like, length M^3
        Vectorised third-moment tensor of the compressed blocks.
    Phi : SamplingMatrix or ndarray (M, N)
    mapping : MappingMatrix
        ``build_P(N)`` or ``build_T(N)``; the rank test uses its column count.

    Returns
    -------
    ReconstructionResult
        ``rank_ok`` is False when the system is rank deficient; the
        minimum-norm solution is returned regardless.
    """
    t0 = time.perf_counter()
    Phi = _phi(Phi)
    M = Phi.shape[0]
    c3y = np.asarray(c3y, dtype=float)
    if c3y.shape != (M ** 3,):
        raise ValueError(f"c3y must have length M^3={M ** 3}, got {c3y.shape}")
    A = kron_mapped(Phi, mapping)
    sol = solve_least_squares(A, c3y, rel_tol)
    return ReconstructionResult(
        c_tilde=sol.solution,
        residual_norm=sol.residual_norm,
        rank_ok=sol.rank == mapping.n_cols,
        runtime_ms=(time.perf_counter() - t0) * 1e3,
        rank=sol.rank,
        unknowns=mapping.n_cols,
        condition_estimate=sol.condition_estimate,
        engine=f"alternative-{mapping.name or 'custom'}",
    )


def _filter_taps(e) -> np.ndarray:
    # (e[0], e[-1], ..., e[1-N]) -> array over n = 1-N..0
    return np.asarray(e, dtype=float)[..., ::-1]


def filter_cross_cumulant(e1, e2, e3, m1: int, m2: int) -> float:
    """``sum_{n=1-N}^{0} e1[n] e2[n+m1] e3[n+m2]``, taps outside ``[1-N, 0]`` zero.

    Each ``e`` is given in sampler-row order ``(e[0], e[-1], ..., e[1-N])``.
    """
    a, b, c = (_filter_taps(e) for e in (e1, e2, e3))
    N = a.size
    if b.size != N or c.size != N:
        raise ValueError("filters must share one length")
    lo = max(0, -m1, -m2)
    hi = min(N, N - m1, N - m2)
    if hi <= lo:
        return 0.0
    t = np.arange(lo, hi)
    return float(np.sum(a[t] * b[t + m1] * c[t + m2]))


def filter_cross_cumulant_table(Phi) -> np.ndarray:
    """All branch cross-cumulants as an ``(M, M, M, 2N, 2N)`` array.

    Axis 3 and 4 index lags ``m = 1-N .. N`` (offset ``N-1``); lag ``N`` is
    included as an all-zero plane so the ``a = 1`` blocks need no special case.
    """
    Phi = _phi(Phi)
    M, N = Phi.shape
    E = _filter_taps(Phi)
    padded = np.zeros((M, 3 * N))
    padded[:, N:2 * N] = E
    shifts = np.arange(1 - N, N + 1)
    # S[i, m, t] = E[i, t + m]
    idx = N + shifts[:, None] + np.arange(N)[None, :]
    S = padded[:, idx]
    return np.einsum("at,bmt,cnt->abcmn", E, S, S, optimize=True)


def _block_offsets(L: int) -> dict:
    P = 2 * L + 1
    return {(0, 0): 0, (1, 0): 1, (0, 1): P, (1, 1): P + 1}


@dataclass
class DirectSystem:
    """Block-circulant operator of the direct engine.

    ``blocks[(a, b)]`` is the ``M^3 x N^2`` matrix whose row ``(i1,i2,i3)``
    holds ``c_e(aN - r, bN - s)`` at column ``rN + s``. In the assembled
    operator, block row ``p`` carries ``blocks[(a, b)]`` at block column
    ``(p + a + b(2L+1)) mod (2L+1)^2``.
    """

    N: int
    M: int
    L: int
    blocks: dict
    _freq: np.ndarray | None = field(default=None, repr=False)

    @property
    def n_lag_blocks(self) -> int:
        return (2 * self.L + 1) ** 2

    def assemble(self) -> np.ndarray:
        P = self.n_lag_blocks
        M3, N2 = self.M ** 3, self.N ** 2
        C = np.zeros((P * M3, P * N2))
        for p in range(P):
            for ab, d in _block_offsets(self.L).items():
                q = (p + d) % P
                C[p * M3:(p + 1) * M3, q * N2:(q + 1) * N2] += self.blocks[ab]
        return C

    def apply(self, c3x) -> np.ndarray:
        P = self.n_lag_blocks
        x = np.asarray(c3x).reshape(P, self.N ** 2)
        y = np.zeros((P, self.M ** 3), dtype=np.result_type(x, float))
        for ab, d in _block_offsets(self.L).items():
            y += x[(np.arange(P) + d) % P] @ self.blocks[ab].T
        return y.ravel()

    def frequency_blocks(self) -> np.ndarray:
        """``Q(2 pi l / P) = sum_d B_d exp(+2 pi i l d / P)`` for ``l = 0..P-1``."""
        if self._freq is None:
            P = self.n_lag_blocks
            ell = np.arange(P)
            Q = np.zeros((P, self.M ** 3, self.N ** 2), dtype=complex)
            for ab, d in _block_offsets(self.L).items():
                Q += np.exp(2j * np.pi * ell * d / P)[:, None, None] * self.blocks[ab][None]
            self._freq = Q
        return self._freq


def assemble_direct_system(Phi, L: int = 1) -> DirectSystem:
    if L < 1:
        raise ValueError("L must be at least 1")
    Phi = _phi(Phi)
    M, N = Phi.shape
    table = filter_cross_cumulant_table(Phi)
    r = np.arange(N)
    blocks = {}
    for a in (0, 1):
        for b in (0, 1):
            m1 = a * N - r + N - 1
            m2 = b * N - r + N - 1
            B = table[:, :, :, m1[:, None], m2[None, :]]
            blocks[(a, b)] = B.reshape(M ** 3, N * N)
    return DirectSystem(N=N, M=M, L=L, blocks=blocks)


def reconstruct_direct(c3y_lags, system: DirectSystem, rel_tol: float | None = None,
                       imag_warn: float = 1e-6) -> ReconstructionResult:
    """Per-frequency least squares on the DFT of the lag-stacked cross-cumulants.

    The ``(2L+1)^2`` solves are independent. The inverse DFT output is real
    for real data; its imaginary part is dropped and its relative size
    reported as ``imag_residue``.
    """
    t0 = time.perf_counter()
    P = system.n_lag_blocks
    M3, N2 = system.M ** 3, system.N ** 2
    y = np.asarray(c3y_lags, dtype=float)
    if y.shape != (P * M3,):
        raise ValueError(f"input must have length (2L+1)^2 M^3 = {P * M3}, got {y.shape}")
    qy = np.fft.fft(y.reshape(P, M3), axis=0)
    Q = system.frequency_blocks()
    if rel_tol is None:
        rel_tol = default_rank_tol((M3, N2))
    qx = np.zeros((P, N2), dtype=complex)
    ranks = []
    conds = []
    for ell in range(P):
        sol = solve_least_squares(Q[ell], qy[ell], rel_tol)
        qx[ell] = sol.solution
        ranks.append(sol.rank)
        conds.append(sol.condition_estimate)
    cx = np.fft.ifft(qx, axis=0).ravel()
    scale = np.linalg.norm(cx)
    imag = float(np.linalg.norm(cx.imag) / scale) if scale > 0 else 0.0
    if imag > imag_warn:
        log.warning("direct engine: imaginary residue %.3g exceeds %.1g", imag, imag_warn)
    x = cx.real
    return ReconstructionResult(
        c_tilde=x,
        residual_norm=float(np.linalg.norm(system.apply(x) - y)),
        rank_ok=all(rk == N2 for rk in ranks),
        runtime_ms=(time.perf_counter() - t0) * 1e3,
        rank=min(ranks),
        unknowns=N2,
        condition_estimate=float(max(conds)),
        imag_residue=imag,
        engine="direct",
    )


def direct_lag_layout(N: int, L: int) -> np.ndarray:
    """``(tau1, tau2)`` Nyquist lag of every entry of the long ``c3x`` vector.

    Lag block ``(t1, t2)`` runs ``t2 = L..-L`` (outer), ``t1 = L..-L``
    (inner); inside a block entry ``rN + s`` holds ``c3x(t1 N + r, t2 N + s)``.
    """
    out = []
    for t2 in range(L, -L - 1, -1):
        for t1 in range(L, -L - 1, -1):
            r, s = np.divmod(np.arange(N * N), N)
            out.append(np.stack([t1 * N + r, t2 * N + s], axis=1))
    return np.concatenate(out)


def direct_long_vector(c, N: int, L: int) -> np.ndarray:
    """Long ``c3x`` vector from any ``c(tau1, tau2)`` callable."""
    return np.array([c(int(a), int(b)) for a, b in direct_lag_layout(N, L)], dtype=float)
