"""Binary structure matrices that expand compact cumulant vectors.

Both mappings have exactly one nonzero per row, so they are stored as a
row -> column index array and applied by fancy indexing.

Vectorisation convention: tensor entry ``(i1, i2, i3)`` (1-based, side
``d``) sits at 1-based position ``(i1-1) d^2 + (i2-1) d + i3``, which is
numpy's C order on the 0-based tensor. ``np.kron(a, np.kron(b, c))`` uses
the same order.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "MappingMatrix",
    "LagIndexSet",
    "principal_lags",
    "hexagon_lags",
    "principal_position",
    "vec_index",
    "build_P",
    "build_T",
    "expand",
    "compress_to_principal",
    "compress_to_hexagon",
]


@dataclass(frozen=True)
class MappingMatrix:
    n_rows: int
    n_cols: int
    row_to_col: np.ndarray
    name: str = ""

    def __post_init__(self):
        r = np.asarray(self.row_to_col, dtype=np.intp)
        if r.shape != (self.n_rows,):
            raise ValueError("row_to_col must have one entry per row")
        if r.size and (r.min() < 0 or r.max() >= self.n_cols):
            raise ValueError("column index out of range")
        r.setflags(write=False)
        object.__setattr__(self, "row_to_col", r)

    @property
    def shape(self):
        return (self.n_rows, self.n_cols)

    def to_dense(self) -> np.ndarray:
        A = np.zeros(self.shape)
        A[np.arange(self.n_rows), self.row_to_col] = 1.0
        return A

    def column_counts(self) -> np.ndarray:
        return np.bincount(self.row_to_col, minlength=self.n_cols)

    def rows_of(self, col: int) -> np.ndarray:
        return np.flatnonzero(self.row_to_col == col)


@dataclass(frozen=True)
class LagIndexSet:
    N: int
    lags: np.ndarray  # (n, 2) int, row = (tau1, tau2)

    def __len__(self):
        return self.lags.shape[0]

    def position(self) -> dict:
        return {(int(a), int(b)): i for i, (a, b) in enumerate(self.lags)}


def principal_lags(N: int) -> LagIndexSet:
    """``(0,0), (0,1), ..., (0,N-1), (1,1), ..., (N-1,N-1)``."""
    lags = [(a, b) for a in range(N) for b in range(a, N)]
    return LagIndexSet(N, np.array(lags, dtype=int).reshape(-1, 2))


def hexagon_lags(N: int) -> LagIndexSet:
    """Lags ``(j-i, l-i)`` reachable inside one block, lexicographic order."""
    r = range(1 - N, N)
    lags = [(a, b) for a in r for b in r if abs(a - b) <= N - 1]
    return LagIndexSet(N, np.array(lags, dtype=int).reshape(-1, 2))


def principal_position(N: int, a: int, b: int) -> int:
    """0-based position of ``c(a, b)``, ``0 <= a <= b < N``, in the principal vector."""
    return a * N - a * (a - 1) // 2 + (b - a)


def vec_index(i1: int, i2: int, i3: int, d: int) -> int:
    """1-based position of tensor entry ``(i1, i2, i3)`` after vectorisation."""
    for i in (i1, i2, i3):
        if not 1 <= i <= d:
            raise ValueError(f"index {i} outside 1..{d}")
    return (i1 - 1) * d * d + (i2 - 1) * d + i3


def build_P(N: int) -> MappingMatrix:
    """Symmetry mapping from the principal-region vector to the ``N^3`` vector.

    For ``u in [0, N-1]``, ``v in [u, N-1]``, ``w in [1, N-v]`` the six
    1-based rows ``p_1..p_6(u, v, w)`` all get a one in column ``q(u, v)``.
    Coinciding rows (``u == 0`` or ``u == v``) collapse to a single entry.
    """
    if N < 1:
        raise ValueError("N must be positive")
    row_to_col = np.full(N ** 3, -1, dtype=np.intp)
    N2 = N * N
    for u in range(N):
        for v in range(u, N):
            if u == 0:
                q = v - u + 1
            else:
                q = sum(N - j + 1 for j in range(1, u + 1)) + v - u + 1
            w = np.arange(1, N - v + 1)
            rows = (
                (w - 1) * N2 + (w + v - 1) * N + (w + u),
                (w - 1) * N2 + (w + u - 1) * N + (w + v),
                (w + v - 1) * N2 + (w - 1) * N + (w + u),
                (w + v - 1) * N2 + (w + u - 1) * N + w,
                (w + u - 1) * N2 + (w - 1) * N + (w + v),
                (w + u - 1) * N2 + (w + v - 1) * N + w,
            )
            for p in rows:
                prev = row_to_col[p - 1]
                if np.any((prev >= 0) & (prev != q - 1)):
                    raise AssertionError("conflicting assignment in P_N")
                row_to_col[p - 1] = q - 1
    if np.any(row_to_col < 0):
        raise AssertionError("P_N left a row without a nonzero")
    return MappingMatrix(N ** 3, N * (N + 1) // 2, row_to_col, "P")


def build_T(N: int) -> MappingMatrix:
    """Stationarity mapping from the hexagon lag vector to the ``N^3`` vector."""
    if N < 1:
        raise ValueError("N must be positive")
    hexa = hexagon_lags(N)
    pos = hexa.position()
    i, j, l = np.indices((N, N, N)).reshape(3, -1)
    row_to_col = np.array([pos[(int(b), int(c))] for b, c in zip(j - i, l - i)], dtype=np.intp)
    return MappingMatrix(N ** 3, len(hexa), row_to_col, "T")


def expand(c_compact, mapping: MappingMatrix) -> np.ndarray:
    c = np.asarray(c_compact)
    if c.shape != (mapping.n_cols,):
        raise ValueError(f"compact vector must have length {mapping.n_cols}, got {c.shape}")
    return c[mapping.row_to_col]


def compress_to_principal(c) -> np.ndarray:
    """Stack ``c(a, b)`` for ``0 <= a <= b <= N-1`` in principal order.

    ``c`` is anything with an ``N`` attribute and an ``at(tau1, tau2)``
    method, e.g. a :class:`~cumsense.cumulant_est.StationaryCumulant`.
    """
    lags = principal_lags(c.N).lags
    return np.array([c.at(int(a), int(b)) for a, b in lags], dtype=float)


def compress_to_hexagon(c) -> np.ndarray:
    lags = hexagon_lags(c.N).lags
    return np.array([c.at(int(a), int(b)) for a, b in lags], dtype=float)
