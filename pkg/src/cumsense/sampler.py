"""Compressive sampling matrices and minimal sparse rulers."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .signal_gen import BlockStream

__all__ = [
    "SamplingMatrix",
    "SparseRuler",
    "EXACT_RULER_LIMIT",
    "gaussian_sampler",
    "solve_minimal_ruler",
    "ruler_sampler",
    "extend_ruler",
    "compress",
]

EXACT_RULER_LIMIT = 60


@dataclass(frozen=True)
class SamplingMatrix:
    """An ``M x N`` compression operator.

    For ``kind == "ruler"`` the rows are the standard basis rows picked out
    by ``marks`` and ``y_i[k] = x[kN + marks[i]]``.
    """

    matrix: np.ndarray
    kind: str
    marks: tuple | None = None

    def __post_init__(self):
        A = np.asarray(self.matrix, dtype=float)
        if A.ndim != 2:
            raise ValueError("sampling matrix must be 2-D")
        if A.shape[0] > A.shape[1]:
            raise ValueError(f"M={A.shape[0]} exceeds N={A.shape[1]}: no compression")
        if self.kind not in ("gaussian", "ruler", "custom"):
            raise ValueError(f"unknown sampler kind {self.kind!r}")
        A.setflags(write=False)
        object.__setattr__(self, "matrix", A)

    @property
    def M(self) -> int:
        return self.matrix.shape[0]

    @property
    def N(self) -> int:
        return self.matrix.shape[1]

    @property
    def ratio(self) -> float:
        return self.M / self.N


@dataclass(frozen=True)
class SparseRuler:
    """Mark set on ``{0, ..., N-1}`` whose differences cover every lag.

    ``minimal`` is False when the ruler came from the fallback construction
    or was padded with extra marks.
    """

    N: int
    marks: tuple
    minimal: bool = True

    def __post_init__(self):
        m = tuple(sorted(int(x) for x in self.marks))
        if len(set(m)) != len(m):
            raise ValueError("ruler marks must be distinct")
        if not m or m[0] != 0 or m[-1] != self.N - 1:
            raise ValueError(f"ruler must contain 0 and N-1={self.N - 1}")
        object.__setattr__(self, "marks", m)
        missing = set(range(self.N)) - self.difference_set()
        if missing:
            raise ValueError(f"marks {m} do not cover lags {sorted(missing)}")

    @property
    def size(self) -> int:
        return len(self.marks)

    def difference_set(self) -> set:
        """Nonnegative differences ``m_j - m_i``; the negative half mirrors it."""
        return {b - a for a in self.marks for b in self.marks if b >= a}

    def __str__(self):
        return ",".join(str(m) for m in self.marks)


def gaussian_sampler(M: int, N: int, seed: int) -> SamplingMatrix:
    if M < 1 or N < 1:
        raise ValueError("M and N must be positive")
    if M > N:
        raise ValueError(f"M={M} > N={N}: no compression achieved")
    rng = np.random.default_rng(seed)
    return SamplingMatrix(rng.standard_normal((M, N)), "gaussian")


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _new_differences(marks: int, p: int) -> int:
    d = 0
    for q in _bits(marks):
        d |= 1 << abs(p - q)
    return d


def _search(L: int, k: int):
    """Any ruler of length ``L`` with exactly ``k`` marks, as a bitmask, or None.

    Branch on the largest lag not yet measured: some pair ``(a, a + D)`` of
    the final ruler measures it, so trying every ``a`` is exhaustive. Each
    branch adds at least one mark. Failed mark sets are memoised.
    """
    full = (1 << (L + 1)) - 1
    dead = set()

    def dfs(marks, cov, count):
        if cov == full:
            return marks
        left = k - count
        if left <= 0 or marks in dead:
            return None
        uncovered = L + 1 - bin(cov).count("1")
        # r new marks add at most r*count + r(r-1)/2 differences
        if left * count + left * (left - 1) // 2 < uncovered:
            dead.add(marks)
            return None
        D = (full & ~cov).bit_length() - 1
        for a in range(L - D + 1):
            b = a + D
            need = (not (marks >> a) & 1) + (not (marks >> b) & 1)
            if need > left:
                continue
            ms, cv = marks, cov
            for p in (a, b):
                if not (ms >> p) & 1:
                    cv |= _new_differences(ms, p)
                    ms |= 1 << p
            found = dfs(ms, cv, count + need)
            if found is not None:
                return found
        dead.add(marks)
        return None

    # lag L-1 needs mark 1 or mark L-1; reflection lets us fix mark 1
    marks = 1 | (1 << L) | 2
    cov = 1 | (1 << L) | (1 << 1) | (1 << (L - 1))
    return dfs(marks, cov, 3)


def _two_level_ruler(N: int) -> tuple:
    # marks 0..a-1 plus multiples of a plus N-1; pick the a with fewest marks
    L = N - 1
    best = None
    for a in range(1, L + 1):
        m = set(range(a)) | set(range(0, L + 1, a)) | {L}
        if best is None or len(m) < len(best):
            best = m
    return tuple(sorted(best))


def solve_minimal_ruler(N: int, exact_limit: int = EXACT_RULER_LIMIT) -> SparseRuler:
    """Smallest mark set on ``{0..N-1}`` whose differences cover ``0..N-1``.

    Exact for ``N <= exact_limit``. Beyond the limit a two-level
    construction (a dense prefix plus a uniform coarse grid) is returned
    with ``minimal=False``.
    """
    if N < 1:
        raise ValueError("N must be positive")
    if N == 1:
        return SparseRuler(1, (0,))
    if N == 2:
        return SparseRuler(2, (0, 1))
    if N > exact_limit:
        return SparseRuler(N, _two_level_ruler(N), minimal=False)
    L = N - 1
    k = max(3, math.ceil((1 + math.sqrt(1 + 8 * L)) / 2))
    while True:
        found = _search(L, k)
        if found is not None:
            return SparseRuler(N, tuple(_bits(found)))
        k += 1


def ruler_sampler(ruler: SparseRuler) -> SamplingMatrix:
    Phi = np.zeros((ruler.size, ruler.N))
    Phi[np.arange(ruler.size), ruler.marks] = 1.0
    return SamplingMatrix(Phi, "ruler", ruler.marks)


def extend_ruler(ruler: SparseRuler, M: int, seed: int) -> SparseRuler:
    """Add ``M - ruler.size`` marks drawn uniformly from the unused positions."""
    if M < ruler.size or M > ruler.N:
        raise ValueError(f"M must lie in [{ruler.size}, {ruler.N}]")
    if M == ruler.size:
        return ruler
    rng = np.random.default_rng(seed)
    unused = np.setdiff1d(np.arange(ruler.N), ruler.marks)
    extra = rng.choice(unused, size=M - ruler.size, replace=False)
    return SparseRuler(ruler.N, tuple(ruler.marks) + tuple(int(e) for e in extra), minimal=False)


def compress(Phi: SamplingMatrix, stream: BlockStream) -> BlockStream:
    """``y[k] = Phi x[k]`` for every block; ruler samplers just index."""
    if Phi.N != stream.block_length:
        raise ValueError(f"sampler expects blocks of length {Phi.N}, got {stream.block_length}")
    if Phi.kind == "ruler":
        y = stream.blocks[:, list(Phi.marks)]
    else:
        y = stream.blocks @ Phi.matrix.T
    meta = dict(stream.meta, sampler=Phi.kind, M=Phi.M, N=Phi.N)
    return BlockStream(y, meta)
