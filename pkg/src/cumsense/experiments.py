"""Seeded Monte-Carlo sweeps behind the command-line tool and the demos.

Every trial derives its own seeds from ``(base seed, sweep point, trial)``
through ``numpy.random.SeedSequence``, so a trial's result does not depend
on which worker ran it or in what order. Aggregation always walks trials in
index order.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .c3cs import feasibility, min_feasible_M, reconstruct_alternative
from .ccss import CumulantSlice, estimate_slice
from .cumulant_est import analytic_harmonic_slice, analytic_ma_cumulant, empirical_third_moment_vector
from .mapping import build_P, compress_to_principal, expand
from .music import music
from .sampler import SparseRuler, compress, extend_ruler, gaussian_sampler, ruler_sampler, solve_minimal_ruler
from .signal_gen import (
    DEFAULT_ARMA_NOISE,
    DEFAULT_HARMONICS,
    DEFAULT_MA3,
    DEFAULT_MA5_NOISE,
    ColoredNoiseModel,
    HarmonicModel,
    MaModel,
    add_colored_noise,
    generate_harmonic_blocks,
    generate_ma_blocks,
)

__all__ = [
    "SweepPoint",
    "trial_seeds",
    "ratio_grid",
    "c3cs_trial",
    "c3cs_sweep",
    "ccss_trial",
    "ccss_sweep",
    "music_run",
    "feasibility_table",
]


@dataclass(frozen=True)
class SweepPoint:
    ratio: float
    M: int
    K: int
    mean: float
    stderr: float
    rank_ok_frac: float
    trials: int

    def row(self):
        return (self.ratio, self.M, self.K, self.mean, self.stderr, self.rank_ok_frac)


def trial_seeds(seed: int, key: tuple, trial: int, n: int = 3) -> list:
    """``n`` independent integer seeds for one trial of one sweep point."""
    ss = np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key) + (int(trial),))
    return [int(s.generate_state(1)[0]) for s in ss.spawn(n)]


def ratio_grid(lo: float, hi: float, step: float, N: int) -> list:
    """``(ratio, M)`` pairs with ``M = round(ratio * N)``, duplicates dropped."""
    if step <= 0 or lo > hi:
        raise ValueError("ratio grid needs lo <= hi and step > 0")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    out, seen = [], set()
    for i in range(count):
        r = round(lo + i * step, 10)
        M = int(round(r * N))
        if not 1 <= M <= N:
            raise ValueError(f"ratio {r} gives M={M} outside 1..{N}")
        if M not in seen:
            seen.add(M)
            out.append((r, M))
    return out


def _map(fn, jobs, workers):
    if workers and workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(fn, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    return [fn(j) for j in jobs]


def _summarise(values):
    v = np.asarray(values, dtype=float)
    se = float(v.std(ddof=1) / np.sqrt(v.size)) if v.size > 1 else 0.0
    return float(v.mean()), se


def c3cs_trial(N: int, M: int, K: int, seeds, model: MaModel = DEFAULT_MA3,
               noise: ColoredNoiseModel | None = None) -> tuple:
    """One alternative-engine reconstruction from ``K`` simulated blocks.

    Returns ``(mse, rank_ok)`` where the error is normalised and measured on
    the full vectorised ``N^3`` cumulant tensor.
    """
    s_phi, s_sig, s_noise = seeds
    P = build_P(N)
    truth = expand(compress_to_principal(analytic_ma_cumulant(model, N)), P)
    Phi = gaussian_sampler(M, N, s_phi)
    x = generate_ma_blocks(model, N, K, s_sig)
    if noise is not None:
        x = add_colored_noise(x, noise, s_noise)
    y = compress(Phi, x)
    res = reconstruct_alternative(empirical_third_moment_vector(y), Phi, P)
    est = expand(res.c_tilde, P)
    return float(np.sum((est - truth) ** 2) / np.sum(truth ** 2)), res.rank_ok


def _c3cs_job(args):
    N, M, K, seeds, model, noise = args
    return c3cs_trial(N, M, K, seeds, model, noise)


def c3cs_sweep(N: int, ratios, Ks, trials: int, seed: int, model: MaModel = DEFAULT_MA3,
               noise: ColoredNoiseModel | None = None, workers: int = 1) -> list:
    """Mean reconstruction MSE over ``trials`` for every ``(K, ratio)``."""
    jobs, index = [], []
    for ki, K in enumerate(Ks):
        for ri, (r, M) in enumerate(ratios):
            for t in range(trials):
                jobs.append((N, M, K, trial_seeds(seed, (ki, ri), t), model, noise))
                index.append((ki, ri))
    results = _map(_c3cs_job, jobs, workers)
    out = []
    for ki, K in enumerate(Ks):
        for ri, (r, M) in enumerate(ratios):
            sel = [res for res, key in zip(results, index) if key == (ki, ri)]
            mean, se = _summarise([m for m, _ in sel])
            ok = float(np.mean([k for _, k in sel]))
            out.append(SweepPoint(r, M, K, mean, se, ok, trials))
    return out


def _nmse(est: np.ndarray, truth: np.ndarray) -> float:
    return float(np.sum((est - truth) ** 2) / np.sum(truth ** 2))


def ccss_trial(N: int, M: int, K: int, q: int, seeds, model: HarmonicModel = DEFAULT_HARMONICS,
               noise: ColoredNoiseModel | None = None) -> float:
    """NMSE of one sparse-ruler slice estimate of random-phase harmonics.

    The sampler is the minimal ruler padded with ``M - size`` random marks.
    """
    s_ruler, s_sig, _ = seeds
    ruler = extend_ruler(solve_minimal_ruler(N), M, s_ruler)
    x = generate_harmonic_blocks(model, noise, N, K, s_sig)
    est = estimate_slice(compress(ruler_sampler(ruler), x), ruler, q)
    return _nmse(est.values, analytic_harmonic_slice(model, q, N))


def _ccss_job(args):
    return ccss_trial(*args)


def ccss_sweep(N: int, Ms, Ks, q: int, trials: int, seed: int, model: HarmonicModel = DEFAULT_HARMONICS,
               noise: ColoredNoiseModel | None = None, workers: int = 1) -> list:
    """Mean slice NMSE for every ``(K, M)``; ``M`` below the ruler size is rejected."""
    base = solve_minimal_ruler(N).size
    for M in Ms:
        if not base <= M <= N:
            raise ValueError(f"M={M} outside [{base}, {N}] for a length-{N} ruler")
    jobs, index = [], []
    for ki, K in enumerate(Ks):
        for mi, M in enumerate(Ms):
            for t in range(trials):
                jobs.append((N, M, K, q, trial_seeds(seed, (ki, mi), t), model, noise))
                index.append((ki, mi))
    results = _map(_ccss_job, jobs, workers)
    out = []
    for ki, K in enumerate(Ks):
        for mi, M in enumerate(Ms):
            mean, se = _summarise([r for r, key in zip(results, index) if key == (ki, mi)])
            out.append(SweepPoint(M / N, M, K, mean, se, 1.0, trials))
    return out


def music_run(N: int = 16, K: int = 4096, seed: int = 0, marks=None, q: int = 4,
              num_real_harmonics: int = 2, matrix_order: int = 12, grid_size: int = 2048,
              model: HarmonicModel = DEFAULT_HARMONICS, noise: ColoredNoiseModel | None = DEFAULT_ARMA_NOISE):
    """Slice estimate and MUSIC pseudospectrum for one noisy harmonic record.

    ``marks`` defaults to the minimal ruler for ``N``.
    """
    ruler = solve_minimal_ruler(N) if marks is None else SparseRuler(N, tuple(marks), minimal=False)
    x = generate_harmonic_blocks(model, noise, N, K, seed)
    slc: CumulantSlice = estimate_slice(compress(ruler_sampler(ruler), x), ruler, q)
    return slc, music(slc, num_real_harmonics, matrix_order, grid_size)


def feasibility_table(N: int) -> dict:
    """Every ``M`` in ``1..N`` with both count tests, plus the two minima."""
    return {
        "rows": [feasibility(N, M) for M in range(1, N + 1)],
        "min_M_principal": min_feasible_M(N, "principal"),
        "min_M_hexagon": min_feasible_M(N, "hexagon"),
    }


DEFAULT_C3CS_NOISE = DEFAULT_MA5_NOISE
DEFAULT_CCSS_NOISE = DEFAULT_ARMA_NOISE
