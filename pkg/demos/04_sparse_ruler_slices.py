"""Diagonal cumulant slices from 7 of every 16 samples.

A minimal sparse ruler keeps at least one sample pair at every lag, so the
slice ``c_q(tau, ..., tau)`` can be averaged directly from the kept samples.
"""
import numpy as np

from cumsense import compress, estimate_slice, generate_ma_blocks, ruler_sampler, solve_minimal_ruler
from cumsense.cumulant_est import analytic_ma_slice
from cumsense.signal_gen import DEFAULT_MA3

np.set_printoptions(suppress=True, precision=2)
N = 16
ruler = solve_minimal_ruler(N)
print(f"minimal ruler for N={N}: {{{ruler}}} ({ruler.size} marks, M/N = {ruler.size / N:.2f})")

y = compress(ruler_sampler(ruler), generate_ma_blocks(DEFAULT_MA3, N, 20000, 0))
for q in (2, 3, 4):
    est = estimate_slice(y, ruler, q)
    truth = analytic_ma_slice(DEFAULT_MA3, q, N)
    print(f"q={q}: tau=0..4 estimate", np.round(est.nonnegative()[:5], 2),
          " truth", np.round(truth[N - 1:N + 4], 2))
