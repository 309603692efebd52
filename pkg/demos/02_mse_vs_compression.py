"""MSE of the reconstructed cumulant as the compression ratio M/N grows.

A short version of the full sweep (``cumsense c3cs-mse``): five trials per
point instead of fifty. The error falls steeply once M/N passes about 0.6.
"""
from cumsense.experiments import c3cs_sweep, ratio_grid
from cumsense.signal_gen import DEFAULT_MA5_NOISE

N = 20
grid = ratio_grid(0.5, 1.0, 0.1, N)

print("noise-free, K=10000")
for p in c3cs_sweep(N, grid, [10000], trials=5, seed=0):
    print(f"  M/N={p.ratio:.1f}  MSE={p.mean:.4f} +- {p.stderr:.4f}")

print("0 dB colored Gaussian noise, M/N=0.8")
for p in c3cs_sweep(N, [(0.8, 16)], [2000, 10000], trials=5, seed=0, noise=DEFAULT_MA5_NOISE):
    print(f"  K={p.K:5d}  MSE={p.mean:.4f}")
