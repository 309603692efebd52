"""Compressive sensing of third-order cumulants and higher-order cumulant slices.

Modules
-------
numerics      SVD least squares and DFT helpers
signal_gen    MA, harmonic and colored-noise block generators
sampler       Gaussian samplers and minimal sparse rulers
cumulant_est  empirical third moments and analytic ground truth
mapping       symmetry (P) and stationarity (T) mapping matrices
c3cs          full third-order cumulant reconstruction engines
ccss          diagonal cumulant slices from ruler samples
music         MUSIC pseudospectrum from a slice
experiments   seeded Monte-Carlo sweeps
"""
__version__ = "0.1.0"

from .c3cs import (
    DirectSystem,
    FeasibilityReport,
    ReconstructionResult,
    assemble_direct_system,
    feasibility,
    filter_cross_cumulant,
    min_feasible_M,
    reconstruct_alternative,
    reconstruct_direct,
)
from .ccss import CumulantSlice, estimate_slice, estimate_slice_uncompressed, slice_of_cumulant
from .cumulant_est import (
    StationaryCumulant,
    analytic_harmonic_slice,
    analytic_ma_cumulant,
    analytic_ma_slice,
    block_lag_cross_moments,
    empirical_stationary_cumulant,
    empirical_third_moment_vector,
)
from .mapping import MappingMatrix, build_P, build_T, compress_to_hexagon, compress_to_principal, expand
from .music import PseudoSpectrum, music
from .numerics import solve_least_squares
from .sampler import (
    SamplingMatrix,
    SparseRuler,
    compress,
    extend_ruler,
    gaussian_sampler,
    ruler_sampler,
    solve_minimal_ruler,
)
from .signal_gen import (
    DEFAULT_ARMA_NOISE,
    DEFAULT_HARMONICS,
    DEFAULT_MA3,
    DEFAULT_MA5_NOISE,
    BlockStream,
    ColoredNoiseModel,
    HarmonicModel,
    MaModel,
    generate_harmonic_blocks,
    generate_ma_blocks,
)
