"""``cumsense`` command-line tool.

Each subcommand reads an optional JSON config, applies flag overrides,
validates the merged settings and writes CSV files plus ``manifest.json``
into ``--out``. Example::

    cumsense feasibility --n 20
    cumsense ruler --n 16
    cumsense c3cs-mse --n 20 --k 2000,10000 --ratios 0.5:1.0:0.1 --trials 50 --out runs/fig4
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import __version__
from .c3cs import assemble_direct_system, reconstruct_alternative, reconstruct_direct, direct_lag_layout
from .ccss import estimate_slice
from .cumulant_est import (
    StationaryCumulant,
    analytic_ma_cumulant,
    block_lag_cross_moments,
    empirical_third_moment_vector,
)
from .experiments import c3cs_sweep, ccss_sweep, feasibility_table, music_run, ratio_grid
from .mapping import build_P, principal_lags
from .persist import config_hash, write_csv, write_json, write_manifest
from .sampler import SparseRuler, compress, gaussian_sampler, ruler_sampler, solve_minimal_ruler
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

log = logging.getLogger("cumsense")

KINDS = ("feasibility", "ruler", "gen", "c3cs-mse", "c3cs-recover", "ccss-nmse", "slice", "music")

# per-subcommand defaults; None means "not used by this subcommand"
_DEFAULTS = {
    "feasibility": dict(n=20),
    "ruler": dict(n=16),
    "gen": dict(n=20, k=[1000], seed=0, signal="ma"),
    "c3cs-mse": dict(n=20, k=[10000], ratios="0.5:1.0:0.1", trials=50, seed=0),
    "c3cs-recover": dict(n=20, m=12, k=[10000], seed=0, engine="alternative", lag_blocks=1),
    "ccss-nmse": dict(n=16, k=[1024, 4096], q=4, trials=50, seed=0),
    "slice": dict(n=16, k=[4096], q=4, seed=0),
    "music": dict(n=16, k=[4096], q=4, seed=0, order=12, grid=2048, harmonics=2),
}


@dataclass
class ExperimentConfig:
    kind: str
    n: int | None = None
    m: int | None = None
    k: list = field(default_factory=list)
    ratios: str | None = None
    q: int | None = None
    trials: int | None = None
    seed: int | None = None
    snr_db: float | None = None
    engine: str | None = None
    lag_blocks: int | None = None
    signal: str | None = None
    marks: list | None = None
    order: int | None = None
    grid: int | None = None
    harmonics: int | None = None
    model: dict | None = None
    noise: dict | None = None
    workers: int = 1
    out: str | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        names = {f.name for f in fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    def provenance(self) -> dict:
        """Settings that determine the output bytes (no paths, no worker count)."""
        d = self.to_dict()
        d.pop("out")
        d.pop("workers")
        return d

    def validate(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if self.n is None or self.n < 1:
            raise ValueError("--n must be a positive integer")
        if self.m is not None and not 1 <= self.m <= self.n:
            raise ValueError(f"--m must lie in 1..{self.n}")
        if any(int(k) < 1 for k in self.k):
            raise ValueError("--k values must be positive")
        if self.q is not None and self.q not in (2, 3, 4):
            raise ValueError("--q must be 2, 3 or 4")
        if self.trials is not None and self.trials < 1:
            raise ValueError("--trials must be positive")
        if self.engine is not None and self.engine not in ("alternative", "direct"):
            raise ValueError("--engine must be 'alternative' or 'direct'")
        if self.signal is not None and self.signal not in ("ma", "harmonic"):
            raise ValueError("--signal must be 'ma' or 'harmonic'")
        if self.ratios is not None:
            parse_ratios(self.ratios)
        self.ma_model()
        self.harmonic_model()
        self.noise_model(DEFAULT_MA5_NOISE)

    def ma_model(self) -> MaModel:
        return MaModel.from_dict(self.model) if self.model and "coefficients" in self.model else DEFAULT_MA3

    def harmonic_model(self) -> HarmonicModel:
        return HarmonicModel.from_dict(self.model) if self.model and "frequencies" in self.model else DEFAULT_HARMONICS

    def noise_model(self, default: ColoredNoiseModel) -> ColoredNoiseModel | None:
        """Noise filter at ``snr_db``; None (noise-free) when no SNR is set."""
        if self.snr_db is None:
            return None
        base = ColoredNoiseModel.from_dict(self.noise) if self.noise else default
        noise = ColoredNoiseModel(base.ma_coefficients, base.ar_coefficients, self.snr_db)
        noise.check_stable()
        return noise


def parse_ratios(text: str):
    try:
        lo, hi, step = (float(t) for t in text.split(":"))
    except ValueError:
        raise ValueError(f"--ratios expects lo:hi:step, got {text!r}") from None
    return lo, hi, step


def _int_list(text: str):
    return [int(t) for t in text.split(",") if t]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cumsense", description="Compressive higher-order cumulant sensing experiments.")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="kind", required=True)
    for kind in KINDS:
        s = sub.add_parser(kind)
        s.add_argument("--config", type=Path, help="JSON file with settings; flags override it")
        s.add_argument("--n", type=int, help="block length N")
        s.add_argument("--out", type=str, help="output directory")
        if kind in ("feasibility", "ruler"):
            continue
        s.add_argument("--k", type=_int_list, help="block count(s), comma separated")
        s.add_argument("--seed", type=int)
        s.add_argument("--snr-db", type=float, dest="snr_db", help="add colored Gaussian noise at this SNR")
        if kind in ("c3cs-mse", "ccss-nmse"):
            s.add_argument("--ratios", type=str, help="compression ratios lo:hi:step")
            s.add_argument("--trials", type=int)
            s.add_argument("--workers", type=int, help="parallel worker processes")
        if kind in ("c3cs-recover",):
            s.add_argument("--m", type=int, help="number of compressive branches M")
            s.add_argument("--engine", choices=("alternative", "direct"))
            s.add_argument("--lag-blocks", type=int, dest="lag_blocks", help="L for the direct engine")
        if kind == "gen":
            s.add_argument("--signal", choices=("ma", "harmonic"))
        if kind in ("ccss-nmse", "slice", "music"):
            s.add_argument("--q", type=int)
        if kind in ("slice", "music"):
            s.add_argument("--marks", type=_int_list, help="ruler marks (default: minimal ruler)")
        if kind == "music":
            s.add_argument("--order", type=int, help="lag matrix order")
            s.add_argument("--grid", type=int, help="frequency grid size")
            s.add_argument("--harmonics", type=int, help="number of real sinusoids")
    return p


def config_from_args(args) -> ExperimentConfig:
    merged = {"kind": args.kind, **_DEFAULTS[args.kind]}
    if getattr(args, "config", None) is not None:
        loaded = json.loads(Path(args.config).read_text())
        loaded.pop("kind", None)
        merged.update(loaded)
    for name in ("n", "m", "k", "ratios", "q", "trials", "seed", "snr_db", "engine", "lag_blocks",
                 "signal", "marks", "order", "grid", "harmonics", "workers", "out"):
        v = getattr(args, name, None)
        if v is not None:
            merged[name] = v
    cfg = ExperimentConfig.from_dict(merged)
    cfg.validate()
    return cfg


def _ruler_for(cfg: ExperimentConfig) -> SparseRuler:
    if cfg.marks:
        return SparseRuler(cfg.n, tuple(cfg.marks), minimal=False)
    return solve_minimal_ruler(cfg.n)


def _run_feasibility(cfg, out):
    table = feasibility_table(cfg.n)
    print(f"N={cfg.n}: min M (N(N+1)/2 count) = {table['min_M_principal']}, "
          f"min M (3N^2-3N+1 count) = {table['min_M_hexagon']}")
    if out is None:
        return []
    rows = [(r.M, r.unique_y_count, r.dof_principal, r.dof_hexagon, r.feasible_principal, r.feasible_hexagon)
            for r in table["rows"]]
    cols = ("M", "unique_y_count", "dof_principal", "dof_hexagon", "feasible_principal", "feasible_hexagon")
    return [write_csv(out / "feasibility.csv", cols, rows, cfg.provenance())]


def _run_ruler(cfg, out):
    ruler = solve_minimal_ruler(cfg.n)
    tag = "" if ruler.minimal else " (not proven minimal)"
    print(f"N={cfg.n} size={ruler.size}{tag}: {ruler}")
    if out is None:
        return []
    return [write_csv(out / "ruler.csv", ("mark",), [(m,) for m in ruler.marks], cfg.provenance())]


def _run_gen(cfg, out):
    K = cfg.k[0]
    if cfg.signal == "harmonic":
        stream = generate_harmonic_blocks(cfg.harmonic_model(), cfg.noise_model(DEFAULT_ARMA_NOISE), cfg.n, K, cfg.seed)
    else:
        stream = generate_ma_blocks(cfg.ma_model(), cfg.n, K, cfg.seed)
        noise = cfg.noise_model(DEFAULT_MA5_NOISE)
        if noise is not None:
            stream = add_colored_noise(stream, noise, cfg.seed + 1)
    print(f"generated {K} blocks of length {cfg.n}")
    if out is None:
        return []
    cols = tuple(f"x{i}" for i in range(cfg.n))
    return [write_csv(out / "blocks.csv", cols, stream.blocks.tolist(), cfg.provenance())]


def _sweep_rows(points):
    return [p.row() for p in points]


_SWEEP_COLS = ("ratio", "M", "K", "mean_mse", "stderr", "rank_ok_frac")


def _run_c3cs_mse(cfg, out):
    lo, hi, step = parse_ratios(cfg.ratios)
    points = c3cs_sweep(cfg.n, ratio_grid(lo, hi, step, cfg.n), cfg.k, cfg.trials, cfg.seed,
                        cfg.ma_model(), cfg.noise_model(DEFAULT_MA5_NOISE), cfg.workers)
    for p in points:
        print(f"K={p.K:6d} M/N={p.ratio:.2f} mse={p.mean:.4g} +- {p.stderr:.2g} rank_ok={p.rank_ok_frac:.2f}")
    if out is None:
        return []
    return [write_csv(out / "c3cs_mse.csv", _SWEEP_COLS, _sweep_rows(points), cfg.provenance())]


def _run_ccss_nmse(cfg, out):
    base = solve_minimal_ruler(cfg.n).size
    if cfg.ratios:
        lo, hi, step = parse_ratios(cfg.ratios)
        Ms = [M for _, M in ratio_grid(lo, hi, step, cfg.n)]
    else:
        Ms = list(range(base, cfg.n + 1))
    points = ccss_sweep(cfg.n, Ms, cfg.k, cfg.q, cfg.trials, cfg.seed, cfg.harmonic_model(),
                        cfg.noise_model(DEFAULT_ARMA_NOISE), cfg.workers)
    for p in points:
        print(f"K={p.K:6d} M/N={p.ratio:.3f} nmse={p.mean:.4g} +- {p.stderr:.2g}")
    if out is None:
        return []
    cols = ("ratio", "M", "K", "mean_nmse", "stderr", "rank_ok_frac")
    return [write_csv(out / "ccss_nmse.csv", cols, _sweep_rows(points), cfg.provenance())]


def _run_c3cs_recover(cfg, out):
    model, N, M, K = cfg.ma_model(), cfg.n, cfg.m, cfg.k[0]
    seeds = np.random.SeedSequence(cfg.seed).spawn(3)
    s_phi, s_sig, s_noise = (int(s.generate_state(1)[0]) for s in seeds)
    Phi = gaussian_sampler(M, N, s_phi)
    noise = cfg.noise_model(DEFAULT_MA5_NOISE)
    if cfg.engine == "direct":
        L = cfg.lag_blocks
        x = generate_ma_blocks(model, N, K, s_sig, contiguous=True)
        if noise is not None:
            x = add_colored_noise(x, noise, s_noise)
        res = reconstruct_direct(block_lag_cross_moments(compress(Phi, x), L), assemble_direct_system(Phi, L))
        truth = analytic_ma_cumulant(model, (L + 1) * N)
        lags = direct_lag_layout(N, L)
    else:
        x = generate_ma_blocks(model, N, K, s_sig)
        if noise is not None:
            x = add_colored_noise(x, noise, s_noise)
        res = reconstruct_alternative(empirical_third_moment_vector(compress(Phi, x)), Phi, build_P(N))
        truth = analytic_ma_cumulant(model, N)
        lags = principal_lags(N).lags
    ref = np.array([truth.at(int(a), int(b)) for a, b in lags])
    summary = dict(res.summary(), nmse=float(np.sum((res.c_tilde - ref) ** 2) / np.sum(ref ** 2)))
    print(json.dumps(summary, sort_keys=True))
    if out is None:
        return []
    rows = [(int(a), int(b), v, t) for (a, b), v, t in zip(lags, res.c_tilde, ref)]
    summary.pop("runtime_ms")
    summary["config_hash"] = config_hash(cfg.provenance())
    return [
        write_csv(out / "reconstruction.csv", ("tau1", "tau2", "value", "truth"), rows, cfg.provenance()),
        write_json(out / "reconstruction_summary.json", summary),
    ]


def _slice_stream(cfg, ruler):
    noise = cfg.noise_model(DEFAULT_ARMA_NOISE)
    x = generate_harmonic_blocks(cfg.harmonic_model(), noise, cfg.n, cfg.k[0], cfg.seed)
    return compress(ruler_sampler(ruler), x)


def _run_slice(cfg, out):
    ruler = _ruler_for(cfg)
    slc = estimate_slice(_slice_stream(cfg, ruler), ruler, cfg.q)
    print(f"q={cfg.q} slice from marks {ruler}: " + " ".join(f"{v:.4g}" for v in slc.nonnegative()))
    if out is None:
        return []
    return [write_csv(out / "slice.csv", ("tau", "value", "pair_count"), slc.rows(), cfg.provenance())]


def _run_music(cfg, out):
    slc, spec = music_run(cfg.n, cfg.k[0], cfg.seed, cfg.marks, cfg.q, cfg.harmonics, cfg.order, cfg.grid,
                          cfg.harmonic_model(), cfg.noise_model(DEFAULT_ARMA_NOISE))
    print("peaks: " + " ".join(f"{w:.4f}" for w in spec.peaks))
    if out is None:
        return []
    return [
        write_csv(out / "spectrum.csv", ("w", "value"), spec.rows(), cfg.provenance()),
        write_csv(out / "peaks.csv", ("w",), [(w,) for w in spec.peaks], cfg.provenance()),
    ]


_RUNNERS = {
    "feasibility": _run_feasibility,
    "ruler": _run_ruler,
    "gen": _run_gen,
    "c3cs-mse": _run_c3cs_mse,
    "c3cs-recover": _run_c3cs_recover,
    "ccss-nmse": _run_ccss_nmse,
    "slice": _run_slice,
    "music": _run_music,
}


def run(cfg: ExperimentConfig) -> list:
    """Execute one experiment; returns the files written (empty without ``out``)."""
    cfg.validate()
    out = Path(cfg.out) if cfg.out else None
    files = _RUNNERS[cfg.kind](cfg, out)
    if out is not None:
        files.append(write_manifest(out, cfg.provenance(), files, __version__))
    return files


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = config_from_args(args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"cumsense: error: {exc}", file=sys.stderr)
        return 2
    try:
        run(cfg)
    except OSError as exc:
        print(f"cumsense: I/O error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"cumsense: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
