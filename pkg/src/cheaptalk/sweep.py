"""Parameter sweeps: sampled configurations, replicate fan-out and aggregation.

Every sample gets its own seed derived from ``(base_seed, sample_id)``, so the
rows of a sweep do not depend on how many worker processes ran it.
"""
from __future__ import annotations

import csv
import itertools
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from . import __version__
from .engine import RNG_ALGORITHM, ConfigError, RunConfig, TopologySpec, run
from .game import GameParams
from .strategy import DISPLAY_ORDER, N_STRATEGIES, index_of

log = logging.getLogger(__name__)

MODES = ("random_sample", "grid")
FREQ_COLS = [f"mean_freq_{name}" for name in DISPLAY_ORDER]
RAW_HEADER = ["sample_id", "seed", "r", "gamma", "mu", "topology", "mean_coop", "std_coop",
              *FREQ_COLS, "status"]
BINNED_HEADER = ["bin_lo_log10mu", "bin_hi_log10mu", "count", "mean_coop", "std_coop",
                 *FREQ_COLS, *[f"std_freq_{name}" for name in DISPLAY_ORDER], "empty"]
HIST_HEADER = ["bin_lo", "bin_hi", "count"]
_DISPLAY_IDX = [index_of(name) for name in DISPLAY_ORDER]


def _check_range(name, rng, lo_bound=None, hi_bound=None):
    lo, hi = (float(x) for x in rng)
    if lo > hi:
        raise ConfigError(f"{name} range is reversed: [{lo}, {hi}]")
    if lo_bound is not None and lo < lo_bound:
        raise ConfigError(f"{name} range must be >= {lo_bound}")
    if hi_bound is not None and hi > hi_bound:
        raise ConfigError(f"{name} range must be <= {hi_bound}")
    return lo, hi


@dataclass(frozen=True)
class SweepSpec:
    n_samples: int = 2000
    r_range: tuple = (0.0, 0.3)
    gamma_range: tuple = (0.0, 0.3)
    mu_range: tuple = (1e-5, 10 ** -0.75)
    topology: TopologySpec = field(default_factory=TopologySpec)
    t_max: int = 10_000
    t_avg: int = 2_000
    beta: float = 10.0
    init: str = "uniform_random"
    record_interval: int = 10
    base_seed: int = 0
    mode: str = "random_sample"
    grid_shape: tuple = (1, 1, 5)   # points along (r, gamma, mu) in grid mode
    replicates: int = 1             # runs per grid point in grid mode

    def __post_init__(self):
        object.__setattr__(self, "r_range", _check_range("r", self.r_range, 0.0))
        object.__setattr__(self, "gamma_range", _check_range("gamma", self.gamma_range, 0.0, 1.0))
        lo, hi = _check_range("mu", self.mu_range, 0.0, 1.0)
        object.__setattr__(self, "mu_range", (lo, hi))
        if lo <= 0 and hi > lo:
            raise ConfigError("mu is sampled log-uniformly; its lower bound must be > 0")
        if self.mode not in MODES:
            raise ConfigError(f"unknown sweep mode {self.mode!r}; expected one of {MODES}")
        object.__setattr__(self, "grid_shape", tuple(int(x) for x in self.grid_shape))
        if len(self.grid_shape) != 3 or min(self.grid_shape) < 1:
            raise ConfigError("grid_shape needs three positive counts (r, gamma, mu)")
        if self.replicates < 1:
            raise ConfigError("replicates must be >= 1")
        if self.mode == "grid":
            object.__setattr__(self, "n_samples", int(np.prod(self.grid_shape)) * self.replicates)
        if self.n_samples < 0:
            raise ConfigError("n_samples must be >= 0")
        if not 0 <= self.base_seed < 2 ** 64:
            raise ConfigError("base_seed must be a 64-bit unsigned integer")
        # validates t_max/t_avg/beta/init eagerly
        self.run_config(GameParams(self.r_range[0], self.gamma_range[0], self.beta, self.mu_range[0]), 0)

    def run_config(self, params: GameParams, seed: int) -> RunConfig:
        return RunConfig(params=params, topology=self.topology, init=self.init, t_max=self.t_max,
                         t_avg=self.t_avg, seed=seed, record_interval=self.record_interval)

    def to_dict(self) -> dict:
        return asdict(self)


def sample_seed(base_seed: int, sample_id: int) -> int:
    """64-bit seed for one sample, derived from the base seed and a counter."""
    a, b = np.random.SeedSequence([base_seed, sample_id]).generate_state(2, np.uint32)
    return (int(a) << 32) | int(b)


def _log_uniform(u, lo, hi):
    if lo == hi:
        return np.full_like(u, lo)
    return 10.0 ** (math.log10(lo) + u * (math.log10(hi) - math.log10(lo)))


def _grid_axis(lo, hi, n, log=False):
    if n == 1 or lo == hi:
        return np.full(n, lo, dtype=float)
    if log:
        return np.logspace(math.log10(lo), math.log10(hi), n)
    return np.linspace(lo, hi, n)


def sample_configs(spec: SweepSpec) -> list[RunConfig]:
    """Draw the sweep's configurations.

    ``r`` and ``gamma`` are uniform on their ranges and ``mu`` is uniform in
    ``log10``.  Sample ``k`` only uses the ``k``-th triple of draws, so a
    longer sweep extends a shorter one with the same base seed.
    """
    n = spec.n_samples
    if spec.mode == "grid":
        r_ax = _grid_axis(*spec.r_range, spec.grid_shape[0])
        g_ax = _grid_axis(*spec.gamma_range, spec.grid_shape[1])
        m_ax = _grid_axis(*spec.mu_range, spec.grid_shape[2], log=True)
        points = [p for p in itertools.product(r_ax, g_ax, m_ax) for _ in range(spec.replicates)]
    else:
        u = np.random.Generator(np.random.Philox(np.random.SeedSequence(spec.base_seed))).random((n, 3))
        r = spec.r_range[0] + u[:, 0] * (spec.r_range[1] - spec.r_range[0])
        g = spec.gamma_range[0] + u[:, 1] * (spec.gamma_range[1] - spec.gamma_range[0])
        m = _log_uniform(u[:, 2], *spec.mu_range)
        points = list(zip(r, g, m))
    return [spec.run_config(GameParams(float(r), float(g), spec.beta, float(m)), sample_seed(spec.base_seed, k))
            for k, (r, g, m) in enumerate(points)]


def _run_row(item) -> dict:
    sample_id, cfg = item
    row = {"sample_id": sample_id, "seed": cfg.seed, "r": cfg.params.r, "gamma": cfg.params.gamma,
           "mu": cfg.params.mu, "topology": cfg.topology.kind}
    try:
        s = run(cfg).summary
    except Exception as exc:  # a failed sample never aborts the sweep
        return {**row, "mean_coop": math.nan, "std_coop": math.nan,
                "mean_freq": [math.nan] * N_STRATEGIES, "status": f"failed: {type(exc).__name__}: {exc}"}
    return {**row, "mean_coop": s["mean_coop"], "std_coop": s["std_coop"],
            "mean_freq": s["mean_freq"], "status": "ok"}


@dataclass
class SweepResult:
    spec: SweepSpec
    rows: list

    @property
    def ok_rows(self) -> list:
        return [r for r in self.rows if r["status"] == "ok"]

    def arrays(self, mu_min: Optional[float] = None, mu_max: Optional[float] = None):
        """``(mu, coop, freq)`` arrays over successful rows, optionally filtered by mu."""
        rows = [r for r in self.ok_rows
                if (mu_min is None or r["mu"] >= mu_min) and (mu_max is None or r["mu"] <= mu_max)]
        mu = np.array([r["mu"] for r in rows], dtype=float)
        coop = np.array([r["mean_coop"] for r in rows], dtype=float)
        freq = np.array([r["mean_freq"] for r in rows], dtype=float).reshape(-1, N_STRATEGIES)
        return mu, coop, freq

    def histogram(self, bin_width: float = 0.05, mu_min=None, mu_max=None):
        _, coop, _ = self.arrays(mu_min, mu_max)
        return coop_histogram(coop, bin_width)

    def bin_by_mu(self, n_bins: int = 17, log10_range: Optional[tuple] = None):
        mu, coop, freq = self.arrays()
        if log10_range is None:
            lo, hi = self.spec.mu_range
            if lo > 0:
                log10_range = (math.log10(lo), math.log10(hi))
        return bin_by_mu(mu, coop, freq, n_bins, log10_range)

    def metadata(self) -> dict:
        failed = len(self.rows) - len(self.ok_rows)
        return {"kind": "sweep", "spec": self.spec.to_dict(), "base_seed": self.spec.base_seed,
                "rng_algorithm": RNG_ALGORITHM, "code_version": __version__,
                "n_rows": len(self.rows), "n_failed": failed}


def default_parallelism() -> int:
    env = os.environ.get("CHEAPTALK_PARALLEL")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            log.warning("ignoring non-integer CHEAPTALK_PARALLEL=%r", env)
    return 1


def run_sweep(spec: SweepSpec, parallelism: int = 1,
              on_row: Optional[Callable[[dict], None]] = None) -> SweepResult:
    """Run every sampled configuration, up to ``parallelism`` at a time.

    Rows come back in ``sample_id`` order whatever the worker count;
    ``on_row`` is called with each row as soon as it and all earlier rows
    are done, which lets callers persist partial results.
    """
    if parallelism < 1:
        raise ValueError(f"parallelism must be >= 1, got {parallelism}")
    items = list(enumerate(sample_configs(spec)))
    rows = []
    if parallelism == 1 or len(items) <= 1:
        results = map(_run_row, items)
        for row in results:
            rows.append(row)
            if on_row:
                on_row(row)
    else:
        chunk = max(1, len(items) // (parallelism * 8))
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            for row in pool.map(_run_row, items, chunksize=chunk):
                rows.append(row)
                if on_row:
                    on_row(row)
    return SweepResult(spec, rows)


# -- aggregation -------------------------------------------------------------

def coop_histogram(coop: np.ndarray, bin_width: float = 0.05):
    """Counts of ``coop`` values in fixed-width bins over ``[0, 1]``; 1.0 falls in the last bin."""
    if not 0 < bin_width <= 1:
        raise ValueError("bin_width must be in (0, 1]")
    n_bins = int(round(1.0 / bin_width))
    edges = np.linspace(0.0, 1.0, n_bins + 1)
    counts, _ = np.histogram(np.asarray(coop, dtype=float), bins=edges)
    return edges[:-1], edges[1:], counts


@dataclass
class BinnedCurves:
    lo: np.ndarray
    hi: np.ndarray
    count: np.ndarray
    mean_coop: np.ndarray
    std_coop: np.ndarray
    mean_freq: np.ndarray    # (bins, 8) by strategy index
    std_freq: np.ndarray

    @property
    def empty(self) -> np.ndarray:
        return self.count == 0

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.lo + self.hi)


def bin_by_mu(mu, coop, freq, n_bins: int, log10_range: Optional[tuple] = None) -> BinnedCurves:
    """Per-bin mean/std of coop and strategy frequencies over equal-width ``log10 mu`` bins.

    Samples with ``mu == 0`` have no logarithm and are left out.  Empty bins
    carry NaN statistics and ``count == 0``.
    """
    if n_bins < 2:
        raise ValueError("n_bins must be >= 2")
    mu = np.asarray(mu, dtype=float)
    keep = mu > 0
    x = np.log10(mu[keep])
    coop = np.asarray(coop, dtype=float)[keep]
    freq = np.asarray(freq, dtype=float).reshape(-1, N_STRATEGIES)[keep]
    if log10_range is None:
        log10_range = (x.min(), x.max()) if x.size else (-5.0, 0.0)
    lo, hi = map(float, log10_range)
    if hi <= lo:
        lo, hi = lo - 0.5, lo + 0.5
    edges = np.linspace(lo, hi, n_bins + 1)
    which = np.clip(np.searchsorted(edges, x, side="right") - 1, 0, n_bins - 1)
    count = np.bincount(which, minlength=n_bins)
    mc = np.full(n_bins, np.nan)
    sc = np.full(n_bins, np.nan)
    mf = np.full((n_bins, N_STRATEGIES), np.nan)
    sf = np.full((n_bins, N_STRATEGIES), np.nan)
    for b in np.flatnonzero(count):
        sel = which == b
        mc[b], sc[b] = coop[sel].mean(), coop[sel].std()
        mf[b], sf[b] = freq[sel].mean(axis=0), freq[sel].std(axis=0)
    return BinnedCurves(edges[:-1], edges[1:], count, mc, sc, mf, sf)


# -- files -------------------------------------------------------------------

def raw_row_cells(row: dict) -> list:
    return [row["sample_id"], row["seed"], repr(float(row["r"])), repr(float(row["gamma"])),
            repr(float(row["mu"])), row["topology"], repr(float(row["mean_coop"])),
            repr(float(row["std_coop"])), *[repr(float(row["mean_freq"][i])) for i in _DISPLAY_IDX],
            row["status"]]


def write_raw_csv(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RAW_HEADER)
        for row in rows:
            w.writerow(raw_row_cells(row))


def read_raw_csv(path) -> list[dict]:
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            freq = [0.0] * N_STRATEGIES
            for col, i in zip(FREQ_COLS, _DISPLAY_IDX):
                freq[i] = float(rec[col])
            rows.append({"sample_id": int(rec["sample_id"]), "seed": int(rec["seed"]),
                         "r": float(rec["r"]), "gamma": float(rec["gamma"]), "mu": float(rec["mu"]),
                         "topology": rec["topology"], "mean_coop": float(rec["mean_coop"]),
                         "std_coop": float(rec["std_coop"]), "mean_freq": freq, "status": rec["status"]})
    return rows


def write_binned_csv(curves: BinnedCurves, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(BINNED_HEADER)
        for b in range(len(curves.count)):
            w.writerow([repr(float(curves.lo[b])), repr(float(curves.hi[b])), int(curves.count[b]),
                        repr(float(curves.mean_coop[b])), repr(float(curves.std_coop[b])),
                        *[repr(float(curves.mean_freq[b, i])) for i in _DISPLAY_IDX],
                        *[repr(float(curves.std_freq[b, i])) for i in _DISPLAY_IDX],
                        int(curves.count[b] == 0)])


def write_histogram_csv(hist, path) -> None:
    lo, hi, counts = hist
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HIST_HEADER)
        for a, b, c in zip(lo, hi, counts):
            w.writerow([repr(float(a)), repr(float(b)), int(c)])


def with_overrides(spec: SweepSpec, **kw) -> SweepSpec:
    return replace(spec, **{k: v for k, v in kw.items() if v is not None})
