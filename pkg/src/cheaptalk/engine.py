"""Asynchronous Monte Carlo dynamics with exploration and Fermi imitation.

One Monte Carlo step (MCS) is ``n`` elementary updates.  In each update a
focal player is drawn uniformly (with replacement); with probability ``mu``
it redraws its strategy uniformly from all eight, otherwise it picks a random
neighbour and copies it with the Fermi probability computed from the two
players' accumulated payoffs in the current state.

Cooperation is measured at the action level: the fraction of cooperative
acts over all ordered pairs of adjacent players.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from . import _kernels as K
from . import __version__
from .game import GameParams, action_table, payoff_table
from .network import Network, TOPOLOGIES, build
from .strategy import DISPLAY_ORDER, N_STRATEGIES, index_of

RNG_ALGORITHM = "numpy.random.Philox-4x64-10 (SeedSequence(seed).spawn(2): [network, dynamics]); draws compiled by numba"

TIMESERIES_HEADER = ["t"] + [f"freq_{name}" for name in DISPLAY_ORDER] + ["coop"]
# column -> strategy index
_DISPLAY_IDX = [index_of(name) for name in DISPLAY_ORDER]


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


@dataclass(frozen=True)
class TopologySpec:
    kind: str = "lattice"
    n: Optional[int] = None
    L: Optional[int] = 50
    k: int = 4
    p_rewire: float = 0.1
    m: int = 2

    def __post_init__(self):
        if self.kind not in TOPOLOGIES:
            raise ConfigError(f"unknown topology {self.kind!r}; expected one of {TOPOLOGIES}")
        if self.kind == "lattice" and self.L is None and self.n is None:
            raise ConfigError("lattice topology needs L")
        if self.kind != "lattice" and self.n is None and self.L is None:
            raise ConfigError(f"{self.kind} topology needs n")

    @property
    def size(self) -> int:
        if self.kind == "lattice" and self.L is not None:
            return self.L * self.L
        return self.n if self.n is not None else self.L * self.L

    def build(self, rng: Optional[np.random.Generator] = None) -> Network:
        try:
            if self.kind == "lattice":
                return build("lattice", L=self.L, n=self.n)
            return build(self.kind, n=self.size, k=self.k, p_rewire=self.p_rewire, m=self.m, rng=rng)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


InitSpec = Union[str, Sequence[int]]


@dataclass(frozen=True)
class RunConfig:
    params: GameParams = field(default_factory=GameParams)
    topology: TopologySpec = field(default_factory=TopologySpec)
    init: InitSpec = "uniform_random"
    t_max: int = 30_000
    t_avg: int = 5_000
    seed: int = 0
    record_interval: int = 1
    snapshot_times: tuple = ()

    def __post_init__(self):
        if isinstance(self.init, (list, np.ndarray)):
            object.__setattr__(self, "init", tuple(int(x) for x in self.init))
        object.__setattr__(self, "snapshot_times", tuple(sorted(int(t) for t in self.snapshot_times)))
        if self.t_max < 0:
            raise ConfigError(f"t_max must be >= 0, got {self.t_max}")
        if not 0 <= self.t_avg <= self.t_max:
            raise ConfigError(f"need 0 <= t_avg <= t_max, got t_avg={self.t_avg}, t_max={self.t_max}")
        if self.record_interval < 1:
            raise ConfigError(f"record_interval must be >= 1, got {self.record_interval}")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.snapshot_times:
            if self.topology.kind != "lattice":
                raise ConfigError("snapshots are only defined for lattice topologies")
            if self.snapshot_times[0] < 0 or self.snapshot_times[-1] > self.t_max:
                raise ConfigError("snapshot times must lie in [0, t_max]")
        if isinstance(self.init, str):
            if self.init != "uniform_random":
                if not self.init.startswith("all_"):
                    raise ConfigError(f"unknown init {self.init!r}")
                try:
                    index_of(self.init[4:])
                except ValueError as exc:
                    raise ConfigError(str(exc)) from None
        else:
            if len(self.init) != self.topology.size:
                raise ConfigError(f"fixed init has {len(self.init)} entries, population has {self.topology.size}")
            if any(not 0 <= x < N_STRATEGIES for x in self.init):
                raise ConfigError("fixed init entries must be strategy indices 0..7")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["snapshot_times"] = list(self.snapshot_times)
        if not isinstance(self.init, str):
            d["init"] = list(self.init)
        return d


@dataclass
class PopulationState:
    strategies: np.ndarray
    rng: np.random.Generator
    seed: Optional[int] = None
    t: int = 0


@dataclass(frozen=True)
class MeasurementRecord:
    t: int
    freq: np.ndarray
    coop: float


@dataclass
class RunResult:
    config: RunConfig
    t: np.ndarray
    freq: np.ndarray          # (records, 8), columns indexed by strategy index
    coop: np.ndarray
    summary: dict
    snapshots: dict = field(default_factory=dict)
    network_info: dict = field(default_factory=dict)

    @property
    def records(self) -> list[MeasurementRecord]:
        return [MeasurementRecord(int(t), f, float(c)) for t, f, c in zip(self.t, self.freq, self.coop)]

    def metadata(self) -> dict:
        return {
            "kind": "run",
            "config": self.config.to_dict(),
            "seed": self.config.seed,
            "rng_algorithm": RNG_ALGORITHM,
            "code_version": __version__,
            "network": self.network_info,
        }


# -- single-step operations ---------------------------------------------------

def _csr(net: Network):
    return net.indptr, net.indices


def total_payoff(i: int, state: PopulationState, net: Network, table: np.ndarray) -> float:
    """Accumulated payoff of node ``i`` against all of its neighbours."""
    indptr, indices = _csr(net)
    return float(K.node_payoff(i, state.strategies, indptr, indices, np.asarray(table)))


def fermi_prob(phi_i: float, phi_j: float, beta: float) -> float:
    """Probability that a player with payoff ``phi_i`` copies one with ``phi_j``."""
    if beta < 0:
        raise ValueError(f"beta must be >= 0, got {beta}")
    return float(K.fermi(float(phi_i), float(phi_j), float(beta)))


def elementary_update(state: PopulationState, net: Network, table: np.ndarray,
                      params: GameParams) -> None:
    indptr, indices = _csr(net)
    K.advance(state.strategies, indptr, indices, np.asarray(table), params.mu, params.beta, 1, state.rng)


def mcs(state: PopulationState, net: Network, table: np.ndarray, params: GameParams,
        n_steps: int = 1) -> None:
    """Advance the state by ``n_steps`` Monte Carlo steps (``n`` updates each)."""
    _advance(state, net, np.asarray(table), params, n_steps)


def _advance(state, net, table, params, n_steps, counts=None):
    if n_steps <= 0:
        return
    n_updates = n_steps * net.n
    if counts is not None:
        K.advance_complete(state.strategies, counts, table, params.mu, params.beta, n_updates, state.rng)
    else:
        K.advance(state.strategies, net.indptr, net.indices, table, params.mu, params.beta,
                  n_updates, state.rng)
    state.t += n_steps


_ACTION = action_table()


def measure(state: PopulationState, net: Network) -> MeasurementRecord:
    counts = K.count_strategies(state.strategies)
    if net.topology == "well_mixed":
        acts = K.cooperative_acts_complete(counts, _ACTION)
    else:
        acts = K.cooperative_acts(state.strategies, net.indptr, net.indices, _ACTION)
    directed = net.indices.size
    coop = acts / directed if directed else math.nan
    return MeasurementRecord(state.t, counts / state.strategies.size, float(coop))


# -- full runs ---------------------------------------------------------------

def _rngs(seed: int):
    net_ss, dyn_ss = np.random.SeedSequence(seed).spawn(2)
    return np.random.Generator(np.random.Philox(net_ss)), np.random.Generator(np.random.Philox(dyn_ss))


def initial_state(config: RunConfig, n: int, rng: np.random.Generator) -> PopulationState:
    init = config.init
    if isinstance(init, str):
        if init == "uniform_random":
            s = rng.integers(0, N_STRATEGIES, size=n).astype(np.int8)
        else:
            s = np.full(n, index_of(init[4:]), dtype=np.int8)
    else:
        s = np.asarray(init, dtype=np.int8).copy()
    if s.size != n:
        raise ConfigError(f"initial state has {s.size} entries, network has {n} nodes")
    return PopulationState(strategies=s, rng=rng, seed=config.seed)


def summarize(t: np.ndarray, freq: np.ndarray, coop: np.ndarray, t_max: int, t_avg: int) -> dict:
    """Mean and standard deviation over records with ``t > t_max - t_avg``."""
    window = t > t_max - t_avg
    if not window.any():
        nan8 = [math.nan] * N_STRATEGIES
        return {"mean_coop": math.nan, "std_coop": math.nan, "mean_freq": nan8,
                "std_freq": nan8, "n_records": 0}
    return {
        "mean_coop": float(coop[window].mean()),
        "std_coop": float(coop[window].std()),
        "mean_freq": freq[window].mean(axis=0).tolist(),
        "std_freq": freq[window].std(axis=0).tolist(),
        "n_records": int(window.sum()),
    }


def run(config: RunConfig, network: Optional[Network] = None) -> RunResult:
    """Simulate one configuration from its seed.

    Records are taken at ``t = 0``, every ``record_interval`` MCS, and at
    ``t_max``.  A prebuilt ``network`` may be passed to skip construction;
    it must match the configured topology.
    """
    net_rng, dyn_rng = _rngs(config.seed)
    net = config.topology.build(net_rng) if network is None else network
    if net.n != config.topology.size:
        raise ConfigError(f"network has {net.n} nodes, config expects {config.topology.size}")
    params = config.params
    table = np.ascontiguousarray(payoff_table(params))
    state = initial_state(config, net.n, dyn_rng)
    counts = K.count_strategies(state.strategies) if net.topology == "well_mixed" else None

    record_times = set(range(0, config.t_max + 1, config.record_interval))
    record_times.add(config.t_max)
    snap_times = set(config.snapshot_times)
    stops = sorted(record_times | snap_times)

    n_rec = len(record_times)
    ts = np.empty(n_rec, dtype=np.int64)
    freq = np.empty((n_rec, N_STRATEGIES))
    coop = np.empty(n_rec)
    snapshots = {}
    k = 0
    for stop in stops:
        _advance(state, net, table, params, stop - state.t, counts)
        if stop in record_times:
            rec = measure(state, net)
            ts[k], freq[k], coop[k] = rec.t, rec.freq, rec.coop
            k += 1
        if stop in snap_times:
            snapshots[stop] = state.strategies.reshape(net.side, net.side).copy()

    summary = summarize(ts, freq, coop, config.t_max, config.t_avg)
    info = {"topology": net.topology, "n": net.n, "n_edges": net.n_edges, **net.info}
    return RunResult(config, ts, freq, coop, summary, snapshots, info)


# -- output files ------------------------------------------------------------

def _fmt(x: float) -> str:
    return repr(float(x))


def write_timeseries_csv(result: RunResult, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TIMESERIES_HEADER)
        for t, f, c in zip(result.t, result.freq, result.coop):
            w.writerow([int(t)] + [_fmt(f[i]) for i in _DISPLAY_IDX] + [_fmt(c)])


def read_timeseries_csv(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Inverse of :func:`write_timeseries_csv`; returns ``(t, freq, coop)`` with freq by strategy index."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    freq = np.empty((len(data), N_STRATEGIES))
    freq[:, _DISPLAY_IDX] = data[:, 1:1 + N_STRATEGIES]
    return data[:, 0].astype(np.int64), freq, data[:, -1]


def snapshot_filename(t: int) -> str:
    return f"snapshot_t{int(t):07d}.csv"


def write_snapshot_csv(grid: np.ndarray, path) -> None:
    np.savetxt(path, np.asarray(grid, dtype=np.int64), fmt="%d", delimiter=",")


def read_snapshot_csv(path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", dtype=np.int64, ndmin=2)


def write_metadata(meta: dict, path) -> None:
    Path(path).write_text(json.dumps(meta, indent=2, sort_keys=True, default=_json_default) + "\n")


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serialisable: {type(obj).__name__}")
