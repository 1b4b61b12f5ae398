"""Command line entry point.

    cheaptalk run CONFIG [overrides]        time series + metadata (+ snapshots)
    cheaptalk sweep SPEC [--parallel K]     raw rows, mu-binned curves, histogram
    cheaptalk snapshot CONFIG --times 0,100 lattice grids at the given MCS
    cheaptalk validate FILE                 parse only

Experiment files are TOML or JSON with ``kind = "run"`` or ``kind = "sweep"``.
A ``metadata.json`` written by a previous command is also accepted and
reproduces that experiment.  Exit codes: 0 ok, 2 configuration error,
3 runtime error.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import sys
import time
from pathlib import Path
from typing import Optional

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from .engine import (
    ConfigError, RunConfig, TopologySpec, run, snapshot_filename, write_metadata,
    write_snapshot_csv, write_timeseries_csv,
)
from .game import GameParams
from .sweep import (
    SweepSpec, default_parallelism, raw_row_cells, run_sweep, write_binned_csv,
    write_histogram_csv, RAW_HEADER,
)

log = logging.getLogger("cheaptalk")

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3

_RUN_KEYS = {f.name for f in dataclasses.fields(RunConfig)}
_SWEEP_KEYS = {f.name for f in dataclasses.fields(SweepSpec)}
# sweep-only output options that are not part of SweepSpec
_SWEEP_OUTPUT_KEYS = {"n_mu_bins", "hist_bin_width", "hist_mu_min", "hist_mu_max"}
_PARAM_KEYS = {f.name for f in dataclasses.fields(GameParams)}
_TOPO_KEYS = {f.name for f in dataclasses.fields(TopologySpec)}


# -- experiment files --------------------------------------------------------

def read_document(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    try:
        if path.suffix.lower() == ".json":
            doc = json.loads(text)
        else:
            doc = tomllib.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: JSON parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: TOML parse error: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be a table/object")
    if "experiment" in doc and "rng_algorithm" in doc:
        doc = doc["experiment"]
    return doc


def _reject_unknown(section: str, got: dict, allowed: set) -> None:
    extra = sorted(set(got) - allowed)
    if extra:
        raise ConfigError(f"unknown key(s) in {section}: {', '.join(extra)}")


def _table(doc: dict, key: str) -> dict:
    value = doc.get(key, {})
    if not isinstance(value, dict):
        raise ConfigError(f"'{key}' must be a table")
    return value


def _topology(doc: dict) -> TopologySpec:
    t = _table(doc, "topology")
    _reject_unknown("[topology]", t, _TOPO_KEYS)
    if "kind" in t and t["kind"] != "lattice" and "L" not in t:
        t = {**t, "L": None}
    return TopologySpec(**t)


def _build(factory, section, kwargs):
    try:
        return factory(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"{section}: {exc}") from None
    except ValueError as exc:
        raise ConfigError(f"{section}: {exc}") from None


def run_config_from_doc(doc: dict) -> RunConfig:
    body = {k: v for k, v in doc.items() if k != "kind"}
    _reject_unknown("run experiment", body, _RUN_KEYS)
    params = _table(body, "params")
    _reject_unknown("[params]", params, _PARAM_KEYS)
    body["params"] = _build(GameParams, "[params]", params)
    body["topology"] = _topology(body)
    if isinstance(body.get("init"), list):
        body["init"] = tuple(body["init"])
    return _build(RunConfig, "run experiment", body)


def sweep_spec_from_doc(doc: dict) -> tuple[SweepSpec, dict]:
    body = {k: v for k, v in doc.items() if k != "kind"}
    _reject_unknown("sweep experiment", body, _SWEEP_KEYS | _SWEEP_OUTPUT_KEYS)
    out_opts = {k: body.pop(k) for k in list(body) if k in _SWEEP_OUTPUT_KEYS}
    body["topology"] = _topology(body)
    for key in ("r_range", "gamma_range", "mu_range", "grid_shape"):
        if key in body:
            body[key] = tuple(body[key])
    return _build(SweepSpec, "sweep experiment", body), out_opts


def load_experiment(path):
    doc = read_document(path)
    kind = doc.get("kind")
    if kind == "run":
        return "run", run_config_from_doc(doc)
    if kind == "sweep":
        return "sweep", sweep_spec_from_doc(doc)
    raise ConfigError(f"{path}: 'kind' must be \"run\" or \"sweep\", got {kind!r}")


def run_experiment_doc(cfg: RunConfig) -> dict:
    return {"kind": "run", **cfg.to_dict()}


def sweep_experiment_doc(spec: SweepSpec, out_opts: dict) -> dict:
    d = {"kind": "sweep", **spec.to_dict(), **out_opts}
    for key in ("r_range", "gamma_range", "mu_range", "grid_shape"):
        d[key] = list(d[key])
    return d


# -- overrides ---------------------------------------------------------------

def apply_run_overrides(cfg: RunConfig, args) -> RunConfig:
    params = {k: getattr(args, k) for k in ("r", "gamma", "beta", "mu") if getattr(args, k, None) is not None}
    topo = {}
    if getattr(args, "topology", None) is not None:
        topo["kind"] = args.topology
        if args.topology != "lattice" and args.L is None:
            topo["L"] = None
    for key in ("L", "n", "k", "m", "p_rewire"):
        if getattr(args, key, None) is not None:
            topo[key] = getattr(args, key)
    top = {}
    for key in ("init", "t_max", "t_avg", "record_interval", "seed"):
        if getattr(args, key, None) is not None:
            top[key] = getattr(args, key)
    if not (params or topo or top):
        return cfg
    try:
        return dataclasses.replace(
            cfg,
            params=dataclasses.replace(cfg.params, **params),
            topology=dataclasses.replace(cfg.topology, **topo),
            **top,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


# -- output directories --------------------------------------------------------

def prepare_outdir(out: Optional[str], default_name: str, overwrite: bool) -> Path:
    path = Path(out) if out else Path("out") / default_name
    if path.exists() and any(path.iterdir()) and not overwrite:
        raise ConfigError(f"output directory {path} is not empty; pass --overwrite to replace its contents")
    path.mkdir(parents=True, exist_ok=True)
    return path


def _metadata(base: dict, experiment: dict, started: float) -> dict:
    return {**base, "experiment": experiment, "argv": sys.argv[1:],
            "elapsed_seconds": round(time.time() - started, 3)}


# -- commands ----------------------------------------------------------------

def cmd_run(args) -> int:
    kind, cfg = load_experiment(args.config)
    if kind != "run":
        raise ConfigError(f"{args.config} is a {kind} experiment; use the '{kind}' command")
    cfg = apply_run_overrides(cfg, args)
    outdir = prepare_outdir(args.out, Path(args.config).stem, args.overwrite)
    started = time.time()
    result = run(cfg)
    write_timeseries_csv(result, outdir / "timeseries.csv")
    if result.snapshots:
        snapdir = outdir / "snapshots"
        snapdir.mkdir(exist_ok=True)
        for t, grid in result.snapshots.items():
            write_snapshot_csv(grid, snapdir / snapshot_filename(t))
    meta = _metadata(result.metadata(), run_experiment_doc(cfg), started)
    meta["summary"] = result.summary
    write_metadata(meta, outdir / "metadata.json")
    print(f"mean_coop={result.summary['mean_coop']:.6f} -> {outdir}")
    return EXIT_OK


def cmd_snapshot(args) -> int:
    kind, cfg = load_experiment(args.config)
    if kind != "run":
        raise ConfigError("snapshot needs a run experiment")
    cfg = apply_run_overrides(cfg, args)
    try:
        times = sorted({int(t) for t in args.times.split(",") if t.strip()})
    except ValueError:
        raise ConfigError(f"--times must be comma-separated integers, got {args.times!r}") from None
    if not times:
        raise ConfigError("--times is empty")
    t_max = max(times)
    cfg = dataclasses.replace(cfg, t_max=t_max, t_avg=min(cfg.t_avg, t_max), snapshot_times=tuple(times))
    outdir = prepare_outdir(args.out, Path(args.config).stem + "_snapshots", args.overwrite)
    started = time.time()
    result = run(cfg)
    for t, grid in result.snapshots.items():
        write_snapshot_csv(grid, outdir / snapshot_filename(t))
    write_metadata(_metadata(result.metadata(), run_experiment_doc(cfg), started), outdir / "metadata.json")
    print(f"{len(result.snapshots)} snapshot(s) -> {outdir}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    kind, loaded = load_experiment(args.spec)
    if kind != "sweep":
        raise ConfigError(f"{args.spec} is a {kind} experiment; use the '{kind}' command")
    spec, out_opts = loaded
    overrides = {}
    if args.seed is not None:
        overrides["base_seed"] = args.seed
    if args.n_samples is not None:
        overrides["n_samples"] = args.n_samples
    if overrides:
        try:
            spec = dataclasses.replace(spec, **overrides)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    parallel = args.parallel if args.parallel is not None else default_parallelism()
    if parallel < 1:
        raise ConfigError("--parallel must be >= 1")
    outdir = prepare_outdir(args.out, Path(args.spec).stem, args.overwrite)
    experiment = sweep_experiment_doc(spec, out_opts)
    started = time.time()
    raw_path = outdir / "raw.csv"
    with open(raw_path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RAW_HEADER)

        def on_row(row):
            writer.writerow(raw_row_cells(row))
            fh.flush()

        try:
            result = run_sweep(spec, parallel, on_row=on_row)
        except KeyboardInterrupt:
            log.error("interrupted; completed rows kept in %s", raw_path)
            raise
    curves = result.bin_by_mu(int(out_opts.get("n_mu_bins", 17)))
    write_binned_csv(curves, outdir / "binned.csv")
    hist = result.histogram(float(out_opts.get("hist_bin_width", 0.05)),
                            out_opts.get("hist_mu_min"), out_opts.get("hist_mu_max"))
    write_histogram_csv(hist, outdir / "histogram.csv")
    meta = _metadata(result.metadata(), experiment, started)
    meta["parallelism"] = parallel
    write_metadata(meta, outdir / "metadata.json")
    print(f"{len(result.rows)} sample(s), {meta['n_failed']} failed -> {outdir}")
    return EXIT_OK


def cmd_validate(args) -> int:
    kind, loaded = load_experiment(args.config)
    doc = run_experiment_doc(loaded) if kind == "run" else sweep_experiment_doc(*loaded)
    print(json.dumps(doc, indent=2, sort_keys=True))
    return EXIT_OK


# -- argument parsing ----------------------------------------------------------

def _global_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, help="run seed (sweep: base seed)")
    p.add_argument("--out", help="output directory (default: out/<config name>)")
    p.add_argument("--parallel", type=int, help="worker processes for sweeps "
                   "(default: $CHEAPTALK_PARALLEL or 1)")
    p.add_argument("--overwrite", action="store_true", help="allow writing into a non-empty output directory")
    return p


def _run_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("overrides")
    g.add_argument("--r", type=float)
    g.add_argument("--gamma", type=float)
    g.add_argument("--beta", type=float)
    g.add_argument("--mu", type=float)
    g.add_argument("--init", help="uniform_random or all_<LABEL>, e.g. all_NDD")
    g.add_argument("--t-max", dest="t_max", type=int)
    g.add_argument("--t-avg", dest="t_avg", type=int)
    g.add_argument("--record-interval", dest="record_interval", type=int)
    g.add_argument("--topology")
    g.add_argument("--L", type=int)
    g.add_argument("--n", type=int)
    g.add_argument("--k", type=int)
    g.add_argument("--m", type=int)
    g.add_argument("--p-rewire", dest="p_rewire", type=float)


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags()
    parser = argparse.ArgumentParser(prog="cheaptalk", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", parents=[common], help="simulate one configuration")
    p.add_argument("config")
    _run_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", parents=[common], help="run a parameter sweep")
    p.add_argument("spec")
    p.add_argument("--n-samples", dest="n_samples", type=int)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("snapshot", parents=[common], help="write lattice snapshots")
    p.add_argument("config")
    p.add_argument("--times", required=True, help="comma-separated MCS indices")
    _run_flags(p)
    p.set_defaults(func=cmd_snapshot)

    p = sub.add_parser("validate", parents=[common], help="parse and echo an experiment file")
    p.add_argument("config")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except KeyboardInterrupt:
        return EXIT_RUNTIME
    except Exception as exc:
        log.debug("runtime failure", exc_info=True)
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
