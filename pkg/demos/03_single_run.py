"""One simulation on a lattice and a look at its time series.

Run with ``python3 demos/03_single_run.py``.
"""
# %%
import numpy as np

from cheaptalk import GameParams, RunConfig, TopologySpec, run
from cheaptalk.analysis import first_boom
from cheaptalk.strategy import NDD, STRATEGY_NAMES

cfg = RunConfig(GameParams(r=0.02, gamma=0.1, beta=10.0, mu=1e-4), TopologySpec("lattice", L=30),
                init="all_NDD", t_max=8000, t_avg=2000, seed=3, record_interval=1)
res = run(cfg)

# %% Long-run averages over the final window
print("mean cooperation:", round(res.summary["mean_coop"], 3))
for name, f in zip(STRATEGY_NAMES, res.summary["mean_freq"]):
    print(f"  {name}: {f:.3f}")

# %% A coarse look at the trajectory
for k in range(0, len(res.t), 500):
    bar = "#" * int(40 * res.coop[k])
    print(f"t={res.t[k]:5d} NDD={res.freq[k, NDD]:.2f} coop={res.coop[k]:.2f} {bar}")

# %% The first escape from all-defection: which strategies peak, in what order?
peaks = first_boom(res.t, res.freq)
print(peaks if peaks is not None else "no escape within this run")
