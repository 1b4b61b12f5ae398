"""Spatial snapshots and what sits next to the defectors.

Run with ``python3 demos/06_snapshots.py``.
"""
# %%
from cheaptalk import GameParams, RunConfig, TopologySpec, run
from cheaptalk.analysis import boundary_enrichment
from cheaptalk.strategy import ACC, ACD, NDC, STRATEGY_NAMES

cfg = RunConfig(GameParams(0.02, 0.1, 10.0, 1e-3), TopologySpec("lattice", L=40), t_max=5000,
                t_avg=1000, seed=2, snapshot_times=(0, 1000, 5000))
res = run(cfg)

# %% Print a corner of the final grid 
grid = res.snapshots[5000]
for row in grid[:12]:
    print(" ".join(f"{STRATEGY_NAMES[v]}" for v in row[:12]))

# %% Enrichment > 1 means the strategy is over-represented on the NDD frontier
for t, g in res.snapshots.items():
    vals = {STRATEGY_NAMES[s]: boundary_enrichment(g, strategy=s) for s in (ACD, ACC, NDC)}
    print(t, {k: round(v, 2) for k, v in vals.items()})
