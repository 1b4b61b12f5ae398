"""Cooperation against the exploration rate.

Small lattices and short runs keep this under a couple of minutes; the
recipes/ directory holds full-size versions for the CLI.
Run with ``python3 demos/04_mu_scan.py``.
"""
# %%
import numpy as np

from cheaptalk import GameParams, RunConfig, TopologySpec, run

mus = [1e-5, 1e-4, 1e-3, 1e-2, 1e-1]
topo = TopologySpec("lattice", L=30)


def coop_at(mu, gamma, seeds=3):
    vals = [run(RunConfig(GameParams(0.02, gamma, 10.0, mu), topo, t_max=6000, t_avg=2000,
                          seed=s, record_interval=10)).summary["mean_coop"] for s in range(seeds)]
    return float(np.mean(vals))


# %% Moderate reasoning cost: an intermediate rate should help most
for mu in mus:
    print(f"gamma=0.1 mu={mu:g}: {coop_at(mu, 0.1):.3f}")

# %% Expensive reasoning: exploration does not rescue cooperation
for mu in mus:
    print(f"gamma=0.3 mu={mu:g}: {coop_at(mu, 0.3):.3f}")
