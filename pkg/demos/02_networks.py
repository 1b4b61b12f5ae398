"""Interaction structures.

All graphs are stored as compressed adjacency (indptr/indices).
Run with ``python3 demos/02_networks.py``.
"""
# %%
import numpy as np

from cheaptalk.network import build

rng = np.random.default_rng(5)
graphs = {
    "lattice": build("lattice", L=20),
    "small_world": build("small_world", n=400, k=4, p_rewire=0.1, rng=rng),
    "random_regular": build("random_regular", n=400, k=4, rng=rng),
    "scale_free": build("scale_free", n=400, m=2, rng=rng),
    "well_mixed": build("well_mixed", n=400),
}

# %% Degree statistics
for name, g in graphs.items():
    d = g.degrees
    print(f"{name:15s} n={g.n:4d} edges={g.n_edges:6d} mean degree={d.mean():6.2f} max={d.max()}")

# %% The lattice wraps around: node 0's neighbours include the far edge
print(graphs["lattice"].neighbors(0))

# %% Hubs in the preferential-attachment graph
d = graphs["scale_free"].degrees
print("top degrees:", np.sort(d)[-5:])
