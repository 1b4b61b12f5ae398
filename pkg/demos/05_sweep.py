"""A small random-parameter sweep with histogram and log-mu binning.

Run with ``python3 demos/05_sweep.py``.
"""
# %%
from cheaptalk import TopologySpec
from cheaptalk.sweep import SweepSpec, run_sweep

spec = SweepSpec(n_samples=24, topology=TopologySpec("lattice", L=20), t_max=2000, t_avg=500,
                 base_seed=11)
result = run_sweep(spec, parallelism=1, on_row=lambda row: print(".", end="", flush=True))
print()

# %% Distribution of long-run cooperation
lo, hi, counts = result.histogram(bin_width=0.1)
for a, b, c in zip(lo, hi, counts):
    print(f"[{a:.1f}, {b:.1f}) {'*' * int(c)}")

# %% Mean cooperation per log10(mu) bin; empty bins are NaN
curves = result.bin_by_mu(n_bins=6)
for centre, m, n in zip(curves.centers, curves.mean_coop, curves.count):
    print(f"log10 mu ~ {centre:5.2f}: n={n:2d} coop={m:.3f}" if n else f"log10 mu ~ {centre:5.2f}: empty")
