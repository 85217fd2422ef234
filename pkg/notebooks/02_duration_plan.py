# %% [markdown]
# Splitting the proactive window
#
# How the observation window shrinks as more tiles must be rendered and
# sent, and how the closed-form split compares with an exhaustive search.

# %%
import numpy as np

from privstream import LinkBudget, StreamConfig, TileMediaSpec, brute_force_durations, optimize_durations, resources_rate, tile_bits

s_com, s_cpt = tile_bits(TileMediaSpec())
print(f"bits per tile: send {s_com / 2**20:.2f} Mib, render {s_cpt / 2**20:.2f} Mib")

budget = LinkBudget(2.85e9, 2.2e9, s_com, s_cpt, 200)
stream = StreamConfig(T_seg=1.0, l0=3, tau=0.1)
print("resources rate:", resources_rate(budget))

# %%
plan = optimize_durations(budget, 0.0, stream, n_fov=33)
print(plan)
oracle = brute_force_durations(budget, 0.0, stream, n_fov=33)
print("grid search:", oracle.t_com, oracle.t_cpt, "->", oracle.obw_samples, "samples")

# %%
# observation samples over (rho, R_cc*); blanks are infeasible
rhos = np.round(np.linspace(0, 1, 11), 2)
rates = np.round(np.arange(0.6, 2.01, 0.2), 2)
print("rho \\ R  " + " ".join(f"{r:5.1f}" for r in rates))
for rho in rhos:
    cells = []
    for r in rates:
        p = optimize_durations(budget.scaled_to(r), float(rho), stream, 33)
        cells.append(f"{p.obw_samples:5d}" if p.feasible else "    -")
    print(f"{rho:4.1f}      " + " ".join(cells))

# %%
# time spent rendering+sending grows linearly with the number of tiles
t_cc = [optimize_durations(budget, float(r), stream, 33).t_cc for r in rhos]
print(np.round(t_cc, 3))
print("per-rho increments:", np.round(np.diff(t_cc), 4))
