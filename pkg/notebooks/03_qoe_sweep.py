# %% [markdown]
# Privacy against prediction quality
#
# Synthetic head motion, the no-motion and learned linear predictors, and
# the resulting QoE as the privacy level rises at a fixed resources rate.

# %%
import numpy as np

from privstream import synth_trace
from privstream.config import ExperimentConfig
from privstream.sweep import rows_to_csv, run_sweep
from privstream.traces import TraceSet, split

traces = [synth_trace(s, 60.0, momentum=0.9, jitter=0.5, user_id=f"u{s % 10:02d}") for s in range(40)]
train, test = split(TraceSet(traces, split_seed=0))
print(len(train), "train /", len(test), "test traces")

# %%
cfg = ExperimentConfig(
    rho_values=tuple(np.round(np.linspace(0, 1, 6), 2)),
    rcc_values=(0.6, 1.2),
    predictors=("no_motion", "linear_ar"),
    local_epochs=20,
    rounds=5,
    workers=4,
)
rows = run_sweep(cfg, test, train)

# %%
for pred in cfg.predictors:
    for rcc in cfg.rcc_values:
        sel = [r for r in rows if r.predictor == pred and r.r_cc_star == rcc]
        print(f"{pred:10s} R={rcc}")
        for r in sel:
            if r.status != "ok":
                print(f"   rho={r.rho_s:.1f}  {r.status}")
                continue
            print(f"   rho={r.rho_s:.1f}  t_obw={r.t_obw_s:.1f}s  DoO={r.avg_doo:.3f}  QoE={r.avg_qoe:.3f}")

# %%
print(rows_to_csv(rows)[:400])
