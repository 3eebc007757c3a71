# ---
# jupyter:
#   jupytext:
#     formats: py:percent
#     text_representation:
#       extension: .py
#       format_name: percent
# ---

# %% [markdown]
# # Sum-rate trends
#
# Short sweeps over transmit power and user count.  The CLI equivalents are
# `capa sweep-power` and `capa sweep-users`.

# %%
from capa.experiment import ExperimentConfig, run_sweep

rows = run_sweep(ExperimentConfig(trials=10, sweep_kind="power"))
for r in rows:
    if r.scheme != "MRC":
        print(f"P={r.value:<8g} {r.array:4s} {r.scheme:4s} sum-rate {r.mean_sum_rate:7.2f}")

# %% [markdown]
# ZF on the continuous aperture gains from extra users only while the
# aperture can still separate them.

# %%
rows = run_sweep(ExperimentConfig(trials=10, sweep_kind="users", arrays=("capa",), schemes=("ZF",)))
for r in rows:
    print(f"K={r.value:<3g} sum-rate {r.mean_sum_rate:6.2f}")
