# ---
# jupyter:
#   jupytext:
#     formats: py:percent
#     text_representation:
#       extension: .py
#       format_name: percent
# ---

# %% [markdown]
# # Beamformers on a continuous aperture
#
# One random drop of eight users above a 0.5 m x 0.5 m receive surface.
# Every beamformer is a weighted sum of the users' channel functions, so all
# SINRs follow from the 8 x 8 correlation matrix `R`.

# %%
import numpy as np

from capa import Scenario, sinr_report, weight_matrix
from capa.metrics import sinr_quadrature

scenario = Scenario()
draw = scenario.realize(seed=1, trial_index=0, with_spda=True)
print("channel gains a_k:", np.round(np.real(np.diagonal(draw.R)), 3))
print("condition number of R: %.3g" % np.linalg.cond(draw.R))

# %% [markdown]
# Per-user SINR from the closed forms, checked against direct quadrature of
# the sampled beamformers.

# %%
for scheme in ("MRC", "ZF", "MMSE"):
    rep = sinr_report(scheme, draw.R, draw.profile)
    A = weight_matrix(scheme, draw.R, draw.profile)
    direct = [sinr_quadrature(A, draw.channels, draw.profile, k) for k in range(8)]
    err = np.max(np.abs(rep.gamma - direct) / rep.gamma)
    print(f"{scheme:4s} sum-rate {rep.sum_rate:6.2f} bit/s/Hz  sum-MSE {rep.sum_mse:.3f}  quadrature mismatch {err:.1e}")

# %% [markdown]
# The same algebra on the 81-element half-wavelength array.

# %%
for scheme in ("MRC", "ZF", "MMSE"):
    rep = sinr_report(scheme, draw.spda.Rhat, draw.profile)
    print(f"{scheme:4s} discrete array sum-rate {rep.sum_rate:6.2f}")
