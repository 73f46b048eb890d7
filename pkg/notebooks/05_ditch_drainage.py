# ---
# jupyter:
#   jupytext:
#     formats: ipynb,py:percent
#     text_representation:
#       extension: .py
#       format_name: percent
#       format_version: '1.3'
#   kernelspec:
#     display_name: Python 3
#     language: python
#     name: python3
# ---

# %% [markdown]
# # Draining an aquifer into a ditch
#
# The fitted 2D law gives an unconfined aquifer model with p near 1.54.
# A cross-section drains through both ends; the head falls and the
# stored volume decays.

# %%
import numpy as np

from plaphydro.scenarios import expand_scenario
from plaphydro.solver import solve

# %%
exp = expand_scenario(scenario_id="ditch-drainage")
print({k: v for k, v in exp.info.items() if k != "parameters"})
print("parameters:", exp.info["parameters"])

# %%
traj = solve(exp.problem, exp.resolution, exp.numerics)
m = traj.mass_series()
for i in np.linspace(0, len(traj) - 1, 6).astype(int):
    print(f"t = {traj.times[i]:10.3f}  stored = {m[i]:.5f}  max u = {traj.values[i].max():.5f}")

# %% [markdown]
# The Leibenson preset is a closed basin with f = 0, so its mass should not
# move.

# %%
exp = expand_scenario(scenario_id="leibenson")
m = solve(exp.problem, exp.resolution, exp.numerics).mass_series()
print("relative mass drift:", abs(m[-1] - m[0]) / m[0])
