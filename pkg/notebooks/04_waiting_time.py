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
# # Waiting time at the origin
#
# Two sources that differ only for x > 0 produce solutions that are
# ordered and distinct, yet agree at x = 0 and on the whole left half for
# a positive time: information does not cross the origin instantly.

# %%
import numpy as np

from plaphydro.principles import ScpInstance, demonstrate_waiting_time, scp_f_s, scp_horizon

# %%
inst = ScpInstance(4.0, 2.0, 3.0, C=0.1)
print("horizon:", scp_horizon(inst))
x = np.linspace(-1, 1, 9)
print(np.column_stack([x, inst.u(x), scp_f_s(inst, x)]))

# %%
report = demonstrate_waiting_time(inst, nodes=201)
print(report["status"])
for key in ("t_horizon", "max_difference", "difference_at_zero", "left_difference"):
    print(f"{key}: {report[key]:.3e}")
print(report["checks"])

# %% [markdown]
# Asking for a horizon longer than the source bound allows is refused.

# %%
bad = demonstrate_waiting_time(ScpInstance(5.0, 2.0, 3.0, C=1e6), nodes=101, t_horizon=1e-3)
print(bad["status"], "-", bad["reason"])
