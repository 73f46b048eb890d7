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
# # A source that breaks the strong maximum principle
#
# For p > 2 a nonnegative source can be built so that the solution stays
# identically zero on the left half of (-1, 1) while growing on the right.
# The source is positive up to a horizon t0, which is computed here.

# %%
import numpy as np

from plaphydro.constitutive import AquiferHead, Identity, PowerRoot, smp_condition
from plaphydro.principles import SmpCounterexample, demonstrate_smp_failure, positivity_horizon, smp_rhs

# %%
ce = SmpCounterexample(3.0, 4.0, 4.0)
t0 = positivity_horizon(ce)
print(f"t0 = {t0:.5f}")
x = np.linspace(-1, 1, 9)
print(np.column_stack([x, smp_rhs(ce, x, 0.5 * t0)]))

# %%
report = demonstrate_smp_failure(ce, nodes=201)
for key in ("analytic_residual_max", "solver_left_max", "solver_right_max", "verdict"):
    print(f"{key}: {report[key]}")

# %% [markdown]
# The same construction works with the aquifer b, once b' is bounded below
# on the range the solution visits.

# %%
ce_aq = SmpCounterexample(3.0, 4.0, 4.0, b=AquiferHead(0.0347, 3.0, 1.0))
print(ce_aq.kmin, demonstrate_smp_failure(ce_aq, nodes=201)["violated"])

# %% [markdown]
# ## The singular range
#
# For 1 < p < 2 the principle holds or fails depending on how b behaves
# near zero.

# %%
for b in (Identity(), PowerRoot(1.0, 0.5), PowerRoot(1.0, 3.0)):
    print(b, smp_condition(b, 1.5))
