# %% [markdown]
# Each period alone is trivially rational, yet pooling both periods into one
# cross-section produces a static RUM violation.

# %%
from __future__ import annotations

from importlib import resources

from drum import build_pooled_patches, pool, profile_matrix, test_drum, test_rum_pooled
from drum import io

ds = io.load_dataset(resources.files("drum.data") / "pooling_counterexample.json")
for row in ds.panel.rows:
    print(row)

# %% unpooled: one budget path, one choice path
A = profile_matrix(ds.patch_sets(), ds.observed)
print(test_drum(A, ds.rho).status)

# %% pooled over periods
pooled = build_pooled_patches(ds.budgets, continuous_demand=True)
pd = pool(ds.panel, pooled)
for (owner, k), val in pd.entries.items():
    print(owner, k, val)
print(test_rum_pooled(pd, pooled).status)
