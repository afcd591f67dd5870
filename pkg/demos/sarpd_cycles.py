# %% [markdown]
# Plant a dominance cycle across three periods of three goods.  The cycle
# check rejects constant utilities, while the full dynamic test still accepts
# the data because utilities may change from one period to the next.

# %%
from __future__ import annotations

from fractions import Fraction

import numpy as np

from drum import DynamicStochasticDemand, check_sarpd, profile_matrix, simulate_panel, test_drum
from drum.simulation import plant_sarpd_cycle

pc = plant_sarpd_cycle(np.random.default_rng(3), planted_weight=Fraction(1, 4))
print("cyclic budget path", pc.cyclic_path)
for p in pc.cycle:
    print(p.label, p.representative)

# %%
panel, rho = simulate_panel(pc.spec, pc.patch_sets, pc.paths)
report = check_sarpd(rho, pc.patch_sets)
print(report.summary())
for v in report.violations:
    print(" ", v.description)

# %% the full test on the cyclic budget path alone still accepts
one = DynamicStochasticDemand({cp: v for cp, v in rho.entries.items() if cp.budgets == pc.cyclic_path},
                              observed=[pc.cyclic_path])
A = profile_matrix(pc.patch_sets, [pc.cyclic_path])
print(A.n_rows, "x", A.n_columns, test_drum(A, one).status)
