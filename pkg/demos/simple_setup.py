# %% [markdown]
# Two goods, two periods, two crossing budgets per period.  Walk from the
# patch geometry to the profile matrix and test two stochastic demands that
# look rational period by period.

# %%
from __future__ import annotations

from importlib import resources

from drum import (check_intensity_monotonicity, check_monotonicity, check_sarpd, check_stability,
                  enumerate_rational_types, profile_matrix, slice_period, test_drum, test_rum_static)
from drum import io
from drum.feasibility import adsrp_multiplicities

DATA = resources.files("drum.data")
ds = io.load_dataset(DATA / "simple2x2.json")
pss = ds.patch_sets()

# %% patches and dominance
for p in pss[0].all_patches():
    print(p.label, dict(p.sign_vector), p.representative)
print(sorted(pss[0].dominance))

# %% rational types per period
for th in enumerate_rational_types(pss[0]):
    print(th.label, th.choice)

# %% profile matrix
A = profile_matrix(pss, ds.observed)
print(io.format_matrix(A))

# %% the uniform mixture is rationalizable; the witness is a mixing vector
v = test_drum(A, ds.rho)
print(v.status, v.support())

# %% a stable demand that breaks monotonicity
crossing = io.load_dataset(DATA / "crossing.json")
rho = crossing.rho
for check in (check_stability, check_monotonicity, check_intensity_monotonicity, check_sarpd):
    print(check(rho, pss).summary())
v = test_drum(A, rho)
print(v.status, v.certificate)
print(adsrp_multiplicities(A, v.certificate))

# %% RUM slices that do not come from one dynamic population
unstable = io.load_dataset(DATA / "unstable.json").rho
print(check_stability(unstable, pss).summary())
first, second = slice_period(unstable, pss, 1), slice_period(unstable, pss, 2)
for ctx in first.by_context:
    print("period 1 given", ctx, test_rum_static(first, pss[0], ctx).status)
print("period 2", second.well_defined, test_rum_static(second, pss[1]).status)
print("joint", test_drum(A, unstable).status)
