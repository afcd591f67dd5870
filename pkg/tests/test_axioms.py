from __future__ import annotations

import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from drum.axioms import (FAIL, NOT_APPLICABLE, PASS, check_intensity_monotonicity, check_monotonicity,
                         check_sarpd, check_stability, dominance_unions, slice_period, test_rum_slices,
                         test_rum_static)
from drum.feasibility import DynamicStochasticDemand
from drum.geometry import Budget, build_patches
from drum.rationality import profile_matrix
from drum.simulation import plant_sarpd_cycle, random_block_demand, simulate_mixture, simulate_panel
from oracles import (SIMPLE_PATHS, CROSSING_DEMAND, UNSTABLE_DEMAND, cells_from_demand, cells_from_table, demand_from_cells,
                     simple_budgets, simple_intensity, simple_monotonicity, simple_patch_sets, simple_stability)

PSS = simple_patch_sets()
A = profile_matrix(PSS, SIMPLE_PATHS)
ALL = (check_stability, check_monotonicity, check_intensity_monotonicity, check_sarpd)


def _table(t):
    return demand_from_cells(cells_from_table(t))


def test_uncorrelated_crossing_table():
    rho = _table(CROSSING_DEMAND)
    assert check_stability(rho, PSS).status == PASS
    mono = check_monotonicity(rho, PSS)
    assert mono.status == FAIL
    assert all(not v.holds(rho) for v in mono.violations)
    assert check_sarpd(rho, PSS).status == PASS


def test_uncorrelated_crossing_intensity_agrees_with_the_definition():
    # the reference cells give DD + dd - dD - Dd = +1/4 on the only pair of pairs
    cells = cells_from_table(CROSSING_DEMAND)
    assert simple_intensity(cells)
    assert check_intensity_monotonicity(_table(CROSSING_DEMAND), PSS).status == PASS


def test_unstable_table():
    rho = _table(UNSTABLE_DEMAND)
    st_ = check_stability(rho, PSS)
    assert st_.status == FAIL and not simple_stability(cells_from_table(UNSTABLE_DEMAND))
    for v in st_.violations:
        assert v.relation == "==" and v.lhs != v.rhs and not v.holds(rho)


def test_unstable_table_slices():
    rho = _table(UNSTABLE_DEMAND)
    first = slice_period(rho, PSS, 1)
    assert not first.well_defined and first.entries is None
    assert first.value(1, 1, (1,)) == first.value(1, 2, (1,)) == Fraction(1, 2)
    assert first.value(1, 1, (2,)) == Fraction(2, 3) and first.value(1, 2, (2,)) == Fraction(1, 3)
    with pytest.raises(ValueError):
        first.value(1, 1)
    with pytest.raises(ValueError):
        test_rum_static(first, PSS[0])
    with pytest.warns(RuntimeWarning):
        verdicts = test_rum_slices(first, PSS[0])
    assert all(v.feasible for v in verdicts.values())

    second = slice_period(rho, PSS, 2)
    assert second.well_defined
    assert [second.value(j, i) for j, i in [(1, 1), (1, 2), (2, 1), (2, 2)]] == \
           [Fraction(1, 2), Fraction(1, 2), Fraction(5, 6), Fraction(1, 6)]
    # x_{1|2} = 5/6 exceeds x_{1|1} = 1/2 although x_{1|1} dominates x_{1|2}
    v = test_rum_static(second, PSS[1])
    assert not v.feasible and v.verified


def test_one_column_passes_everything():
    rho = simulate_mixture(A, {4: 1})
    for f in ALL:
        assert f(rho, PSS).status == PASS


def test_product_demand_is_stable():
    # independent periods: rho = marginal_1 x marginal_2 per budget path
    m1 = {(1, 1): Fraction(1, 3), (1, 2): Fraction(2, 3), (2, 1): Fraction(1, 5), (2, 2): Fraction(4, 5)}
    m2 = {(1, 1): Fraction(1, 2), (1, 2): Fraction(1, 2), (2, 1): Fraction(1, 7), (2, 2): Fraction(6, 7)}
    rho = DynamicStochasticDemand({((j1, j2), (i1, i2)): m1[(j1, i1)] * m2[(j2, i2)]
                                   for j1, j2 in SIMPLE_PATHS for i1 in (1, 2) for i2 in (1, 2)},
                                  observed=SIMPLE_PATHS)
    assert check_stability(rho, PSS).status == PASS
    assert slice_period(rho, PSS, 1).entries == m1


def test_single_period():
    ps = build_patches(simple_budgets(1), continuous_demand=True)
    rho = DynamicStochasticDemand({((1,), (1,)): 1, ((2,), (2,)): 1})
    assert check_intensity_monotonicity(rho, [ps]).status == NOT_APPLICABLE
    assert check_stability(rho, [ps]).status == NOT_APPLICABLE
    sarpd = check_sarpd(rho, [ps])
    assert sarpd.status == PASS and sarpd.notes
    assert check_monotonicity(rho, [ps]).status == PASS


def test_monotonicity_not_applicable_on_one_budget_path():
    rho = simulate_mixture(profile_matrix(PSS, [(1, 1)]), {0: 1})
    assert check_monotonicity(rho, PSS).status == NOT_APPLICABLE


def test_period_count_mismatch_raises():
    rho = _table(CROSSING_DEMAND)
    with pytest.raises(ValueError):
        check_stability(rho, PSS[:1])


def test_dominance_unions_of_simple_setup():
    assert sorted(dominance_unions(PSS[0])) == [(1, (1,), 2, (1,)), (2, (2,), 1, (2,))]


def test_planted_cycle_fails_sarpd_and_names_it():
    pc = plant_sarpd_cycle(np.random.default_rng(3))
    _, rho = simulate_panel(pc.spec, pc.patch_sets, pc.paths)
    r = check_sarpd(rho, pc.patch_sets)
    assert r.status == FAIL
    names = {p.label for p in pc.cycle}
    assert any(all(n in v.description for n in names) for v in r.violations)
    assert check_sarpd(rho, pc.patch_sets, (1, 1, 1)).status == PASS
    with pytest.raises(ValueError):
        check_sarpd(rho, pc.patch_sets, (2, 2, 2))


def test_report_records():
    r = check_monotonicity(_table(CROSSING_DEMAND), PSS)
    rec = r.to_record()
    assert rec["status"] == FAIL and len(rec["violations"]) == len(r.violations)
    assert "fails" in r.summary()


# ------------------------------------------------------------- properties

weights = st.lists(st.integers(0, 9), min_size=9, max_size=9).filter(any)


@given(weights)
def test_mixtures_satisfy_every_axiom(w):
    rho = simulate_mixture(A, [Fraction(x, sum(w)) for x in w])
    for f in ALL:
        assert f(rho, PSS).status == PASS
    for t in (1, 2):
        m = slice_period(rho, PSS, t)
        assert m.well_defined and test_rum_static(m, PSS[t - 1]).feasible


@given(st.integers(0, 2**32 - 1))
def test_simple_axioms_match_definitions(seed):
    rho = random_block_demand(np.random.default_rng(seed), PSS, SIMPLE_PATHS)
    cells = cells_from_demand(rho)
    assert (check_stability(rho, PSS).status == PASS) == simple_stability(cells)
    assert (check_monotonicity(rho, PSS).status == PASS) == simple_monotonicity(cells)
    assert (check_intensity_monotonicity(rho, PSS).status == PASS) == simple_intensity(cells)


@given(st.integers(0, 2**32 - 1))
def test_violations_reproduce_on_the_data(seed):
    rho = random_block_demand(np.random.default_rng(seed), PSS, SIMPLE_PATHS)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for f in ALL:
            for v in f(rho, PSS).violations:
                assert not v.holds(rho)
