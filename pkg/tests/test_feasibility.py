from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from drum.feasibility import (DynamicStochasticDemand, NormalizationError, adsrp_multiplicities, certificate_margin,
                              test_drum, verify_certificate, verify_witness)
from drum.rationality import profile_matrix
from drum.simulation import simulate_mixture
from oracles import (SIMPLE_PATHS, CROSSING_DEMAND, UNSTABLE_DEMAND, cells_from_demand, cells_from_table, constructive_nu,
                     demand_from_cells, mixture_cells, simple_patch_sets)

A = profile_matrix(simple_patch_sets(), SIMPLE_PATHS)
M = A.dense()


def _independent_witness_check(nu, rho):
    b = rho.vector(A.rows)
    return all(v >= 0 for v in nu) and all(
        sum((Fraction(int(M[i, c])) * nu[c] for c in range(A.n_columns)), Fraction(0)) == b[i]
        for i in range(A.n_rows))


def _independent_separation(d, rho):
    b = rho.vector(A.rows)
    lhs = sum((x * y for x, y in zip(d, b)), Fraction(0))
    best = max(sum((d[i] for i in range(A.n_rows) if M[i, c]), Fraction(0)) for c in range(A.n_columns))
    return lhs > best


def test_every_column_is_feasible():
    for c in range(A.n_columns):
        nu = [Fraction(int(c == k)) for k in range(A.n_columns)]
        rho = simulate_mixture(A, nu)
        v = test_drum(A, rho)
        assert v.feasible and v.verified
        assert _independent_witness_check(v.weights, rho)


@pytest.mark.parametrize("table", [CROSSING_DEMAND, UNSTABLE_DEMAND], ids=["uncorrelated-crossing", "unstable"])
def test_reference_counterexamples_are_infeasible(table):
    rho = demand_from_cells(cells_from_table(table))
    v = test_drum(A, rho)
    assert v.status == "infeasible" and v.weights is None
    assert v.verified and verify_certificate(A, rho, v.certificate)
    assert _independent_separation(v.certificate, rho)
    assert certificate_margin(A, rho, v.certificate) > 0


@pytest.mark.parametrize("table", [CROSSING_DEMAND, UNSTABLE_DEMAND])
def test_adsrp_sequence_collects_more_than_any_profile(table):
    rho = demand_from_cells(cells_from_table(table))
    v = test_drum(A, rho)
    n = adsrp_multiplicities(A, v.certificate)
    assert n and all(isinstance(k, int) and k > 0 for k in n.values())
    collected = sum((k * rho[cp] for cp, k in n.items()), Fraction(0))
    best = max(sum(k for cp, k in n.items() if M[A.row_index(cp), c]) for c in range(A.n_columns))
    assert collected > best


def test_zero_certificate_does_not_verify():
    rho = demand_from_cells(cells_from_table(CROSSING_DEMAND))
    assert not verify_certificate(A, rho, [0] * A.n_rows)


def test_negative_weights_do_not_verify():
    rho = simulate_mixture(A, [Fraction(1, 9)] * 9)
    nu = [Fraction(1, 9)] * 9
    assert verify_witness(A, rho, nu)
    nu[0], nu[1] = Fraction(2, 9), Fraction(0)
    assert not verify_witness(A, rho, nu)
    assert not verify_witness(A, rho, [Fraction(-1, 9)] + [Fraction(10, 72)] * 8)


def test_normalization_is_enforced():
    with pytest.raises(NormalizationError):
        DynamicStochasticDemand({((1, 1), (1, 1)): Fraction(9, 10)})
    with pytest.raises(ValueError):
        DynamicStochasticDemand({((1, 1), (1, 1)): Fraction(-1), ((1, 1), (1, 2)): Fraction(2)})


def test_budget_paths_must_agree_with_matrix():
    rho = DynamicStochasticDemand({((1, 1), (1, 1)): 1})
    with pytest.raises(ValueError):
        test_drum(A, rho)


def test_uniform_mixture_reproduces_symbolic_cells():
    nu = [Fraction(1, 9)] * 9
    assert cells_from_demand(simulate_mixture(A, nu)) == mixture_cells(nu)


def test_intersection_points_are_reachable_without_continuous_demand():
    pss = simple_patch_sets(continuous_demand=False)
    B = profile_matrix(pss, SIMPLE_PATHS)
    rho = DynamicStochasticDemand({((j1, j2), (3, 3)): 1 for j1, j2 in SIMPLE_PATHS}, observed=SIMPLE_PATHS)
    assert test_drum(B, rho).feasible


# ------------------------------------------------------------- properties

weights = st.lists(st.integers(0, 9), min_size=9, max_size=9).filter(any)


@given(weights)
def test_random_mixtures_are_feasible(w):
    nu = [Fraction(x, sum(w)) for x in w]
    rho = simulate_mixture(A, nu)
    assert cells_from_demand(rho) == mixture_cells(nu)
    v = test_drum(A, rho)
    assert v.feasible and _independent_witness_check(v.weights, rho)


@given(weights)
def test_constructive_mixture_recovers_weights(w):
    # the simple matrix has full column rank, so the mixture is unique
    nu = [Fraction(x, sum(w)) for x in w]
    cells = mixture_cells(nu)
    assert constructive_nu(cells) == nu
    assert list(test_drum(A, demand_from_cells(cells)).weights) == nu


@given(weights, st.permutations(range(4)))
def test_verdict_ignores_entry_order(w, perm):
    nu = [Fraction(x, sum(w)) for x in w]
    rho = simulate_mixture(A, nu)
    items = list(rho.entries.items())
    shuffled = DynamicStochasticDemand(dict(sorted(items, key=lambda kv: perm[SIMPLE_PATHS.index(kv[0].budgets)])),
                                       observed=[SIMPLE_PATHS[k] for k in perm])
    assert test_drum(A, shuffled).weights == test_drum(A, rho).weights


@given(st.lists(st.integers(0, 6), min_size=16, max_size=16))
def test_exactly_one_of_witness_or_certificate(cells):
    rng_cells = np.array(cells).reshape(4, 4)
    if (rng_cells.sum(axis=1) == 0).any():
        return
    entries = {}
    for n, bp in enumerate(SIMPLE_PATHS):
        for m, ii in enumerate([(1, 1), (1, 2), (2, 1), (2, 2)]):
            if rng_cells[n, m]:
                entries[(bp, ii)] = Fraction(int(rng_cells[n, m]), int(rng_cells[n].sum()))
    rho = DynamicStochasticDemand(entries, observed=SIMPLE_PATHS)
    v = test_drum(A, rho)
    assert (v.weights is None) != (v.certificate is None)
    if v.feasible:
        assert _independent_witness_check(v.weights, rho)
    else:
        assert _independent_separation(v.certificate, rho)
