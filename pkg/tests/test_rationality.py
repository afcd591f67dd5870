from __future__ import annotations

from importlib import resources
from itertools import product

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from drum.geometry import Budget, build_patches
from drum.rationality import (ChoicePath, ColumnLimitError, build_profile_matrix, choice_paths,
                              enumerate_rational_types, is_rational, profile_matrix, revealed_preferred)
from oracles import SIMPLE_PATHS, SIMPLE_TYPES, SIMPLE_MATRIX, has_cycle, simple_budgets, simple_patch_sets, matrix_row_order


def _golden_rows():
    text = resources.files("drum.data").joinpath("simple_matrix.txt").read_text()
    return [line.replace(" ", "") for line in text.splitlines() if line and not line.startswith("#")]


def test_simple_setup_types_are_the_three_reference_ones(simple):
    for ps in simple:
        assert [th.choice for th in enumerate_rational_types(ps)] == SIMPLE_TYPES


def test_intersection_patches_add_types_without_continuous_demand():
    ps = build_patches(simple_budgets(1), continuous_demand=False)
    choices = {th.choice for th in enumerate_rational_types(ps)}
    assert set(SIMPLE_TYPES) <= choices
    assert (2, 1) not in choices
    assert (3, 3) in choices  # both budgets choose the shared crossing point


def test_profile_matrix_matches_reference_matrix(simple):
    A = profile_matrix(simple, SIMPLE_PATHS)
    assert A.shape == (16, 9)
    assert [(r.key[0], r.key[1]) for r in A.rows] == matrix_row_order()
    dense = ["".join(str(int(x)) for x in row) for row in A.dense()]
    assert dense == SIMPLE_MATRIX


def test_shipped_golden_matches_transcription():
    assert _golden_rows() == SIMPLE_MATRIX


def test_columns_are_block_stochastic(simple):
    A = profile_matrix(simple, SIMPLE_PATHS)
    M = A.dense()
    for idx in A.blocks().values():
        assert (M[idx].sum(axis=0) == 1).all()


def test_column_is_product_of_period_types(simple):
    A = profile_matrix(simple, SIMPLE_PATHS)
    for c in range(A.n_columns):
        prof = A.profile(c)
        assert A.column_index(prof) == c
        for n, r in enumerate(A.rows):
            expect = all(th.picks(j) == i for th, j, i in zip(prof, r.budgets, r.patches))
            assert A.entry(n, c) == int(expect)
            assert A.column(c)[n] == int(expect)


def test_single_budget_path_gives_one_row_per_choice_path(simple):
    A = profile_matrix(simple, [(1, 2)])
    assert A.n_rows == 4 and A.n_columns == 9
    assert [r.budgets for r in A.rows] == [(1, 2)] * 4


def test_one_period_matrix():
    ps = build_patches(simple_budgets(1), continuous_demand=True)
    A = profile_matrix([ps], [(1,), (2,)])
    assert A.shape == (4, 3)
    assert A.dense().tolist() == [[1, 1, 0], [0, 0, 1], [1, 0, 0], [0, 1, 1]]


def test_bad_paths_are_rejected(simple):
    with pytest.raises(ValueError):
        profile_matrix(simple, [])
    with pytest.raises(ValueError):
        profile_matrix(simple, [(1, 1), (1, 1)])
    with pytest.raises(ValueError):
        profile_matrix(simple, [(1, 3)])
    with pytest.raises(ValueError):
        choice_paths(simple, (1,))


def test_column_cap(simple):
    A = profile_matrix(simple, SIMPLE_PATHS, max_entries=10)
    assert A.entry(0, 0) == 1  # entries stay available without the dense form
    with pytest.raises(ColumnLimitError):
        A.dense()


def test_choice_path_label():
    assert ChoicePath((1, 2), (2, 1)).label() == "{x^1_{2|1}, x^2_{1|2}}"


def test_revealed_preference_is_weak_affordability(simple):
    ps = simple[0]
    a, b = ps.patch(1, 2), ps.patch(2, 1)
    assert revealed_preferred(a, b) and revealed_preferred(b, a)
    assert not is_rational([a, b])


# ------------------------------------------------------------- properties

lines = st.lists(st.tuples(st.integers(1, 7), st.integers(1, 7), st.integers(3, 25)),
                 min_size=1, max_size=3, unique_by=lambda t: (t[0] * 1000 // t[2], t[1] * 1000 // t[2], t))


def _costs(b, y):
    return sum(p * v for p, v in zip(b.prices, y))


@given(lines)
def test_types_match_floyd_warshall_oracle(ls):
    budgets = [Budget(1, k, (a, b), w) for k, (a, b, w) in enumerate(ls, start=1)]
    try:
        ps = build_patches(budgets)
    except ValueError:
        return  # coincident planes
    found = {th.choice for th in enumerate_rational_types(ps)}
    owners = ps.owners
    for combo in product(*(ps.choice_patches(k) for k in owners)):
        reps = [p.representative for p in combo]
        edges = [(u, v) for u in range(len(combo)) for v in range(len(combo))
                 if u != v and reps[u] != reps[v] and _costs(combo[u].budget, reps[v]) <= combo[u].budget.expenditure]
        assert (tuple(p.index for p in combo) in found) == (not has_cycle(len(combo), edges))


@given(st.integers(1, 3), st.integers(1, 3))
def test_matrix_rows_cover_every_choice_path_once(j1, j2):
    pss = simple_patch_sets()
    paths = sorted({(1, 1), (min(j1, 2), min(j2, 2))})
    A = profile_matrix(pss, paths)
    expect = sorted(cp.key for bp in paths for cp in choice_paths(pss, bp))
    assert [r.key for r in A.rows] == expect
    assert np.array_equal(A.dense(), np.vstack([A.row(n) for n in range(A.n_rows)]))


def test_build_requires_types_per_period(simple):
    with pytest.raises(ValueError):
        build_profile_matrix([enumerate_rational_types(simple[0])], SIMPLE_PATHS, simple)
