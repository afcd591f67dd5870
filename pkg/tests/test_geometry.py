from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import example, given
from hypothesis import strategies as st

from drum._exact import as_fraction, fmt, solve
from drum.geometry import (ABOVE, BELOW, ON, Budget, GeometryError, build_patches, classify_point, dominates,
                           lies_strictly, path_dominates, representative)
from oracles import brute_dominates, grid_cells, grid_points_in, segment_grid, simple_budgets

price = st.integers(min_value=1, max_value=9)
wealth = st.integers(min_value=3, max_value=30)


def _plane(t):
    return (Fraction(t[0], t[2]), Fraction(t[1], t[2]))


def line_sets(n_min=1, n_max=3):
    lines = st.lists(st.tuples(price, price, wealth), min_size=n_min, max_size=n_max, unique_by=_plane)
    return lines.map(lambda ts: {k: ((a, b), w) for k, (a, b, w) in enumerate(ts, start=1)})


def _build(lines, continuous=False):
    return build_patches([Budget(1, k, p, w) for k, (p, w) in lines.items()], continuous_demand=continuous)


# --------------------------------------------------------------- examples

def test_simple_setup_has_five_distinct_patches():
    ps = build_patches(simple_budgets(1))
    assert [len(ps.patches[j]) for j in (1, 2)] == [3, 3]
    inter = ps.patch(1, 3)
    assert inter.is_intersection and ps.patch(2, 3).is_intersection
    assert inter.same_as == ((2, 3),)
    assert inter.representative == ps.patch(2, 3).representative
    # five as sets: the intersection patch is shared
    distinct = {p.representative if p.is_intersection else (p.owner, p.index) for p in ps.all_patches()}
    assert len(distinct) == 5


def test_single_budget_is_one_patch_without_dominance():
    ps = build_patches([Budget(1, 1, (1, 1), 1)])
    assert len(ps.patches[1]) == 1
    assert ps.dominance == frozenset()
    assert representative(ps.patch(1, 1)) == (Fraction(1, 2), Fraction(1, 2))


def test_point_above_other_plane_lands_in_first_patch():
    ps = build_patches(simple_budgets(1))
    y = (Fraction(0), Fraction(5))  # on B1, costs 25 > 15 at B2 prices
    assert classify_point(y, ps) is ps.patch(1, 1)


def test_interior_point_is_off_plane():
    ps = build_patches(simple_budgets(1))
    assert classify_point((1, 1), ps) is None


def test_intersection_representative_is_the_crossing():
    ps = build_patches(simple_budgets(1))
    x = solve([[Fraction(5), Fraction(3)], [Fraction(3), Fraction(5)]], [Fraction(15), Fraction(15)])
    assert ps.patch(1, 3).representative == tuple(x)


def test_reference_dominance_pairs_hold():
    ps = build_patches(simple_budgets(1), continuous_demand=True)
    assert dominates(ps.patch(1, 1), ps.patch(2, 1))   # x_{1|1} > x_{1|2}
    assert dominates(ps.patch(2, 2), ps.patch(1, 2))   # x_{2|2} > x_{2|1}
    assert ps.dominance == frozenset({((1, 1), (2, 1)), ((2, 2), (1, 2))})


def test_cross_period_dominance_is_rejected():
    a = build_patches(simple_budgets(1))
    b = build_patches(simple_budgets(2))
    with pytest.raises(GeometryError):
        dominates(a.patch(1, 1), b.patch(2, 1))


def test_path_dominance_matches_within_period():
    ps = build_patches(simple_budgets(1))
    for a in ps.all_patches():
        for b in ps.all_patches():
            assert path_dominates(a, b) == dominates(a, b), (a, b)


def test_lies_strictly_on_foreign_plane():
    ps = build_patches(simple_budgets(1))
    far = Budget(2, 1, (1, 1), 100)
    assert all(lies_strictly(p, far, BELOW) for p in ps.all_patches())
    assert not any(lies_strictly(p, far, ABOVE) for p in ps.all_patches())


def test_invalid_budgets_are_rejected():
    with pytest.raises(GeometryError):
        Budget(1, 1, (1,), 1)
    with pytest.raises(GeometryError):
        Budget(1, 1, (0, 1), 1)
    with pytest.raises(GeometryError):
        Budget(1, 1, (1, 1), 0)
    with pytest.raises(GeometryError):
        build_patches([Budget(1, 1, (1, 2), 3), Budget(1, 2, (2, 4), 6)])
    with pytest.raises(GeometryError):
        build_patches([Budget(1, 1, (1, 2), 3), Budget(2, 1, (2, 1), 6)])
    with pytest.raises(TypeError):
        Budget(1, 1, (0.5, 1), 1)


def test_parallel_planes_make_no_intersection_patch():
    ps = build_patches([Budget(1, 1, (1, 2), 4), Budget(1, 2, (1, 2), 8)])
    assert not any(p.is_intersection for p in ps.all_patches())
    assert [len(ps.patches[j]) for j in (1, 2)] == [1, 1]
    # every point of the outer line costs more than every point of the inner one
    assert dominates(ps.patch(2, 1), ps.patch(1, 1))
    assert not dominates(ps.patch(1, 1), ps.patch(2, 1))


def test_three_planes_through_one_point():
    ps = build_patches([Budget(1, 1, (1, 1), 2), Budget(1, 2, (1, 3), 4), Budget(1, 3, (3, 1), 4)])
    inter = [p for p in ps.all_patches() if p.is_intersection]
    assert {p.representative for p in inter} == {(Fraction(1), Fraction(1))}
    assert all(p.signs == (ON, ON) for p in inter)


def test_three_goods_simplex_cells():
    ps = build_patches([Budget(1, 1, (1, 1, 1), 3), Budget(1, 2, (1, 2, 3), 6)])
    for p in ps.all_patches():
        assert p.budget.contains(p.representative)
        assert classify_point(p.representative, ps, owner=p.owner) is p


def test_determinism():
    a = build_patches(simple_budgets(1))
    b = build_patches(simple_budgets(1))
    assert [(p.ref, p.representative, p.signs) for p in a.all_patches()] == \
           [(p.ref, p.representative, p.signs) for p in b.all_patches()]


def test_fraction_helpers():
    assert as_fraction("3/4") == Fraction(3, 4)
    assert fmt(Fraction(2)) == "2/1"
    with pytest.raises(TypeError):
        as_fraction(True)


# ------------------------------------------------------------- properties

@given(line_sets(3, 3))
def test_patch_count_matches_grid_oracle(lines):
    ps = _build(lines)
    for k in lines:
        assert {p.signs for p in ps.patches[k]} == set(grid_cells(lines, k)), k


@given(line_sets(1, 3))
def test_representatives_round_trip(lines):
    ps = _build(lines)
    for p in ps.all_patches():
        assert p.budget.contains(p.representative)
        assert tuple(b.side(p.representative) for _, b, _ in p.cuts) == p.signs
        assert p.is_intersection == (ON in p.signs)
        assert classify_point(p.representative, ps, owner=p.owner) is p


@given(line_sets(2, 3))
def test_every_grid_point_lies_in_exactly_one_patch(lines):
    ps = _build(lines)
    for k, (p, w) in lines.items():
        for y in segment_grid(p, w, 37):
            hits = [q for q in ps.patches[k] if q.contains(y)]
            assert len(hits) == 1


@given(line_sets(2, 3))
@example({1: ((1, 3), 13), 2: ((7, 4), 20), 3: ((4, 2), 10)})  # a cell thinner than the grid step
def test_dominance_matches_brute_force(lines):
    ps = _build(lines)
    pats = ps.all_patches()
    pts = {p.ref: grid_points_in(lines, p.owner, p.signs) for p in pats}
    for a in pats:
        assert not dominates(a, a)
        for b in pats:
            if a.owner == b.owner:
                continue
            if a.is_intersection or b.is_intersection:
                # only the full-dimensional cells are compared against the grid
                continue
            assert dominates(a, b) == brute_dominates(lines, a.owner, pts[a.ref], b.owner, pts[b.ref]), (a, b)
