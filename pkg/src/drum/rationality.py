"""Rational demand types per period and the dynamic profile matrix."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from graphlib import CycleError, TopologicalSorter
from itertools import product
from typing import Hashable, Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from drum.geometry import Patch, PatchSet

BudgetPath = tuple
DEFAULT_MAX_ENTRIES = 10**7


class ColumnLimitError(RuntimeError):
    """The dense profile matrix would exceed the configured entry cap."""


class ChoicePath(NamedTuple):
    """One patch per period along a budget path (1-based patch indices)."""

    budgets: tuple
    patches: tuple

    @property
    def key(self) -> tuple:
        return tuple(zip(self.budgets, self.patches))

    def label(self) -> str:
        return "{" + ", ".join(
            f"x^{t}_{{{i}|{_short(j)}}}" for t, (j, i) in enumerate(self.key, start=1)
        ) + "}"


def _short(owner) -> str:
    return f"{owner[1]}" if isinstance(owner, tuple) else f"{owner}"


@dataclass(frozen=True)
class DemandType:
    """One patch choice per budget of a period."""

    period: int | None
    owners: tuple
    choice: tuple[int, ...]

    def picks(self, owner: Hashable) -> int:
        return self.choice[self.owners.index(owner)]

    @property
    def label(self) -> str:
        t = "" if self.period is None else self.period
        return f"theta^{t}_{{{','.join(map(str, self.choice))}}}"


def revealed_preferred(chosen: Patch, other: Patch) -> bool:
    """Strict revealed preference of the patch chosen on a budget over another choice.

    The chosen representative beats every distinct chosen representative
    that is weakly affordable on its budget.  This is the one place where
    the affordability convention lives.
    """
    b = chosen.budget
    return other.representative != chosen.representative and b.cost(other.representative) <= b.expenditure


def is_rational(choices: Sequence[Patch]) -> bool:
    """True iff the strict revealed-preference digraph on ``choices`` is acyclic."""
    graph = {
        n: {m for m, b in enumerate(choices) if m != n and revealed_preferred(a, b)}
        for n, a in enumerate(choices)
    }
    try:
        tuple(TopologicalSorter(graph).static_order())
    except CycleError:
        return False
    return True


def enumerate_rational_types(patch_set: PatchSet) -> list[DemandType]:
    """All rationalizable assignments of one patch per budget, lexicographic."""
    owners = patch_set.owners
    out = []
    for combo in product(*(patch_set.choice_patches(k) for k in owners)):
        if is_rational(combo):
            out.append(DemandType(patch_set.period, owners, tuple(p.index for p in combo)))
    return out


def choice_paths(patch_sets: Sequence[PatchSet], budget_path: BudgetPath) -> list[ChoicePath]:
    if len(budget_path) != len(patch_sets):
        raise ValueError(f"budget path {budget_path} does not have {len(patch_sets)} periods")
    options = [[p.index for p in ps.choice_patches(j)] for ps, j in zip(patch_sets, budget_path)]
    return [ChoicePath(tuple(budget_path), ii) for ii in product(*options)]


class ProfileMatrix:
    """The 0/1 matrix with one row per choice path and one column per profile.

    Columns are the Cartesian product of the per-period type lists with the
    first period most significant.  Rows are sorted lexicographically by
    ``((j_1, i_1), ..., (j_T, i_T))``; ``blocks()`` regroups them by budget
    path.  The dense array is only materialized on request.
    """

    def __init__(self, rows: Sequence[ChoicePath], types: Sequence[Sequence[DemandType]],
                 patch_sets: Sequence[PatchSet], *, max_entries: int = DEFAULT_MAX_ENTRIES):
        self.rows = tuple(rows)
        self.types = tuple(tuple(ts) for ts in types)
        self.patch_sets = tuple(patch_sets)
        self.max_entries = max_entries
        self._row_index = {r: n for n, r in enumerate(self.rows)}
        if len(self._row_index) != len(self.rows):
            raise ValueError("duplicate choice paths in rows")

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def n_columns(self) -> int:
        return int(np.prod([len(ts) for ts in self.types], dtype=object))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_rows, self.n_columns)

    @property
    def budget_paths(self) -> list[BudgetPath]:
        return list(dict.fromkeys(r.budgets for r in self.rows))

    def row_index(self, path: ChoicePath) -> int:
        return self._row_index[ChoicePath(tuple(path[0]), tuple(path[1]))]

    def blocks(self) -> dict[BudgetPath, list[int]]:
        out: dict[BudgetPath, list[int]] = {}
        for n, r in enumerate(self.rows):
            out.setdefault(r.budgets, []).append(n)
        return out

    def profile(self, column: int) -> tuple[DemandType, ...]:
        picks = []
        for ts in reversed(self.types):
            column, rem = divmod(column, len(ts))
            picks.append(ts[rem])
        return tuple(reversed(picks))

    def profiles(self) -> Iterator[tuple[DemandType, ...]]:
        return product(*self.types)

    def column_index(self, profile: Sequence[DemandType]) -> int:
        c = 0
        for ts, th in zip(self.types, profile):
            c = c * len(ts) + ts.index(th)
        return c

    @cached_property
    def _static(self) -> list[dict[tuple, np.ndarray]]:
        out = []
        for ps, ts in zip(self.patch_sets, self.types):
            table = {}
            for k in ps.owners:
                for p in ps.choice_patches(k):
                    table[(k, p.index)] = np.array([th.picks(k) == p.index for th in ts], dtype=np.uint8)
            out.append(table)
        return out

    def row(self, n: int) -> np.ndarray:
        vec = np.ones(1, dtype=np.uint8)
        for table, key in zip(self._static, self.rows[n].key):
            vec = np.kron(vec, table[key])
        return vec

    def entry(self, n: int, column: int) -> int:
        return int(all(th.picks(j) == i for th, (j, i) in zip(self.profile(column), self.rows[n].key)))

    def column(self, c: int) -> np.ndarray:
        prof = self.profile(c)
        return np.array(
            [all(th.picks(j) == i for th, (j, i) in zip(prof, r.key)) for r in self.rows], dtype=np.uint8
        )

    def dense(self) -> np.ndarray:
        size = self.n_rows * self.n_columns
        if size > self.max_entries:
            raise ColumnLimitError(
                f"profile matrix would have {self.n_rows} x {self.n_columns} = {size} entries, "
                f"above the cap of {self.max_entries}; raise max_entries or observe fewer budget paths"
            )
        return self._dense

    @cached_property
    def _dense(self) -> np.ndarray:
        if not self.rows:
            return np.zeros((0, self.n_columns), dtype=np.uint8)
        return np.vstack([self.row(n) for n in range(self.n_rows)])

    def column_label(self, c: int) -> str:
        return "(" + ", ".join(th.label for th in self.profile(c)) + ")"


def build_profile_matrix(per_period_types: Sequence[Sequence[DemandType]], observed_paths: Iterable[BudgetPath],
                         patch_sets: Sequence[PatchSet], *, max_entries: int = DEFAULT_MAX_ENTRIES) -> ProfileMatrix:
    if len(per_period_types) != len(patch_sets):
        raise ValueError("need one type list per period")
    for t, ts in enumerate(per_period_types, start=1):
        if not ts:
            raise ValueError(f"period {t} has no rational demand types; the patch set is corrupt")
    paths = [tuple(bp) for bp in observed_paths]
    if not paths:
        raise ValueError("no observed budget paths")
    if len(set(paths)) != len(paths):
        raise ValueError("observed budget paths contain duplicates")
    for bp in paths:
        for ps, j in zip(patch_sets, bp):
            if j not in ps.budgets:
                raise ValueError(f"budget path {bp}: period {ps.period} has no budget {j!r}")
    rows = [cp for bp in paths for cp in choice_paths(patch_sets, bp)]
    rows.sort(key=lambda r: r.key)
    return ProfileMatrix(rows, per_period_types, patch_sets, max_entries=max_entries)


def profile_matrix(patch_sets: Sequence[PatchSet], observed_paths: Iterable[BudgetPath], *,
                   max_entries: int = DEFAULT_MAX_ENTRIES) -> ProfileMatrix:
    """Enumerate the rational types of every period and assemble the matrix."""
    types = [enumerate_rational_types(ps) for ps in patch_sets]
    return build_profile_matrix(types, observed_paths, patch_sets, max_entries=max_entries)
