"""Exact decision of ``rho = A nu, nu >= 0`` with witnesses and Farkas certificates.

The solver is a phase-one simplex over Python ``Fraction`` with Bland's
rule.  On infeasibility the optimal phase-one duals ``d`` satisfy
``d . rho > 0 >= d . a_r`` for every column, which is the separating
certificate.  Both outcomes are re-verified exactly before returning.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

from drum._exact import as_fraction
from drum.rationality import BudgetPath, ChoicePath, ProfileMatrix


class NormalizationError(ValueError):
    """A budget-path block of a demand does not sum to one."""


def _as_choice_path(key) -> ChoicePath:
    if isinstance(key, ChoicePath):
        return key
    budgets, patches = key
    return ChoicePath(tuple(budgets), tuple(patches))


class DynamicStochasticDemand:
    """Exact probabilities over choice paths, one distribution per budget path.

    Paths that are not listed have probability zero.  ``observed`` defaults
    to the budget paths appearing in ``entries``.
    """

    def __init__(self, entries: Mapping, observed: Iterable[BudgetPath] | None = None):
        data = {}
        for k, v in entries.items():
            cp = _as_choice_path(k)
            p = as_fraction(v)
            if p < 0:
                raise ValueError(f"negative probability {p} on {cp.label()}")
            if cp in data:
                raise ValueError(f"choice path {cp.label()} listed twice")
            data[cp] = p
        paths = [tuple(bp) for bp in observed] if observed is not None else list(dict.fromkeys(cp.budgets for cp in data))
        extra = {cp.budgets for cp in data} - set(paths)
        if extra:
            raise ValueError(f"entries on unobserved budget paths {sorted(extra)}")
        self._entries = MappingProxyType(data)
        self.observed: tuple[BudgetPath, ...] = tuple(dict.fromkeys(paths))
        for bp in self.observed:
            total = sum((p for cp, p in data.items() if cp.budgets == bp), Fraction(0))
            if total != 1:
                raise NormalizationError(f"budget path {bp} sums to {total}, not 1")

    @property
    def entries(self) -> Mapping[ChoicePath, Fraction]:
        return self._entries

    @property
    def n_periods(self) -> int:
        return len(self.observed[0]) if self.observed else 0

    def __getitem__(self, key) -> Fraction:
        return self._entries.get(_as_choice_path(key), Fraction(0))

    def get(self, budgets: Sequence, patches: Sequence) -> Fraction:
        return self._entries.get(ChoicePath(tuple(budgets), tuple(patches)), Fraction(0))

    def block(self, budget_path: BudgetPath) -> dict[ChoicePath, Fraction]:
        bp = tuple(budget_path)
        return {cp: p for cp, p in self._entries.items() if cp.budgets == bp}

    def support(self) -> list[ChoicePath]:
        return [cp for cp, p in self._entries.items() if p > 0]

    def vector(self, rows: Sequence[ChoicePath]) -> list[Fraction]:
        index = set(rows)
        stray = [cp for cp, p in self._entries.items() if cp not in index and p != 0]
        if stray:
            raise ValueError(f"demand puts mass on paths outside the matrix rows, e.g. {stray[0].label()}")
        return [self[r] for r in rows]

    def __eq__(self, other) -> bool:
        if not isinstance(other, DynamicStochasticDemand):
            return NotImplemented
        nz = lambda d: {k: v for k, v in d._entries.items() if v != 0}
        return set(self.observed) == set(other.observed) and nz(self) == nz(other)

    def __repr__(self) -> str:
        return f"DynamicStochasticDemand({len(self.observed)} budget paths, {len(self.support())} positive paths)"


@dataclass
class Verdict:
    """Outcome of a feasibility test.

    Exactly one of ``weights`` (a mixing vector over the columns) and
    ``certificate`` (one coefficient per row) is set.
    """

    status: str
    weights: tuple[Fraction, ...] | None = None
    certificate: tuple[Fraction, ...] | None = None
    verified: bool = False
    pivots: int = 0
    runtime_s: float = 0.0
    notes: list[str] = field(default_factory=list)

    @property
    def feasible(self) -> bool:
        return self.status == "feasible"

    def support(self) -> dict[int, Fraction]:
        return {c: v for c, v in enumerate(self.weights or ()) if v != 0}


def _phase_one(A: np.ndarray, b: Sequence[Fraction]) -> tuple[bool, list[Fraction], list[Fraction], int]:
    """Minimize the sum of artificials for ``A x + s = b``, ``x, s >= 0``.

    Returns (feasible, x, duals, pivots).  ``b`` must be nonnegative.
    """
    m, n = A.shape
    zero, one = Fraction(0), Fraction(1)
    tab = []
    for i in range(m):
        row = [Fraction(int(v)) for v in A[i]] + [one if k == i else zero for k in range(m)] + [b[i]]
        tab.append(row)
    basis = [n + i for i in range(m)]
    width = n + m
    # reduced costs of the phase-one objective, last entry is minus the objective
    cost = [-sum((tab[i][j] for i in range(m)), zero) for j in range(n)] + [zero] * m
    cost.append(-sum(b, zero))
    pivots = 0
    while True:
        enter = next((j for j in range(width) if cost[j] < 0), None)
        if enter is None:
            break
        leave, best = None, None
        for i in range(m):
            a = tab[i][enter]
            if a > 0:
                ratio = tab[i][-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    leave, best = i, ratio
        # phase one is bounded below by zero, so an entering column always has a positive entry
        prow = tab[leave]
        piv = prow[enter]
        if piv != 1:
            prow[:] = [v / piv for v in prow]
        nz = [k for k, v in enumerate(prow) if v != 0]
        for i in range(m):
            if i != leave:
                f = tab[i][enter]
                if f != 0:
                    r = tab[i]
                    for k in nz:
                        r[k] -= f * prow[k]
        f = cost[enter]
        for k in nz:
            cost[k] -= f * prow[k]
        basis[leave] = enter
        pivots += 1
    x = [zero] * n
    for i, j in enumerate(basis):
        if j < n:
            x[j] = tab[i][-1]
    duals = [one - cost[n + i] for i in range(m)]
    return cost[-1] == 0, x, duals, pivots


def _check_rows(A: ProfileMatrix, rho: DynamicStochasticDemand) -> list[Fraction]:
    paths = set(A.budget_paths)
    if set(rho.observed) != paths:
        missing = sorted(paths - set(rho.observed))
        extra = sorted(set(rho.observed) - paths)
        raise ValueError(f"budget paths differ between matrix and demand (missing {missing}, extra {extra})")
    return rho.vector(A.rows)


def test_drum(A: ProfileMatrix, rho: DynamicStochasticDemand) -> Verdict:
    """Decide whether ``rho`` is a nonnegative combination of the columns of ``A``."""
    start = time.perf_counter()
    b = _check_rows(A, rho)
    M = A.dense()
    ok, x, duals, pivots = _phase_one(M, b)
    if ok:
        total = sum(x, Fraction(0))
        v = Verdict("feasible", weights=tuple(x), pivots=pivots)
        v.verified = verify_witness(A, rho, x)
        if total != 1:
            raise AssertionError(f"witness weights sum to {total}; columns are not block-stochastic")
    else:
        v = Verdict("infeasible", certificate=tuple(duals), pivots=pivots)
        v.verified = verify_certificate(A, rho, duals)
    if not v.verified:
        raise AssertionError("solver output failed exact re-verification")
    v.runtime_s = time.perf_counter() - start
    return v


test_drum.__test__ = False


def verify_witness(A: ProfileMatrix, rho: DynamicStochasticDemand, nu: Sequence) -> bool:
    """``nu >= 0`` and ``A nu = rho`` exactly."""
    nu = [as_fraction(v) for v in nu]
    if len(nu) != A.n_columns or any(v < 0 for v in nu):
        return False
    b = _check_rows(A, rho)
    M = A.dense()
    cols = [c for c, v in enumerate(nu) if v != 0]
    for i in range(A.n_rows):
        if sum((nu[c] for c in cols if M[i, c]), Fraction(0)) != b[i]:
            return False
    return True


def certificate_margin(A: ProfileMatrix, rho: DynamicStochasticDemand, d: Sequence) -> Fraction:
    """``d . rho - max_r d . a_r``; positive exactly when ``d`` separates."""
    d = [as_fraction(v) for v in d]
    if len(d) != A.n_rows:
        raise ValueError(f"certificate has {len(d)} entries, matrix has {A.n_rows} rows")
    b = _check_rows(A, rho)
    M = A.dense()
    rows = [i for i, v in enumerate(d) if v != 0]
    best = max(sum((d[i] for i in rows if M[i, c]), Fraction(0)) for c in range(A.n_columns))
    return sum((di * bi for di, bi in zip(d, b)), Fraction(0)) - best


def verify_certificate(A: ProfileMatrix, rho: DynamicStochasticDemand, d: Sequence) -> bool:
    """``d . rho > max_r d . a_r`` exactly."""
    return certificate_margin(A, rho, d) > 0


def adsrp_multiplicities(A: ProfileMatrix, d: Sequence) -> dict[ChoicePath, int]:
    """Turn a signed rational certificate into a violating sequence with repetitions.

    Every profile column and every block-normalized demand puts total
    weight one on each budget-path block, so adding a constant to all
    entries of a block shifts both sides of the separating inequality by
    the same amount.  Shifting each block to a zero minimum and clearing
    denominators leaves nonnegative integer counts ``n_k``; repeating each
    choice path ``n_k`` times gives a sequence whose summed probability
    exceeds the most any rational profile can collect on it.
    """
    d = [as_fraction(v) for v in d]
    shifted = list(d)
    for idx in A.blocks().values():
        low = min(d[i] for i in idx)
        for i in idx:
            shifted[i] = d[i] - low
    scale = math.lcm(*(v.denominator for v in shifted))
    return {A.rows[i]: int(v * scale) for i, v in enumerate(shifted) if v != 0}
