"""Pooling: discard time labels and treat every budget as one cross-section.

Pooled patches come from one arrangement over all budgets of all periods,
owned by ``(period, index)`` pairs.  They refine the per-period patches, so
pooling needs the chosen points rather than patch-level frequencies.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from drum._exact import as_fraction
from drum.feasibility import Verdict
from drum.axioms import _static_test
from drum.geometry import (Budget, GeometryError, Patch, PatchSet, _arrange, build_patches, check_distinct,
                            classify_point)
from drum.simulation import Panel


class PanelError(ValueError):
    """A panel row that cannot be placed in the arrangement."""


@dataclass(frozen=True, eq=False)
class PooledPatchSet:
    """The pooled arrangement plus the map from pooled to original patches."""

    patches: PatchSet
    originals: tuple[PatchSet, ...]
    refines: Mapping[tuple[tuple[int, int], int], tuple[int, int, int]]

    def original_of(self, pooled: Patch) -> tuple[int, int, int]:
        """``(period, budget index, patch index)`` of the original patch containing ``pooled``."""
        return self.refines[pooled.ref]

    def refining(self, period: int, budget: int, index: int) -> list[Patch]:
        return [self.patches.patch(o, k) for (o, k), orig in self.refines.items() if orig == (period, budget, index)]


def build_pooled_patches(budgets: Iterable[Budget], *, continuous_demand: bool = False) -> PooledPatchSet:
    """One arrangement over the budgets of every period.

    Two budgets describing the same plane, in any periods, are rejected:
    pooled patches would then be owned twice.
    """
    bs = list(budgets)
    if not bs:
        raise GeometryError("no budgets given")
    keys = [b.key for b in bs]
    if len(set(keys)) != len(keys):
        raise GeometryError("duplicate (period, index) pair among budgets")
    if len({b.n_goods for b in bs}) != 1:
        raise GeometryError("budgets disagree on the number of goods")
    check_distinct(bs)
    pooled = _arrange({b.key: b for b in bs}, period=None, continuous_demand=continuous_demand, pooled=True)
    periods = sorted({b.period for b in bs})
    originals = tuple(
        build_patches([b for b in bs if b.period == t], continuous_demand=continuous_demand) for t in periods
    )
    by_period = dict(zip(periods, originals))
    refines = {}
    for p in pooled.all_patches():
        t, j = p.owner
        orig = classify_point(p.representative, by_period[t], owner=j)
        refines[p.ref] = (t, j, orig.index)
    return PooledPatchSet(pooled, originals, MappingProxyType(refines))


class PooledDemand:
    """Choice frequencies over pooled patches, normalized per ``(period, budget)``."""

    def __init__(self, entries: Mapping[tuple[tuple[int, int], int], Fraction]):
        data = {}
        totals: dict[tuple[int, int], Fraction] = {}
        for (owner, k), v in entries.items():
            v = as_fraction(v)
            if v < 0:
                raise ValueError(f"negative pooled probability on {owner}, patch {k}")
            data[(tuple(owner), k)] = v
            totals[tuple(owner)] = totals.get(tuple(owner), Fraction(0)) + v
        for owner, s in totals.items():
            if s != 1:
                raise ValueError(f"pooled demand on budget {owner} sums to {s}, not 1")
        self._entries = MappingProxyType(dict(sorted(data.items())))

    @property
    def entries(self) -> Mapping[tuple[tuple[int, int], int], Fraction]:
        return self._entries

    @property
    def owners(self) -> list[tuple[int, int]]:
        return sorted({o for o, _ in self._entries})

    def value(self, period: int, budget: int, index: int) -> Fraction:
        return self._entries.get(((period, budget), index), Fraction(0))

    def coarsen(self, pooled: PooledPatchSet) -> dict[tuple[int, int, int], Fraction]:
        """Sum over the pooled patches refining each original patch."""
        out: dict[tuple[int, int, int], Fraction] = {}
        for ref, v in self._entries.items():
            key = pooled.refines[ref]
            out[key] = out.get(key, Fraction(0)) + v
        return out


def _row_masses(panel: Panel, weighting: str) -> list[Fraction]:
    if weighting == "observation":
        return [r.mass for r in panel.rows]
    if weighting == "agent":
        counts: dict = {}
        for r in panel.rows:
            counts[r.agent] = counts.get(r.agent, 0) + 1
        return [r.mass / counts[r.agent] for r in panel.rows]
    raise ValueError(f"unknown weighting {weighting!r}; use 'observation' or 'agent'")


def pool(panel: Panel, pooled: PooledPatchSet, weighting: str = "observation") -> PooledDemand:
    """Relative frequency of each pooled patch among the choices made on its budget.

    With ``"observation"`` weighting every (agent, period) row counts by
    its own mass; with ``"agent"`` each agent's rows share that agent's
    mass equally, so agents observed more often do not count more.
    """
    if not panel.rows:
        raise PanelError("empty panel: nothing to pool")
    ps = pooled.patches
    counts: dict[tuple[tuple[int, int], int], Fraction] = {}
    totals: dict[tuple[int, int], Fraction] = {}
    for n, (row, mass) in enumerate(zip(panel.rows, _row_masses(panel, weighting))):
        key = (row.period, row.budget)
        if key not in ps.budgets:
            raise PanelError(f"row {n} (agent {row.agent}): no budget {row.budget} in period {row.period}")
        b = ps.budgets[key]
        if not b.contains(row.point):
            raise PanelError(
                f"row {n} (agent {row.agent}): point {tuple(map(str, row.point))} is off budget {key}, "
                f"cost {b.cost(row.point)} vs expenditure {b.expenditure}"
            )
        p = classify_point(row.point, ps, owner=key)
        counts[p.ref] = counts.get(p.ref, Fraction(0)) + mass
        totals[key] = totals.get(key, Fraction(0)) + mass
    return PooledDemand({ref: c / totals[ref[0]] for ref, c in counts.items()})


def period_frequencies(panel: Panel, originals: Sequence[PatchSet], weighting: str = "observation"
                       ) -> dict[tuple[int, int, int], Fraction]:
    """Per-period empirical patch frequencies of the same panel, unpooled."""
    by_period = {ps.period: ps for ps in originals}
    counts: dict[tuple[int, int, int], Fraction] = {}
    totals: dict[tuple[int, int], Fraction] = {}
    for row, mass in zip(panel.rows, _row_masses(panel, weighting)):
        p = classify_point(row.point, by_period[row.period], owner=row.budget)
        if p is None:
            raise PanelError(f"agent {row.agent}: point is off budget ({row.period}, {row.budget})")
        key = (row.period, row.budget, p.index)
        counts[key] = counts.get(key, Fraction(0)) + mass
        totals[(row.period, row.budget)] = totals.get((row.period, row.budget), Fraction(0)) + mass
    return {k: v / totals[k[:2]] for k, v in sorted(counts.items())}


def test_rum_pooled(pooled_demand: PooledDemand, pooled: PooledPatchSet) -> Verdict:
    """Static RUM test on the pooled cross-section."""
    family = {}
    for owner in pooled_demand.owners:
        for p in pooled.patches.choice_patches(owner):
            family[(owner, p.index)] = pooled_demand.entries.get((owner, p.index), Fraction(0))
    stray = [ref for ref, v in pooled_demand.entries.items() if v and ref not in family]
    if stray:
        raise ValueError(f"pooled demand puts mass on intersection patches {stray} under continuous demand")
    return _static_test(family, pooled.patches)


test_rum_pooled.__test__ = False
