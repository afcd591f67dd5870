"""Necessary conditions for DRUM: stability, monotonicity, intensity
monotonicity, slicing to per-period marginals, and SARPD.

Every check returns an :class:`AxiomReport`.  A check that the observed
budget paths cannot instantiate reports ``"not applicable"`` rather than
``"pass"``.

Monotonicity works with unions of patches.  For a dominance pair
``x_{l|k} > x_{l'|k'}`` in period ``t`` the dominating union collects the
patches of budget ``k`` that dominate ``x_{l'|k'}`` and the dominated
union the patches of ``k'`` dominated by ``x_{l|k}``.  Any rational type
that picks from the dominated union on ``k'`` picks from the dominating
union on ``k``, which is what makes the inequalities necessary.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Hashable, Sequence

from drum._exact import fmt
from drum.feasibility import DynamicStochasticDemand, Verdict, test_drum
from drum.geometry import PatchSet, dominates, path_dominates
from drum.rationality import BudgetPath, ChoicePath, build_profile_matrix, enumerate_rational_types

PASS, FAIL, NOT_APPLICABLE = "pass", "fail", "not applicable"


@dataclass
class Violation:
    """A breached relation ``sum(rho[lhs_paths]) <relation> sum(rho[rhs_paths])``."""

    description: str
    relation: str
    lhs: Fraction
    rhs: Fraction
    lhs_paths: tuple[ChoicePath, ...] = ()
    rhs_paths: tuple[ChoicePath, ...] = ()

    def holds(self, rho: DynamicStochasticDemand) -> bool:
        lhs = sum((rho[p] for p in self.lhs_paths), Fraction(0))
        rhs = sum((rho[p] for p in self.rhs_paths), Fraction(0))
        return lhs == rhs if self.relation == "==" else lhs >= rhs

    def to_record(self) -> dict:
        return {
            "description": self.description,
            "relation": self.relation,
            "lhs": fmt(self.lhs),
            "rhs": fmt(self.rhs),
            "lhs_paths": [cp.label() for cp in self.lhs_paths],
            "rhs_paths": [cp.label() for cp in self.rhs_paths],
        }


@dataclass
class AxiomReport:
    axiom: str
    status: str
    violations: list[Violation] = field(default_factory=list)
    checked: int = 0
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.status != FAIL

    def summary(self) -> str:
        head = f"{self.axiom}: {self.status} ({self.checked} relations checked, {len(self.violations)} violated)"
        lines = [head] + [f"  note: {n}" for n in self.notes]
        for v in self.violations[:20]:
            lines.append(f"  {v.description}: {fmt(v.lhs)} {v.relation} {fmt(v.rhs)} fails")
        if len(self.violations) > 20:
            lines.append(f"  ... {len(self.violations) - 20} more")
        return "\n".join(lines)

    def to_record(self) -> dict:
        return {
            "axiom": self.axiom,
            "status": self.status,
            "checked": self.checked,
            "notes": list(self.notes),
            "violations": [v.to_record() for v in self.violations],
        }


def _report(axiom: str, checked: int, violations: list[Violation], notes=()) -> AxiomReport:
    if checked == 0:
        return AxiomReport(axiom, NOT_APPLICABLE, [], 0, list(notes) or ["no instance of the axiom is observed"])
    return AxiomReport(axiom, FAIL if violations else PASS, violations, checked, list(notes))


def _drop(seq: tuple, positions: Sequence[int]) -> tuple:
    return tuple(v for n, v in enumerate(seq) if n not in positions)


def _put(seq: tuple, assignments: dict[int, Hashable]) -> tuple:
    out, it = [], iter(seq)
    for n in range(len(seq) + len(assignments)):
        out.append(assignments[n] if n in assignments else next(it))
    return tuple(out)


def _contexts(observed: Sequence[BudgetPath], positions: Sequence[int]) -> dict[tuple, set[tuple]]:
    """Group observed budget paths by their entries outside ``positions``."""
    out: dict[tuple, set[tuple]] = {}
    for bp in observed:
        out.setdefault(_drop(bp, positions), set()).add(tuple(bp[p] for p in positions))
    return out


def _other_choices(patch_sets: Sequence[PatchSet], ctx_budgets: tuple, positions: Sequence[int]):
    others = [ps for n, ps in enumerate(patch_sets) if n not in positions]
    return product(*([p.index for p in ps.choice_patches(j)] for ps, j in zip(others, ctx_budgets)))


def _paths(ctx_budgets, ctx_patches, fixed: dict[int, tuple[Hashable, Sequence[int]]]) -> tuple[ChoicePath, ...]:
    """All choice paths with the context outside ``fixed`` and unions inside."""
    positions = sorted(fixed)
    bp = _put(ctx_budgets, {p: fixed[p][0] for p in positions})
    out = []
    for combo in product(*(fixed[p][1] for p in positions)):
        out.append(ChoicePath(bp, _put(ctx_patches, dict(zip(positions, combo)))))
    return tuple(out)


def _where(ctx_budgets, ctx_patches) -> str:
    if not ctx_budgets:
        return ""
    return " with other periods at " + ", ".join(f"patch {i} of budget {j}" for j, i in zip(ctx_budgets, ctx_patches))


def _mass(rho: DynamicStochasticDemand, paths) -> Fraction:
    return sum((rho[p] for p in paths), Fraction(0))


def _check_periods(rho: DynamicStochasticDemand, patch_sets: Sequence[PatchSet]) -> None:
    if rho.n_periods != len(patch_sets):
        raise ValueError(f"demand has {rho.n_periods} periods but {len(patch_sets)} patch sets were given")


def check_stability(rho: DynamicStochasticDemand, patch_sets: Sequence[PatchSet]) -> AxiomReport:
    """The mass of a partial path must not depend on the budget it is completed with."""
    _check_periods(rho, patch_sets)
    if len(patch_sets) < 2:
        return _report("stability", 0, [], ["a single period has no other period to condition on"])
    checked, bad = 0, []
    for t, ps in enumerate(patch_sets):
        for ctx, budgets in _contexts(rho.observed, [t]).items():
            js = sorted(j for (j,) in budgets)
            if len(js) < 2:
                continue
            for ctx_patches in _other_choices(patch_sets, ctx, [t]):
                groups = {j: _paths(ctx, ctx_patches, {t: (j, [p.index for p in ps.choice_patches(j)])}) for j in js}
                base = js[0]
                for j in js[1:]:
                    checked += 1
                    lhs, rhs = _mass(rho, groups[base]), _mass(rho, groups[j])
                    if lhs != rhs:
                        bad.append(Violation(
                            f"period {t + 1}: mass given budget {base} vs budget {j}{_where(ctx, ctx_patches)}",
                            "==", lhs, rhs, groups[base], groups[j]))
    return _report("stability", checked, bad)


def dominance_unions(ps: PatchSet) -> list[tuple[Hashable, tuple[int, ...], Hashable, tuple[int, ...]]]:
    """Distinct ``(k, dominating patches on k, k', dominated patches on k')`` per dominance pair."""
    out = {}
    for k in ps.owners:
        for k2 in ps.owners:
            if k == k2:
                continue
            for a in ps.choice_patches(k):
                for b in ps.choice_patches(k2):
                    if not dominates(a, b):
                        continue
                    up = tuple(p.index for p in ps.choice_patches(k) if dominates(p, b))
                    down = tuple(p.index for p in ps.choice_patches(k2) if dominates(a, p))
                    out.setdefault((k, up, k2, down), None)
    return list(out)


def check_monotonicity(rho: DynamicStochasticDemand, patch_sets: Sequence[PatchSet]) -> AxiomReport:
    """Mass on the dominating union is at least the mass on the dominated union."""
    _check_periods(rho, patch_sets)
    checked, bad = 0, []
    for t, ps in enumerate(patch_sets):
        unions = dominance_unions(ps)
        if not unions:
            continue
        for ctx, budgets in _contexts(rho.observed, [t]).items():
            present = {j for (j,) in budgets}
            for k, up, k2, down in unions:
                if k not in present or k2 not in present:
                    continue
                for ctx_patches in _other_choices(patch_sets, ctx, [t]):
                    checked += 1
                    hi = _paths(ctx, ctx_patches, {t: (k, up)})
                    lo = _paths(ctx, ctx_patches, {t: (k2, down)})
                    lhs, rhs = _mass(rho, hi), _mass(rho, lo)
                    if lhs < rhs:
                        bad.append(Violation(
                            f"period {t + 1}: budget {k} patches {list(up)} vs budget {k2} patches {list(down)}"
                            f"{_where(ctx, ctx_patches)}",
                            ">=", lhs, rhs, hi, lo))
    return _report("monotonicity", checked, bad)


def check_intensity_monotonicity(rho: DynamicStochasticDemand, patch_sets: Sequence[PatchSet]) -> AxiomReport:
    """Difference-in-differences across two periods' dominance pairs.

    With dominating/dominated unions ``D_t, d_t`` and ``D_s, d_s`` the
    relation is ``rho(D_t,D_s) - rho(d_t,D_s) >= rho(D_t,d_s) - rho(d_t,d_s)``.
    Swapping the roles of the two periods gives the same inequality, so
    each unordered period pair is visited once.
    """
    _check_periods(rho, patch_sets)
    T = len(patch_sets)
    if T < 2:
        return AxiomReport("intensity monotonicity", NOT_APPLICABLE, notes=["needs at least two periods"])
    checked, bad = 0, []
    unions = [dominance_unions(ps) for ps in patch_sets]
    for t in range(T):
        for s in range(t + 1, T):
            if not unions[t] or not unions[s]:
                continue
            for ctx, budgets in _contexts(rho.observed, [t, s]).items():
                for k, up, k2, down in unions[t]:
                    for j, up_s, j2, down_s in unions[s]:
                        if not {(k, j), (k2, j), (k, j2), (k2, j2)} <= budgets:
                            continue
                        for ctx_patches in _other_choices(patch_sets, ctx, [t, s]):
                            checked += 1
                            DD = _paths(ctx, ctx_patches, {t: (k, up), s: (j, up_s)})
                            dD = _paths(ctx, ctx_patches, {t: (k2, down), s: (j, up_s)})
                            Dd = _paths(ctx, ctx_patches, {t: (k, up), s: (j2, down_s)})
                            dd = _paths(ctx, ctx_patches, {t: (k2, down), s: (j2, down_s)})
                            lhs = _mass(rho, DD) + _mass(rho, dd)
                            rhs = _mass(rho, dD) + _mass(rho, Dd)
                            if lhs < rhs:
                                bad.append(Violation(
                                    f"periods {t + 1},{s + 1}: budgets ({k}:{list(up)} > {k2}:{list(down)}) x "
                                    f"({j}:{list(up_s)} > {j2}:{list(down_s)}){_where(ctx, ctx_patches)}",
                                    ">=", lhs, rhs, DD + dd, dD + Dd))
    return _report("intensity monotonicity", checked, bad)


@dataclass
class MarginalDemand:
    """Per-period choice frequencies, computed separately for every
    combination of budgets faced in the other periods."""

    period: int
    by_context: dict[tuple, dict[tuple[Hashable, int], Fraction]]
    well_defined: bool
    unobserved: list[tuple[Hashable, int]] = field(default_factory=list)

    @property
    def entries(self) -> dict[tuple[Hashable, int], Fraction] | None:
        """The common marginal, or None when conditioning families disagree."""
        if not self.well_defined:
            return None
        out = {}
        for fam in self.by_context.values():
            out.update(fam)
        return dict(sorted(out.items()))

    def value(self, owner: Hashable, index: int, context: tuple | None = None) -> Fraction:
        if context is not None:
            return self.by_context[tuple(context)][(owner, index)]
        entries = self.entries
        if entries is None:
            raise ValueError(f"period {self.period} marginal depends on the other periods' budgets; pass a context")
        return entries[(owner, index)]


def slice_period(rho: DynamicStochasticDemand, patch_sets: Sequence[PatchSet], period: int) -> MarginalDemand:
    """Marginal demand of ``period`` (1-based), one family per other-period budget context."""
    _check_periods(rho, patch_sets)
    t = period - 1
    ps = patch_sets[t]
    fams: dict[tuple, dict] = {}
    for bp in rho.observed:
        ctx = _drop(bp, [t])
        fam = fams.setdefault(ctx, {})
        for p in ps.choice_patches(bp[t]):
            fam[(bp[t], p.index)] = Fraction(0)
    for cp, v in rho.entries.items():
        fams[_drop(cp.budgets, [t])][(cp.budgets[t], cp.patches[t])] += v
    seen: dict[tuple, Fraction] = {}
    ok = True
    for fam in fams.values():
        for key, v in fam.items():
            if seen.setdefault(key, v) != v:
                ok = False
    missing = [(k, p.index) for k in ps.owners for p in ps.choice_patches(k) if (k, p.index) not in seen]
    return MarginalDemand(period, {c: dict(sorted(f.items())) for c, f in sorted(fams.items())}, ok, missing)


def _static_test(family: dict, patch_set: PatchSet) -> Verdict:
    owners = sorted({k for k, _ in family})
    rho = DynamicStochasticDemand({((k,), (i,)): v for (k, i), v in family.items() if v != 0},
                                  observed=[(k,) for k in owners])
    A = build_profile_matrix([enumerate_rational_types(patch_set)], [(k,) for k in owners], [patch_set])
    return test_drum(A, rho)


def test_rum_static(marginal: MarginalDemand, patch_set: PatchSet, context: tuple | None = None) -> Verdict:
    """Static RUM test of one period's marginal.

    Needs a well-defined marginal, or an explicit ``context`` naming the
    conditioning family to test.
    """
    if context is not None:
        return _static_test(marginal.by_context[tuple(context)], patch_set)
    if not marginal.well_defined:
        raise ValueError(f"period {marginal.period} marginal is not well defined; "
                         "pass a context or use test_rum_slices")
    return _static_test(marginal.entries, patch_set)


def test_rum_slices(marginal: MarginalDemand, patch_set: PatchSet) -> dict[tuple, Verdict]:
    """Static RUM test of every conditioning family of a marginal."""
    if not marginal.well_defined:
        warnings.warn(f"period {marginal.period} marginal differs across the other periods' budgets; "
                      "testing each family separately", RuntimeWarning, stacklevel=2)
    return {ctx: _static_test(fam, patch_set) for ctx, fam in marginal.by_context.items()}


test_rum_static.__test__ = False
test_rum_slices.__test__ = False


def _find_cycle(n: int, edges: dict[int, list[int]]) -> list[int] | None:
    state = [0] * n
    stack: list[int] = []

    def visit(u: int) -> list[int] | None:
        state[u] = 1
        stack.append(u)
        for v in edges[u]:
            if state[v] == 1:
                return stack[stack.index(v):]
            if state[v] == 0:
                found = visit(v)
                if found:
                    return found
        stack.pop()
        state[u] = 2
        return None

    for u in range(n):
        if state[u] == 0:
            found = visit(u)
            if found:
                return found
    return None


def check_sarpd(rho: DynamicStochasticDemand, patch_sets: Sequence[PatchSet],
                budget_path: BudgetPath | None = None) -> AxiomReport:
    """No positive-probability choice path may contain a dominance cycle.

    Patches of different periods are compared with
    :func:`drum.geometry.path_dominates`, the universal form of patch
    dominance.  Cycles are listed as patch labels in dominance order.
    """
    _check_periods(rho, patch_sets)
    paths = [tuple(budget_path)] if budget_path is not None else list(rho.observed)
    for bp in paths:
        if bp not in rho.observed:
            raise ValueError(f"budget path {bp} is not observed")
    bad, checked = [], 0
    for bp in paths:
        for cp, v in rho.block(bp).items():
            if v == 0:
                continue
            checked += 1
            pats = [ps.patch(j, i) for ps, j, i in zip(patch_sets, cp.budgets, cp.patches)]
            n = len(pats)
            edges = {u: [w for w in range(n) if w != u and path_dominates(pats[u], pats[w])] for u in range(n)}
            cyc = _find_cycle(n, edges)
            if cyc:
                names = " > ".join(pats[u].label for u in cyc + cyc[:1])
                bad.append(Violation(f"dominance cycle {names} on {cp.label()}", "==", v, Fraction(0), (cp,), ()))
    notes = ["a single period admits no cycle"] if len(patch_sets) == 1 else []
    if checked == 0:
        return AxiomReport("SARPD", PASS, [], 0, notes or ["no positive-probability paths"])
    return AxiomReport("SARPD", FAIL if bad else PASS, bad, checked, notes)
