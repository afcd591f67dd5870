"""Ground-truth generators: exact mixtures, Cobb-Douglas panels, random
arrangements, adversarial demands, and a brute-force feasibility oracle."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations, product
from typing import Mapping, Sequence

import numpy as np

from drum._exact import Point, as_fraction, as_point, row_reduce, solve
from drum.feasibility import DynamicStochasticDemand
from drum.geometry import Budget, Patch, PatchSet, build_patches, classify_point, path_dominates
from drum.rationality import BudgetPath, ChoicePath, ProfileMatrix, choice_paths


class SimulationError(ValueError):
    """A generator specification that cannot be simulated as asked."""


# ---------------------------------------------------------------- panels

@dataclass(frozen=True)
class PanelRow:
    agent: str
    period: int
    budget: int
    point: Point
    weight: Fraction | None = None

    def __post_init__(self):
        object.__setattr__(self, "point", as_point(self.point))
        if self.weight is not None:
            w = as_fraction(self.weight)
            if w <= 0:
                raise SimulationError(f"row weight must be positive, got {w}")
            object.__setattr__(self, "weight", w)

    @property
    def mass(self) -> Fraction:
        return Fraction(1) if self.weight is None else self.weight


@dataclass(frozen=True)
class Panel:
    """Point-level choices, one row per (agent, period)."""

    rows: tuple[PanelRow, ...]
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        seen = set()
        for r in self.rows:
            if (r.agent, r.period) in seen:
                raise SimulationError(f"agent {r.agent} has two rows in period {r.period}")
            seen.add((r.agent, r.period))

    def check_on_budgets(self, patch_sets: Sequence[PatchSet]) -> None:
        by_period = {ps.period: ps for ps in patch_sets}
        for r in self.rows:
            b = by_period[r.period].budgets.get(r.budget)
            if b is None or not b.contains(r.point):
                raise SimulationError(f"agent {r.agent}, period {r.period}: point is off budget {r.budget}")


# ------------------------------------------------------------- utilities

def cobb_douglas_demand(alpha: Sequence[Fraction], budget: Budget) -> Point:
    """Maximizer of ``sum alpha_k log y_k`` on the budget: ``y_k = alpha_k w / p_k``."""
    return tuple(a * budget.expenditure / p for a, p in zip(alpha, budget.prices))


def alpha_for(point: Sequence[Fraction], budget: Budget) -> tuple[Fraction, ...]:
    """Cobb-Douglas weights whose demand on ``budget`` is ``point`` (expenditure shares)."""
    y = as_point(point)
    if not budget.contains(y) or any(v <= 0 for v in y):
        raise SimulationError("target must be a strictly positive point on the budget")
    return tuple(p * v / budget.expenditure for p, v in zip(budget.prices, y))


def _check_alpha(alpha: tuple[Fraction, ...]) -> None:
    if any(a <= 0 for a in alpha):
        raise SimulationError(f"Cobb-Douglas weights must be strictly positive, got {alpha}")
    if sum(alpha) != 1:
        raise SimulationError(f"Cobb-Douglas weights must sum to 1, got {sum(alpha)}")


@dataclass(frozen=True)
class AgentType:
    weight: Fraction
    alphas: tuple[tuple[Fraction, ...], ...]


@dataclass(frozen=True)
class UtilityProcessSpec:
    """A finite mixture of agent types, each with one Cobb-Douglas utility per period."""

    types: tuple[AgentType, ...]
    mode: str = "custom"

    def __post_init__(self):
        types = tuple(
            AgentType(as_fraction(t.weight), tuple(as_point(a) for a in t.alphas)) for t in self.types
        )
        if not types:
            raise SimulationError("no agent types")
        if any(t.weight < 0 for t in types) or sum(t.weight for t in types) != 1:
            raise SimulationError("type weights must be nonnegative and sum to 1")
        if len({len(t.alphas) for t in types}) != 1:
            raise SimulationError("all types need the same number of periods")
        for t in types:
            for a in t.alphas:
                _check_alpha(a)
        object.__setattr__(self, "types", types)

    @property
    def n_periods(self) -> int:
        return len(self.types[0].alphas)

    @classmethod
    def constant(cls, weights: Sequence, alphas: Sequence[Sequence], n_periods: int) -> UtilityProcessSpec:
        """Each type keeps the same utility in every period."""
        return cls(tuple(AgentType(w, (tuple(a),) * n_periods) for w, a in zip(weights, alphas)), "constant")

    @classmethod
    def independent(cls, per_period: Sequence[Sequence[tuple]]) -> UtilityProcessSpec:
        """Utilities drawn independently across periods from per-period mixtures ``[(weight, alpha), ...]``."""
        types = []
        for combo in product(*per_period):
            w = Fraction(1)
            for wt, _ in combo:
                w *= as_fraction(wt)
            types.append(AgentType(w, tuple(tuple(a) for _, a in combo)))
        return cls(tuple(types), "independent")

    @classmethod
    def custom(cls, types: Sequence[tuple]) -> UtilityProcessSpec:
        """Arbitrary ``[(weight, [alpha_period1, alpha_period2, ...]), ...]``."""
        return cls(tuple(AgentType(w, tuple(tuple(a) for a in alphas)) for w, alphas in types), "custom")


def simulate_panel(spec: UtilityProcessSpec, patch_sets: Sequence[PatchSet], paths: Sequence[BudgetPath]
                   ) -> tuple[Panel, DynamicStochasticDemand]:
    """Every agent type faces every budget path; ``rho`` is the exact type mixture.

    Agents are named ``type<n>/path<m>`` and their rows carry the type weight.
    """
    if spec.n_periods != len(patch_sets):
        raise SimulationError(f"spec has {spec.n_periods} periods, data has {len(patch_sets)}")
    paths = [tuple(bp) for bp in paths]
    rows, notes = [], []
    mass: dict[ChoicePath, Fraction] = {}
    for n, typ in enumerate(spec.types):
        if typ.weight == 0:
            continue
        for m, bp in enumerate(paths):
            agent = f"type{n}/path{m}"
            picks = []
            for ps, j, alpha in zip(patch_sets, bp, typ.alphas):
                y = cobb_douglas_demand(alpha, ps.budgets[j])
                p = classify_point(y, ps, owner=j)
                if p.is_intersection:
                    msg = f"type {n} demand {tuple(map(str, y))} in period {ps.period} lies on intersection patch {p.label}"
                    if ps.continuous_demand:
                        raise SimulationError(msg + "; continuous demand forbids this, perturb alpha")
                    notes.append(msg)
                picks.append(p.index)
                rows.append(PanelRow(agent, ps.period, j, y, typ.weight))
            cp = ChoicePath(bp, tuple(picks))
            mass[cp] = mass.get(cp, Fraction(0)) + typ.weight
    return Panel(tuple(rows), tuple(dict.fromkeys(notes))), DynamicStochasticDemand(mass, observed=paths)


def random_alpha(rng: np.random.Generator, K: int, top: int = 9) -> tuple[Fraction, ...]:
    v = [int(x) for x in rng.integers(1, top + 1, size=K)]
    return tuple(Fraction(x, sum(v)) for x in v)


def random_spec(rng: np.random.Generator, K: int, T: int, mode: str = "constant", max_types: int = 3
                ) -> UtilityProcessSpec:
    n = int(rng.integers(1, max_types + 1))
    weights = random_simplex(rng, n, zeros=False)
    if mode == "constant":
        return UtilityProcessSpec.constant(weights, [random_alpha(rng, K) for _ in range(n)], T)
    if mode == "independent":
        return UtilityProcessSpec.independent(
            [[(w, random_alpha(rng, K)) for w in random_simplex(rng, int(rng.integers(1, 3)), zeros=False)]
             for _ in range(T)]
        )
    return UtilityProcessSpec.custom([(w, [random_alpha(rng, K) for _ in range(T)]) for w in weights])


# -------------------------------------------------------------- mixtures

def _weights(nu, n_columns: int) -> dict[int, Fraction]:
    if isinstance(nu, Mapping):
        items = {int(c): as_fraction(v) for c, v in nu.items()}
    else:
        vals = [as_fraction(v) for v in nu]
        if len(vals) != n_columns:
            raise SimulationError(f"nu has {len(vals)} entries, matrix has {n_columns} columns")
        items = dict(enumerate(vals))
    if any(not 0 <= c < n_columns for c in items):
        raise SimulationError("nu refers to a column outside the matrix")
    if any(v < 0 for v in items.values()):
        raise SimulationError("nu has a negative weight")
    if sum(items.values()) != 1:
        raise SimulationError(f"nu sums to {sum(items.values())}, not 1")
    return {c: v for c, v in items.items() if v != 0}


def simulate_mixture(A: ProfileMatrix, nu) -> DynamicStochasticDemand:
    """``rho = A nu`` computed from the profiles themselves, without the dense matrix.

    ``nu`` is a full weight vector or a sparse ``{column: weight}`` mapping.
    """
    mass: dict[ChoicePath, Fraction] = {}
    paths = A.budget_paths
    for c, w in _weights(nu, A.n_columns).items():
        prof = A.profile(c)
        for bp in paths:
            cp = ChoicePath(bp, tuple(th.picks(j) for th, j in zip(prof, bp)))
            mass[cp] = mass.get(cp, Fraction(0)) + w
    return DynamicStochasticDemand(mass, observed=paths)


def random_simplex(rng: np.random.Generator, n: int, *, top: int = 12, zeros: bool = True) -> list[Fraction]:
    """A random exact point of the probability simplex; ``zeros`` allows empty coordinates."""
    while True:
        v = [int(x) for x in rng.integers(0 if zeros else 1, top + 1, size=n)]
        if sum(v):
            return [Fraction(x, sum(v)) for x in v]


def random_sparse_nu(rng: np.random.Generator, n_columns: int, support: int = 4) -> dict[int, Fraction]:
    k = min(n_columns, int(rng.integers(1, support + 1)))
    cols = sorted({int(c) for c in rng.choice(n_columns, size=k, replace=False)})
    return dict(zip(cols, random_simplex(rng, len(cols), zeros=False)))


def random_block_demand(rng: np.random.Generator, patch_sets: Sequence[PatchSet], paths: Sequence[BudgetPath]
                        ) -> DynamicStochasticDemand:
    """Independent random distributions per budget path; generally not DRUM."""
    mass = {}
    for bp in paths:
        cps = choice_paths(patch_sets, bp)
        for cp, v in zip(cps, random_simplex(rng, len(cps))):
            if v:
                mass[cp] = v
    return DynamicStochasticDemand(mass, observed=[tuple(bp) for bp in paths])


def signed_mixture(rng: np.random.Generator, A: ProfileMatrix, *, low: int = -3, high: int = 8,
                   tries: int = 200) -> DynamicStochasticDemand | None:
    """``A nu`` for an integer-based ``nu`` with negative entries allowed, kept only if nonnegative.

    Every such demand satisfies stability, since each column does; whether
    it is DRUM depends on the sign pattern, which makes these the hard cases.
    """
    M = A.dense().astype(np.int64)
    for _ in range(tries):
        v = rng.integers(low, high + 1, size=A.n_columns)
        s = int(v.sum())
        if s <= 0:
            continue
        b = M @ v
        if (b < 0).any():
            continue
        mass = {r: Fraction(int(x), s) for r, x in zip(A.rows, b) if x}
        return DynamicStochasticDemand(mass, observed=A.budget_paths)
    return None


# ---------------------------------------------------------- arrangements

def random_budgets(rng: np.random.Generator, K: int, T: int, J: int | Sequence[int], *,
                   price_top: int = 6, wealth: tuple[int, int] = (4, 24)) -> list[list[Budget]]:
    """Integer-priced random budgets, ``J`` per period, distinct planes within a period."""
    counts = [J] * T if isinstance(J, int) else list(J)
    out = []
    for t in range(1, T + 1):
        bs: list[Budget] = []
        while len(bs) < counts[t - 1]:
            b = Budget(t, len(bs) + 1, tuple(int(x) for x in rng.integers(1, price_top + 1, size=K)),
                       int(rng.integers(wealth[0], wealth[1] + 1)))
            if not any(b.same_plane(o) for o in bs):
                bs.append(b)
        out.append(bs)
    return out


def random_instance(rng: np.random.Generator, *, max_K: int = 3, max_T: int = 3, max_J: int = 3,
                    continuous_demand: bool | None = None) -> tuple[list[PatchSet], list[BudgetPath]]:
    """Random patch sets and a random nonempty set of observed budget paths."""
    K = int(rng.integers(2, max_K + 1))
    T = int(rng.integers(1, max_T + 1))
    J = [int(rng.integers(1, max_J + 1)) for _ in range(T)]
    if continuous_demand is None:
        continuous_demand = bool(rng.integers(0, 2))
    budgets = random_budgets(rng, K, T, J)
    patch_sets = [build_patches(bs, continuous_demand=continuous_demand) for bs in budgets]
    every = list(product(*(range(1, j + 1) for j in J)))
    keep = [bp for bp in every if rng.random() < 0.7] or [every[int(rng.integers(len(every)))]]
    return patch_sets, keep


# --------------------------------------------------------- SARPD cycles

def find_dominance_cycle(patch_sets: Sequence[PatchSet], budget_path: BudgetPath) -> tuple[Patch, ...] | None:
    """A choice path along ``budget_path`` whose patches form a dominance cycle, if any."""
    options = [ps.choice_patches(j) for ps, j in zip(patch_sets, budget_path)]
    for combo in product(*options):
        n = len(combo)
        for order in _cyclic_orders(n):
            if all(path_dominates(combo[order[k]], combo[order[(k + 1) % len(order)]]) for k in range(len(order))):
                return tuple(combo[k] for k in order)
    return None


def _cyclic_orders(n: int):
    for size in range(2, n + 1):
        for sub in combinations(range(n), size):
            first, rest = sub[0], sub[1:]
            for perm in permutations(rest):
                yield (first,) + perm


@dataclass
class PlantedCycle:
    patch_sets: list[PatchSet]
    spec: UtilityProcessSpec
    paths: list[BudgetPath]
    cyclic_path: BudgetPath
    cycle: tuple[Patch, ...]


def plant_sarpd_cycle(rng: np.random.Generator, *, tries: int = 500, planted_weight: Fraction | None = None
                      ) -> PlantedCycle:
    """Three periods sharing three pairwise-crossing budgets, with a type whose
    period-by-period utilities pick a cyclic triple of patches.

    Two-period cycles cannot occur: a patch strictly above another's plane
    cannot also lie strictly below it.  With two goods a three-cycle would
    need a linear function to change sign twice along a segment, so three
    goods and three periods are the minimum.  The remaining mass goes to a
    constant-utility type.
    """
    for _ in range(tries):
        lines = random_budgets(rng, 3, 1, 3, price_top=9, wealth=(10, 40))[0]
        pss = [build_patches([Budget(t, b.index, b.prices, b.expenditure) for b in lines], continuous_demand=True)
               for t in (1, 2, 3)]
        bp = (1, 2, 3)
        cycle = find_dominance_cycle(pss, bp)
        if cycle is None or len(cycle) != 3:
            continue
        by_period = sorted(cycle, key=lambda p: p.period)
        alphas = [alpha_for(p.representative, p.budget) for p in by_period]
        w = planted_weight if planted_weight is not None else Fraction(int(rng.integers(1, 10)), 10)
        steady = random_alpha(rng, 3)
        types = [(w, alphas)]
        if w != 1:
            types.append((1 - w, [steady] * 3))
        spec = UtilityProcessSpec.custom(types)
        paths = [bp, (1, 1, 1), (3, 2, 1)]
        try:
            simulate_panel(spec, pss, paths)
        except SimulationError:
            continue
        return PlantedCycle(pss, spec, paths, bp, cycle)
    raise SimulationError("no cyclic budget triple found; raise tries")


# ---------------------------------------------------------- brute force

def brute_force_verdict(A: ProfileMatrix, rho: DynamicStochasticDemand, cap: int = 12) -> str:
    """Feasibility of ``A nu = rho, nu >= 0`` by enumerating basic solutions.

    If the system is feasible it has a basic feasible solution: one
    supported on ``rank(A)`` linearly independent columns.  Every such
    column subset is solved exactly and checked for nonnegativity.
    """
    if A.n_columns > cap:
        raise SimulationError(f"{A.n_columns} columns exceed the brute-force cap of {cap}")
    M = A.dense()
    b = rho.vector(A.rows)
    rows = [[Fraction(int(x)) for x in M[i]] for i in range(A.n_rows)]
    # keep a maximal set of independent rows; the rest are implied when consistent
    _, piv_rows = row_reduce([list(col) for col in zip(*rows)])
    r = len(piv_rows)
    sub = [rows[i] for i in piv_rows]
    rhs = [b[i] for i in piv_rows]
    for cols in combinations(range(A.n_columns), r):
        mat = [[row[c] for c in cols] for row in sub]
        x = solve(mat, rhs)
        if x is None or any(v < 0 for v in x):
            continue
        nu = [Fraction(0)] * A.n_columns
        for c, v in zip(cols, x):
            nu[c] = v
        if all(sum((rows[i][c] * nu[c] for c in cols), Fraction(0)) == b[i] for i in range(A.n_rows)):
            return "feasible"
    return "infeasible"
