"""Budget planes, their patch partition, and patch revealed dominance.

A budget ``B = {y >= 0 : p.y = w}`` with strictly positive prices is a
compact simplex.  The other budgets of the same period cut it into cells;
each cell is stored as its sign vector against those planes (above, on or
below) together with the vertices of its closure.  Everything is exact.

Patch indices follow a fixed geometric rule so that they line up with the
usual figures: full-dimensional patches come first, intersection patches
last, and within each group patches are sorted by decreasing coordinates,
starting from the last good.  For ``K = 2`` this numbers patches from the
axis of the last good downwards.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Hashable, Iterable, Mapping, Sequence

from drum._exact import Point, as_fraction, as_point, centroid, dot, sign, solve

ABOVE, ON, BELOW = 1, 0, -1
SIDE_NAMES = {ABOVE: "above", ON: "on", BELOW: "below"}


class GeometryError(ValueError):
    """Invalid budgets, or a geometric query that makes no sense."""


@dataclass(frozen=True)
class Budget:
    """One linear budget plane ``{y in R^K_+ : prices . y = expenditure}``."""

    period: int
    index: int
    prices: tuple[Fraction, ...]
    expenditure: Fraction

    def __post_init__(self):
        prices = as_point(self.prices)
        w = as_fraction(self.expenditure)
        if len(prices) < 2:
            raise GeometryError(f"budget {self.key}: need at least two goods")
        if any(p <= 0 for p in prices):
            raise GeometryError(f"budget {self.key}: prices must be strictly positive")
        if w <= 0:
            raise GeometryError(f"budget {self.key}: expenditure must be strictly positive")
        object.__setattr__(self, "prices", prices)
        object.__setattr__(self, "expenditure", w)

    @property
    def key(self) -> tuple[int, int]:
        return (self.period, self.index)

    @property
    def n_goods(self) -> int:
        return len(self.prices)

    def cost(self, y: Sequence[Fraction]) -> Fraction:
        return dot(self.prices, y)

    def side(self, y: Sequence[Fraction]) -> int:
        """+1 if ``y`` costs more than the expenditure, 0 on the plane, -1 below."""
        return sign(self.cost(y) - self.expenditure)

    def contains(self, y: Sequence[Fraction]) -> bool:
        return all(v >= 0 for v in y) and self.cost(y) == self.expenditure

    def same_plane(self, other: Budget) -> bool:
        if self.n_goods != other.n_goods:
            return False
        w, w2 = self.expenditure, other.expenditure
        return all(p * w2 == q * w for p, q in zip(self.prices, other.prices))

    def intercepts(self) -> list[Point]:
        K = self.n_goods
        return [
            tuple(self.expenditure / self.prices[k] if i == k else Fraction(0) for i in range(K))
            for k in range(K)
        ]


@dataclass(frozen=True, eq=False)
class Patch:
    """A cell of a budget plane.

    ``cuts`` lists, for every other budget of the arrangement, its key, the
    budget itself and the side of that plane the whole cell lies on.
    """

    budget: Budget
    owner: Hashable
    index: int
    cuts: tuple[tuple[Hashable, Budget, int], ...]
    vertices: tuple[Point, ...]
    representative: Point
    same_as: tuple[tuple[Hashable, int], ...] = ()
    pooled: bool = False

    @property
    def period(self) -> int:
        return self.budget.period

    @property
    def ref(self) -> tuple[Hashable, int]:
        return (self.owner, self.index)

    @property
    def signs(self) -> tuple[int, ...]:
        return tuple(s for _, _, s in self.cuts)

    @property
    def sign_vector(self) -> dict[Hashable, int]:
        return {k: s for k, _, s in self.cuts}

    @property
    def is_intersection(self) -> bool:
        return any(s == ON for _, _, s in self.cuts)

    @property
    def label(self) -> str:
        sym = "xi" if self.pooled else "x"
        return f"{sym}^{self.period}_{{{self.index}|{self.budget.index}}}"

    def side_of(self, key: Hashable) -> int:
        for k, _, s in self.cuts:
            if k == key:
                return s
        raise KeyError(key)

    def contains(self, y: Sequence[Fraction]) -> bool:
        if not self.budget.contains(y):
            return False
        return all(b.side(y) == s for _, b, s in self.cuts)

    def __repr__(self) -> str:
        return f"Patch({self.label})"


@dataclass(frozen=True, eq=False)
class PatchSet:
    """All patches of one arrangement, grouped by owner budget.

    For a single period the owners are budget indices ``j``; for a pooled
    arrangement they are ``(period, index)`` pairs.
    """

    budgets: Mapping[Hashable, Budget]
    patches: Mapping[Hashable, tuple[Patch, ...]]
    period: int | None = None
    continuous_demand: bool = False

    @property
    def owners(self) -> tuple[Hashable, ...]:
        return tuple(sorted(self.budgets))

    def patch(self, owner: Hashable, index: int) -> Patch:
        try:
            return self.patches[owner][index - 1]
        except (KeyError, IndexError):
            raise KeyError(f"no patch {index} on budget {owner!r}") from None

    def choice_patches(self, owner: Hashable) -> tuple[Patch, ...]:
        """Patches that can carry positive probability on ``owner``."""
        ps = self.patches[owner]
        if self.continuous_demand:
            return tuple(p for p in ps if not p.is_intersection)
        return ps

    def all_patches(self) -> list[Patch]:
        return [p for k in self.owners for p in self.patches[k]]

    @cached_property
    def dominance(self) -> frozenset[tuple[tuple[Hashable, int], tuple[Hashable, int]]]:
        """Every ordered pair ``(a.ref, b.ref)`` with ``a`` revealed dominant to ``b``."""
        pats = self.all_patches()
        return frozenset((a.ref, b.ref) for a in pats for b in pats if dominates(a, b))


def _closed_ok(side: int, target: int) -> bool:
    return side == 0 if target == ON else side * target >= 0


def _cells(owner: Budget, others: Sequence[Budget]) -> list[tuple[tuple[int, ...], list[Point], Point]]:
    """Nonempty sign-vector cells of ``owner`` cut by ``others``.

    The closure of every cell is a polytope whose vertices are among the
    arrangement vertices: points of the owner plane where K-1 independent
    planes (coordinate or budget) meet.  The average of all arrangement
    vertices inside a closed cell lies in its relative interior, so it
    decides nonemptiness of the open cell and doubles as representative.
    """
    K = owner.n_goods
    planes = [(tuple(Fraction(int(i == k)) for i in range(K)), Fraction(0)) for k in range(K)]
    planes += [(b.prices, b.expenditure) for b in others]
    verts: set[Point] = set()
    for combo in combinations(planes, K - 1):
        x = solve([owner.prices, *(c[0] for c in combo)], [owner.expenditure, *(c[1] for c in combo)])
        if x is not None and all(v >= 0 for v in x):
            verts.add(tuple(x))
    sides = {v: tuple(b.side(v) for b in others) for v in verts}

    cells = []

    def grow(partial: tuple[int, ...], pts: list[Point]) -> None:
        if not pts:
            return
        c = centroid(pts)
        m = len(partial)
        if any(others[i].side(c) != partial[i] for i in range(m)):
            return
        if m == len(others):
            cells.append((partial, pts, c))
            return
        for s in (ABOVE, ON, BELOW):
            grow(partial + (s,), [v for v in pts if _closed_ok(sides[v][m], s)])

    grow((), sorted(verts))
    return cells


def _order_key(cell) -> tuple:
    signs, _, rep = cell
    return (ON in signs, tuple(-v for v in reversed(rep)))


def _arrange(budgets: Mapping[Hashable, Budget], *, period: int | None, continuous_demand: bool,
             pooled: bool = False) -> PatchSet:
    keys = sorted(budgets)
    raw = {}
    for k in keys:
        others = [o for o in keys if o != k]
        cells = sorted(_cells(budgets[k], [budgets[o] for o in others]), key=_order_key)
        raw[k] = (others, cells)

    by_rep: dict[Point, list[tuple[Hashable, int]]] = {}
    for k in keys:
        for i, (_, _, rep) in enumerate(raw[k][1], start=1):
            by_rep.setdefault(rep, []).append((k, i))

    patches = {}
    for k in keys:
        others, cells = raw[k]
        out = []
        for i, (signs, verts, rep) in enumerate(cells, start=1):
            cuts = tuple((o, budgets[o], s) for o, s in zip(others, signs))
            twins = tuple(r for r in by_rep[rep] if r[0] != k)
            out.append(Patch(budgets[k], k, i, cuts, tuple(verts), rep, twins, pooled))
        patches[k] = tuple(out)
    return PatchSet(dict(budgets), patches, period, continuous_demand)


def check_distinct(budgets: Iterable[Budget]) -> None:
    """Reject two budgets that describe the same plane."""
    bs = list(budgets)
    for a, b in combinations(bs, 2):
        if a.same_plane(b):
            raise GeometryError(f"budgets {a.key} and {b.key} are the same plane")


def build_patches(budgets: Iterable[Budget], *, continuous_demand: bool = False) -> PatchSet:
    """Patch partition of one period's budgets."""
    bs = list(budgets)
    if not bs:
        raise GeometryError("no budgets given")
    periods = {b.period for b in bs}
    if len(periods) != 1:
        raise GeometryError(f"budgets span several periods: {sorted(periods)}")
    if len({b.n_goods for b in bs}) != 1:
        raise GeometryError("budgets disagree on the number of goods")
    idx = [b.index for b in bs]
    if len(set(idx)) != len(idx):
        raise GeometryError(f"duplicate budget index in period {bs[0].period}")
    check_distinct(bs)
    return _arrange({b.index: b for b in bs}, period=bs[0].period, continuous_demand=continuous_demand)


def classify_point(y: Iterable, patch_set: PatchSet, owner: Hashable | None = None) -> Patch | None:
    """Patch containing ``y``, or None when ``y`` is on no budget plane.

    On an intersection the patch owned by the smallest budget key is
    returned unless ``owner`` picks one.
    """
    y = as_point(y)
    if any(v < 0 for v in y):
        raise GeometryError("points must be nonnegative")
    for k in patch_set.owners:
        if owner is not None and k != owner:
            continue
        b = patch_set.budgets[k]
        if len(y) != b.n_goods:
            raise GeometryError(f"point has {len(y)} coordinates, budgets have {b.n_goods}")
        if b.cost(y) != b.expenditure:
            continue
        for p in patch_set.patches[k]:
            if all(ob.side(y) == s for _, ob, s in p.cuts):
                return p
    return None


def representative(patch: Patch) -> Point:
    return patch.representative


def _same_arrangement(a: Patch, b: Patch) -> bool:
    if a.budget is b.budget:
        return True
    return any(ob is b.budget for _, ob, _ in a.cuts)


def dominates(a: Patch, b: Patch) -> bool:
    """Patch revealed dominance within one arrangement.

    Some point of ``a`` lies strictly above ``b``'s plane and some point of
    ``b`` strictly below ``a``'s plane.  Sides are constant on a cell, so
    this is a lookup in the two sign vectors.
    """
    if not _same_arrangement(a, b):
        raise GeometryError(f"{a.label} and {b.label} belong to different arrangements")
    if a.owner == b.owner:
        return False
    return a.side_of(b.owner) == ABOVE and b.side_of(a.owner) == BELOW


def lies_strictly(patch: Patch, plane: Budget, side: int) -> bool:
    """True iff every point of the cell is strictly on ``side`` of ``plane``.

    Works for planes outside the patch's own arrangement.  The extreme of a
    linear function over the closed cell sits on a face; if it touches the
    plane we check whether that face meets the open cell.
    """
    vals = [side * (plane.cost(v) - plane.expenditure) for v in patch.vertices]
    low = min(vals)
    if low != 0:
        return low > 0
    face = [v for v, val in zip(patch.vertices, vals) if val == 0]
    return not patch.contains(centroid(face))


def path_dominates(a: Patch, b: Patch) -> bool:
    """Dominance usable across periods.

    Every point of ``b`` is strictly cheaper than ``a``'s budget and every
    point of ``a`` is strictly unaffordable at ``b``'s budget.  Within one
    arrangement this coincides with :func:`dominates`.
    """
    if a.budget.same_plane(b.budget):
        return False
    return lies_strictly(b, a.budget, BELOW) and lies_strictly(a, b.budget, ABOVE)
