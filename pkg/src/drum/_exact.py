"""Exact rational helpers shared by the geometry and the test oracles."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

Point = tuple[Fraction, ...]


def as_fraction(value) -> Fraction:
    """Convert ``value`` to a Fraction without ever going through a float.

    Accepts Fractions, ints and strings such as ``"3/4"`` or ``"2"``.
    Floats are refused: their binary expansion is rarely what was meant.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        raise TypeError(f"refusing float {value!r}; pass a 'num/den' string")
    raise TypeError(f"cannot read {value!r} as an exact rational")


def as_point(values: Iterable) -> Point:
    return tuple(as_fraction(v) for v in values)


def fmt(value: Fraction) -> str:
    """Serialize as ``num/den``, always with an explicit denominator."""
    value = as_fraction(value)
    return f"{value.numerator}/{value.denominator}"


def dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def sign(value: Fraction) -> int:
    return (value > 0) - (value < 0)


def centroid(points: Sequence[Point]) -> Point:
    n = len(points)
    return tuple(sum(coords, Fraction(0)) / n for coords in zip(*points))


def row_reduce(rows: Sequence[Sequence[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form by exact Gauss-Jordan elimination.

    Returns the reduced matrix and the list of pivot columns.
    """
    m = [list(map(Fraction, r)) for r in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        piv = m[r][c]
        m[r] = [v / piv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows: Sequence[Sequence[Fraction]]) -> int:
    return len(row_reduce(rows)[1])


def solve(matrix: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> list[Fraction] | None:
    """Unique exact solution of ``matrix @ x = rhs``, or None.

    None covers both the inconsistent and the underdetermined case.
    Overdetermined consistent systems are fine.
    """
    if not matrix:
        return None
    n = len(matrix[0])
    aug = [list(row) + [b] for row, b in zip(matrix, rhs)]
    red, pivots = row_reduce(aug)
    if n in pivots or len(pivots) < n:
        return None
    x = [Fraction(0)] * n
    for row, c in zip(red, pivots):
        x[c] = row[n]
    return x
