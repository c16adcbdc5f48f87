"""Exact facet enumeration for small full-dimensional point sets.

Facets are found by brute force over affinely independent d-subsets: each
subset spans a hyperplane with an integer normal (generalized cross
product), and the hyperplane is kept when every point lies on one side.
Cost is C(n, d) hyperplanes, which is fine for the vertex sets of knapsack
hulls (tens of points, d <= 4).
"""
from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations
from typing import Sequence

Facet = tuple  # (normal: tuple[int, ...], offset: int); points satisfy n.x <= offset


def det(m: Sequence[Sequence[int]]) -> int:
    """Integer determinant by fraction-free (Bareiss) elimination."""
    n = len(m)
    if n == 0:
        return 1
    a = [list(r) for r in m]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def normal_vector(vectors: Sequence[Sequence[int]]) -> tuple[int, ...]:
    """Integer vector orthogonal to d-1 vectors in Z^d (zero if dependent)."""
    d = len(vectors) + 1
    out = []
    for i in range(d):
        minor = [[v[j] for j in range(d) if j != i] for v in vectors]
        out.append((-1) ** i * det(minor))
    return tuple(out)


def _primitive(n, c):
    g = math.gcd(*n, c) if any(n) else 0
    if g > 1:
        n = tuple(x // g for x in n)
        c //= g
    return n, c


def facets(points: Sequence[tuple[int, ...]]) -> list[Facet]:
    """Facets of conv(points) as primitive ``(normal, offset)`` pairs.

    The point set must be full-dimensional.  Output is sorted.
    """
    pts = [tuple(p) for p in points]
    d = len(pts[0])
    if d == 1:
        xs = [p[0] for p in pts]
        return sorted([((1,), max(xs)), ((-1,), -min(xs))])
    found = set()
    for subset in combinations(range(len(pts)), d):
        base = pts[subset[0]]
        diffs = [[q - b for q, b in zip(pts[k], base)] for k in subset[1:]]
        n = normal_vector(diffs)
        if not any(n):
            continue
        c = sum(a * b for a, b in zip(n, base))
        above = below = False
        for p in pts:
            v = sum(a * b for a, b in zip(n, p))
            if v > c:
                above = True
            elif v < c:
                below = True
            if above and below:
                break
        if above and below:
            continue
        if above:
            n, c = tuple(-x for x in n), -c
        found.add(_primitive(n, c))
    return sorted(found)


def affine_rank(points: Sequence[tuple[int, ...]]) -> int:
    if not points:
        return -1
    base = points[0]
    rows = [[Fraction(q - b) for q, b in zip(p, base)] for p in points[1:]]
    return _rank(rows)


def _rank(rows):
    rows = [r[:] for r in rows]
    rank, col = 0, 0
    ncols = len(rows[0]) if rows else 0
    while rank < len(rows) and col < ncols:
        piv = next((i for i in range(rank, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            col += 1
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(rank + 1, len(rows)):
            f = rows[i][col] / rows[rank][col]
            if f:
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
        col += 1
    return rank

