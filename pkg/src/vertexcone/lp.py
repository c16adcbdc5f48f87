"""Exact two-phase tableau simplex over Fractions.

Problems here are tiny in the row dimension (one row per item type, maybe
one more for a bin-count row) so a dense tableau is the simplest thing that
works.  Bland's rule guarantees termination; exact arithmetic removes every
other numerical hazard.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import ResourceLimitError

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass
class LPResult:
    status: str
    x: list = field(default_factory=list)
    value: Fraction | None = None
    basis: list = field(default_factory=list)
    duals: list = field(default_factory=list)

    @property
    def optimal(self):
        return self.status == OPTIMAL


def _pivot(rows, cost, r, j):
    pr = rows[r]
    piv = pr[j]
    if piv != 1:
        rows[r] = pr = [v / piv for v in pr]
    for i, row in enumerate(rows):
        if i != r:
            f = row[j]
            if f:
                rows[i] = [a - f * b for a, b in zip(row, pr)]
    f = cost[j]
    if f:
        cost[:] = [a - f * b for a, b in zip(cost, pr)]


def _run(rows, cost, basis, eligible, max_pivots, counter):
    """Bland-rule iterations until optimal (True) or unbounded (False)."""
    while True:
        j = next((k for k in eligible if cost[k] < 0), None)
        if j is None:
            return True
        best, r = None, None
        for i, row in enumerate(rows):
            a = row[j]
            if a > 0:
                ratio = row[-1] / a
                if (best is None or ratio < best
                        or (ratio == best and basis[i] < basis[r])):
                    best, r = ratio, i
        if r is None:
            return False
        counter[0] += 1
        if max_pivots is not None and counter[0] > max_pivots:
            raise ResourceLimitError(f"simplex exceeded {max_pivots} pivots",
                                     estimate=counter[0])
        _pivot(rows, cost, r, j)
        basis[r] = j


def simplex(columns: Sequence[Sequence], rhs: Sequence, costs: Sequence,
            max_pivots: int | None = None) -> LPResult:
    """Minimize ``costs . x`` subject to ``sum_j x_j columns[j] = rhs``,
    ``x >= 0``.

    Returns primal values, the optimal basis (column index per row, ``-1``
    for a redundant row still held by an artificial) and row duals ``y``
    with ``costs_j - y . columns_j >= 0`` at optimality.
    """
    m, n = len(rhs), len(columns)
    sign = [1 if Fraction(v) >= 0 else -1 for v in rhs]
    rows = []
    for i in range(m):
        row = [Fraction(columns[j][i]) * sign[i] for j in range(n)]
        row += [Fraction(int(k == i)) for k in range(m)]
        row.append(Fraction(rhs[i]) * sign[i])
        rows.append(row)
    basis = [n + i for i in range(m)]
    counter = [0]

    # phase 1: minimize the sum of artificials
    cost = [-sum((row[j] for row in rows), Fraction(0)) for j in range(n)]
    cost += [Fraction(0)] * m
    cost.append(-sum((row[-1] for row in rows), Fraction(0)))
    _run(rows, cost, basis, range(n), max_pivots, counter)
    if cost[-1] != 0:
        return LPResult(INFEASIBLE)
    for r in range(m):
        if basis[r] >= n:
            j = next((k for k in range(n) if rows[r][k] != 0), None)
            if j is not None:
                _pivot(rows, cost, r, j)
                basis[r] = j

    # phase 2
    c = [Fraction(v) for v in costs] + [Fraction(0)] * m
    cost = c[:] + [Fraction(0)]
    for r, bj in enumerate(basis):
        cb = c[bj]
        if cb:
            cost = [a - cb * b for a, b in zip(cost, rows[r])]
    if not _run(rows, cost, basis, range(n), max_pivots, counter):
        return LPResult(UNBOUNDED)

    x = [Fraction(0)] * n
    for r, bj in enumerate(basis):
        if bj < n:
            x[bj] = rows[r][-1]
    duals = [-cost[n + i] * sign[i] for i in range(m)]
    value = sum((cj * xj for cj, xj in zip(c, x)), Fraction(0))
    return LPResult(OPTIMAL, x, value,
                    [bj if bj < n else -1 for bj in basis], duals)
