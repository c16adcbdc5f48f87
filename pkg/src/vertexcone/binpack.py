"""Exact bin packing over configurations.

* ``solve_lp``: configuration LP by column generation; the restricted master
  is solved with the exact simplex and columns are priced by an exact
  unbounded knapsack.  The final duals certify optimality.
* ``solve_ilp``: smallest bin count by iterative deepening.  Each level is a
  depth-first search that always opens the bin holding the largest
  remaining item type, with a volume bound and a memo of failed residuals.
* ``vertex_distance``: minimum non-vertex weight by a layered reachability
  scan over the box ``[0, b]``.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import InvalidInputError, NoDecompositionError, ResourceLimitError
from .group import DiagonalBasis, residue_map
from .knapsack import (DEFAULT_CONFIG_CAP, Instance, VertexSet, _scaled, _walk,
                       enumerate_configs, hull_vertices)
from .level import Weights, first_fit_decreasing
from .lp import simplex

DEFAULT_NODE_CAP = 2_000_000
DEFAULT_CELL_CAP = 50_000_000
DP_PRICING_LIMIT = 200_000


@dataclass(frozen=True)
class Packing:
    weights: Weights

    @property
    def bins(self) -> int:
        return self.weights.total()


@dataclass(frozen=True)
class FractionalPacking:
    weights: dict           # configuration -> positive Fraction
    value: Fraction
    duals: tuple = ()       # y with y . p <= 1 for every configuration p
    columns: int = 0


@dataclass(frozen=True)
class GapReport:
    ilp_opt: int
    lp_opt: Fraction
    packing: Packing | None = None
    fractional: FractionalPacking | None = None

    @property
    def gap(self) -> Fraction:
        return self.ilp_opt - self.lp_opt

    @property
    def irup(self) -> bool:
        return self.ilp_opt <= math.ceil(self.lp_opt)

    @property
    def mirup(self) -> bool:
        return self.ilp_opt <= math.ceil(self.lp_opt) + 1


def _active(instance: Instance):
    return [i for i, x in enumerate(instance.multiplicities) if x > 0]


# -- pricing ---------------------------------------------------------------

def _price_bb(values, w, cap, node_cap):
    """Exact ``max sum(v_i p_i)`` with ``sum(w_i p_i) <= cap``, integer
    ``v_i > 0``.  Depth-first in ratio order with the fractional bound."""
    order = sorted(range(len(w)), key=lambda i: (-Fraction(values[i], w[i]), i))
    v = [values[i] for i in order]
    ww = [w[i] for i in order]
    n = len(order)
    best_val = -1
    best = None
    cur = [0] * n
    nodes = 0

    def rec(k, room, val):
        nonlocal best_val, best, nodes
        nodes += 1
        if nodes > node_cap:
            raise ResourceLimitError(f"pricing exceeded {node_cap} nodes", estimate=nodes)
        if k == n:
            if val > best_val:
                best_val, best = val, cur[:]
            return
        # fractional bound: fill the rest with the current best ratio
        if val * ww[k] + room * v[k] <= best_val * ww[k]:
            return
        for x in range(room // ww[k], -1, -1):
            cur[k] = x
            rec(k + 1, room - x * ww[k], val + x * v[k])
        cur[k] = 0

    rec(0, cap, 0)
    p = [0] * n
    for k, i in enumerate(order):
        p[i] = best[k]
    return best_val, p


def _price_dp(values, w, cap):
    """Same maximization by a table over capacities ``0 .. cap``."""
    f = np.zeros(cap + 1, dtype=np.int64)
    for vi, wi in zip(values, w):
        step, gain = wi, vi
        while step <= cap:
            np.maximum(f[step:], f[:-step] + gain, out=f[step:])
            step, gain = step * 2, gain * 2
    p = [0] * len(w)
    c = cap
    while c > 0:
        if f[c] == f[c - 1]:
            c -= 1
            continue
        for i, (vi, wi) in enumerate(zip(values, w)):
            if wi <= c and f[c - wi] + vi == f[c]:
                p[i] += 1
                c -= wi
                break
        else:  # pragma: no cover - table is consistent by construction
            raise AssertionError("inconsistent pricing table")
    return int(f[cap]), p


def price(y: Sequence[Fraction], sizes: Sequence[Fraction], method: str = "auto",
          node_cap: int = DEFAULT_NODE_CAP):
    """Configuration maximizing ``y . p`` and that maximum (exact)."""
    d = len(y)
    pos = [i for i in range(d) if y[i] > 0]
    if not pos:
        return Fraction(0), (0,) * d
    w_all, C = _scaled(tuple(sizes))
    den = math.lcm(*(Fraction(y[i]).denominator for i in pos))
    vals = [int(Fraction(y[i]) * den) for i in pos]
    w = [w_all[i] for i in pos]
    if method == "auto":
        safe = max(vals) * (C // min(w) + 1) < 2 ** 62
        method = "dp" if C <= DP_PRICING_LIMIT and safe else "bb"
    if method == "dp":
        best, p = _price_dp(vals, w, C)
    elif method == "bb":
        best, p = _price_bb(vals, w, C, node_cap)
    else:
        raise InvalidInputError(f"unknown pricing method {method!r}")
    full = [0] * d
    for i, x in zip(pos, p):
        full[i] = x
    return Fraction(best, den), tuple(full)


# -- LP --------------------------------------------------------------------

def solve_lp(instance: Instance, pricing: str = "auto", max_columns: int = 100_000,
             node_cap: int = DEFAULT_NODE_CAP) -> FractionalPacking:
    """Exact optimum of the configuration LP."""
    d = instance.d
    b = instance.multiplicities
    act = _active(instance)
    if not act:
        return FractionalPacking({}, Fraction(0), (Fraction(0),) * d, 0)
    sizes = [instance.sizes[i] for i in act]
    rhs = [b[i] for i in act]
    cols = []
    for k, s in enumerate(sizes):
        c = [0] * len(act)
        c[k] = math.floor(1 / s)
        cols.append(tuple(c))
    seen = set(cols)
    while True:
        res = simplex(cols, rhs, [1] * len(cols))
        if not res.optimal:  # pragma: no cover - the singleton columns make it feasible
            raise NoDecompositionError("configuration LP infeasible")
        best, p = price(res.duals, sizes, pricing, node_cap)
        if best <= 1:
            break
        if p in seen:  # pragma: no cover - a basic column has reduced cost 0
            raise AssertionError("pricing returned an existing column")
        if len(cols) >= max_columns:
            raise ResourceLimitError(f"column generation exceeded {max_columns} columns",
                                     estimate=len(cols))
        cols.append(p)
        seen.add(p)
    weights = {}
    for c, x in zip(cols, res.x):
        if x:
            full = [0] * d
            for k, i in enumerate(act):
                full[i] = c[k]
            weights[tuple(full)] = weights.get(tuple(full), 0) + x
    y = [Fraction(0)] * d
    for k, i in enumerate(act):
        y[i] = res.duals[k]
    return FractionalPacking(dict(sorted(weights.items())), res.value, tuple(y), len(cols))


# -- ILP -------------------------------------------------------------------

class _PackingSearch:
    def __init__(self, instance: Instance, node_cap: int):
        self.w, self.C = _scaled(instance.sizes)
        self.d = instance.d
        # largest items first; ties by index
        self.order = sorted(range(self.d), key=lambda i: (-self.w[i], i))
        self.node_cap = node_cap
        self.nodes = 0
        self.failed: dict = {}

    def load(self, r):
        return sum(x * wi for x, wi in zip(r, self.w))

    def candidates(self, r, k):
        """Bins containing one item of the largest remaining type, leaving
        a residual that still fits into ``k - 1`` bins by volume."""
        i0 = next(i for i in self.order if r[i] > 0)
        upper = list(r)
        upper[i0] -= 1
        need = self.load(r) - (k - 1) * self.C - self.w[i0]
        out = []
        for p in _walk(self.w, self.C - self.w[i0], upper, need if need > 0 else None, self.d):
            self.nodes += 1
            if self.nodes > self.node_cap:
                raise ResourceLimitError(f"packing search exceeded {self.node_cap} nodes",
                                         estimate=self.nodes)
            q = list(p)
            q[i0] += 1
            out.append(tuple(q))
        out.sort(key=lambda q: (-self.load(q), tuple(-x for x in q)))
        return out

    def fits(self, r, k):
        """A packing of ``r`` into at most ``k`` bins, or None."""
        if not any(r):
            return []
        if k <= 0 or self.load(r) > k * self.C:
            return None
        if self.failed.get(r, -1) >= k:
            return None
        self.nodes += 1
        if self.nodes > self.node_cap:
            raise ResourceLimitError(f"packing search exceeded {self.node_cap} nodes",
                                     estimate=self.nodes)
        for p in self.candidates(r, k):
            rest = tuple(x - y for x, y in zip(r, p))
            sub = self.fits(rest, k - 1)
            if sub is not None:
                return [p] + sub
        self.failed[r] = max(self.failed.get(r, -1), k)
        return None


def solve_ilp(instance: Instance, node_cap: int = DEFAULT_NODE_CAP,
              lower_bound: int | None = None) -> Packing:
    """Minimum number of bins, with an optimal packing.

    Starts at the LP bound and raises the bin count until a packing is
    found; reaching first-fit decreasing's count ends the search.
    """
    b = instance.multiplicities
    if not any(b):
        return Packing(Weights())
    if lower_bound is None:
        lower_bound = math.ceil(solve_lp(instance, node_cap=node_cap).value)
    ffd = first_fit_decreasing(instance, b)
    search = _PackingSearch(instance, node_cap)
    for n in range(lower_bound, len(ffd)):
        sol = search.fits(tuple(b), n)
        if sol is not None:
            return Packing(Weights((p, 1) for p in sol))
    return Packing(Weights((p, 1) for p in ffd))


def gap_report(instance: Instance, node_cap: int = DEFAULT_NODE_CAP) -> GapReport:
    lp = solve_lp(instance, node_cap=node_cap)
    ilp = solve_ilp(instance, node_cap=node_cap, lower_bound=math.ceil(lp.value))
    return GapReport(ilp.bins, lp.value, ilp, lp)


# -- vertex distance ---------------------------------------------------------

def _shifted_or(src: np.ndarray, dst: np.ndarray, v):
    """``dst[x + v] |= src[x]`` for every ``x`` with ``x + v`` in the box."""
    shape = src.shape
    if any(vi > n - 1 for vi, n in zip(v, shape)):
        return
    s_src = tuple(slice(0, n - vi) for vi, n in zip(v, shape))
    s_dst = tuple(slice(vi, n) for vi, n in zip(v, shape))
    dst[s_dst] |= src[s_src]


def _close(A: np.ndarray, gens):
    """Close ``A`` under adding any number of each generator."""
    for v in gens:
        step = list(v)
        while all(s < n for s, n in zip(step, A.shape)):
            _shifted_or(A.copy(), A, step)
            step = [2 * s for s in step]
    return A


@dataclass(frozen=True)
class DistanceResult:
    value: int
    witness: Weights
    lifted: bool
    layers: int = 0


def _lift(instance: Instance, vertices: VertexSet, lifted: bool):
    b = tuple(instance.multiplicities)
    if lifted:
        if instance.bins is None:
            raise InvalidInputError("lifted distance needs a bin count")
        return (instance.bins,) + b
    return b


def vertex_distance(instance: Instance, vertices: VertexSet | None = None,
                    lifted: bool | None = None, config_cap: int = DEFAULT_CONFIG_CAP,
                    cell_cap: int = DEFAULT_CELL_CAP) -> DistanceResult:
    """Exact minimum non-vertex weight over all decompositions of ``b``.

    With ``lifted`` (default: when the instance carries ``bins``) every
    configuration ``p`` is lifted to ``(1, p)`` and the target becomes
    ``(bins, b)``, so the number of bins is fixed and empty bins count as
    copies of the vertex ``0``.
    """
    if lifted is None:
        lifted = instance.bins is not None
    V = vertices if vertices is not None else hull_vertices(instance)
    target = _lift(instance, V, lifted)
    shape = tuple(t + 1 for t in target)
    cells = math.prod(shape)
    if cells > cell_cap:
        raise ResourceLimitError(f"distance table needs {cells} cells (cap {cell_cap})",
                                 estimate=cells)
    b = instance.multiplicities
    configs = enumerate_configs(instance.sizes, cap=config_cap, upper=b)
    lift = (lambda p: (1,) + p) if lifted else (lambda p: p)
    vgens = [lift(v) for v in V if (lifted or any(v)) and all(x <= y for x, y in zip(v, b))]
    ngens = [lift(p) for p in configs if p not in V]

    start = np.zeros(shape, dtype=bool)
    start[(0,) * len(shape)] = True
    fresh = [start]                              # N_j before vertex closure
    own = [_close(start.copy(), vgens)]          # closure of N_j
    cum = [own[0]]                               # reachable with <= j non-vertices
    t = tuple(target)
    while not cum[-1][t]:
        N = np.zeros(shape, dtype=bool)
        for g in ngens:
            _shifted_or(cum[-1], N, g)
        C = _close(N.copy(), vgens)
        if not (C & ~cum[-1]).any():
            raise NoDecompositionError(f"{t} is not reachable with these configurations")
        fresh.append(N)
        own.append(C)
        cum.append(cum[-1] | C)
    k = len(cum) - 1

    # backtrack a witness
    w: dict = {}
    x, j = t, k
    while True:
        while j > 0 and cum[j - 1][x]:
            j -= 1
        while not fresh[j][x]:
            for v in vgens:
                y = tuple(a - c for a, c in zip(x, v))
                if min(y) >= 0 and own[j][y]:
                    w[v] = w.get(v, 0) + 1
                    x = y
                    break
            else:  # pragma: no cover
                raise AssertionError("witness backtrack failed on vertices")
        if j == 0:
            break
        for g in ngens:
            y = tuple(a - c for a, c in zip(x, g))
            if min(y) >= 0 and cum[j - 1][y]:
                w[g] = w.get(g, 0) + 1
                x = y
                break
        else:  # pragma: no cover
            raise AssertionError("witness backtrack failed on configurations")
        j -= 1
    assert not any(x)
    if lifted:
        w = {g[1:]: c for g, c in w.items()}
    return DistanceResult(k, Weights(w), lifted, len(cum))


def in_vertex_monoid(b: Sequence[int], vertices: VertexSet) -> bool:
    """Whether ``b`` is a nonnegative integer combination of the vertices."""
    b = tuple(b)
    gens = [v for v in vertices.nonzero if all(x <= y for x, y in zip(v, b))]
    memo: dict = {}

    def rec(r, start):
        if not any(r):
            return True
        key = (r, start)
        if key in memo:
            return memo[key]
        ok = False
        for j in range(start, len(gens)):
            v = gens[j]
            s = tuple(x - y for x, y in zip(r, v))
            if min(s) >= 0 and rec(s, j):
                ok = True
                break
        memo[key] = ok
        return ok

    return rec(b, 0)


# -- IRUP families -------------------------------------------------------------

def residues_distinct(gamma: Sequence[int], K1: int, K2: int, basis: DiagonalBasis) -> bool:
    if not K1 < K2:
        raise InvalidInputError(f"need K1 < K2, got {K1}, {K2}")
    r1 = residue_map([K1 * x for x in gamma], basis)
    r2 = residue_map([K2 * x for x in gamma], basis)
    return r1 != r2


@dataclass(frozen=True)
class FamilyMember:
    K: int
    multiplicities: tuple
    report: GapReport | None
    status: str = "ok"        # "ok" or "resource-limit"
    message: str = ""

    @property
    def irup_holds(self) -> bool | None:
        return None if self.report is None else self.report.irup


@dataclass(frozen=True)
class FamilyResult:
    members: list
    distinct: bool
    complete: bool
    unexpected: list = field(default_factory=list)   # K where IRUP holds


def irup_family(instance: Instance, gamma: Sequence[int], Z: int,
                node_cap: int = DEFAULT_NODE_CAP, threads: int = 1,
                vertices: VertexSet | None = None) -> FamilyResult:
    """Residue instances ``[(d+1) gamma], ..., [(d+Z) gamma]`` with exact gap
    reports.  Members whose solve hits a budget are kept with status
    ``resource-limit`` and no verdict."""
    if Z < 0:
        raise InvalidInputError(f"Z must be >= 0, got {Z}")
    if not instance.is_unit_fraction:
        raise InvalidInputError("residue families need unit-fraction sizes")
    basis = DiagonalBasis(instance.denominators)
    gamma = tuple(gamma)
    if not instance.size_of(gamma) <= 1:
        raise InvalidInputError(f"{gamma} is not a configuration")
    V = vertices if vertices is not None else hull_vertices(instance)
    if gamma in V:
        raise InvalidInputError(f"{gamma} is a vertex")
    d = instance.d
    Ks = list(range(d + 1, d + Z + 1))

    def run(K):
        b = residue_map([K * x for x in gamma], basis)
        member = instance.with_multiplicities(b, bins=None, name=f"residue-{K}")
        try:
            return FamilyMember(K, b, gap_report(member, node_cap=node_cap))
        except ResourceLimitError as e:
            return FamilyMember(K, b, None, "resource-limit", str(e))

    if threads > 1 and len(Ks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            members = list(ex.map(run, Ks))
    else:
        members = [run(K) for K in Ks]
    distinct = len({m.multiplicities for m in members}) == len(members)
    return FamilyResult(
        members=members,
        distinct=distinct,
        complete=all(m.status == "ok" for m in members),
        unexpected=[m.K for m in members if m.irup_holds])
