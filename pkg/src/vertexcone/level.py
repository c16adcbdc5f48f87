"""Levels, jumps and weight shifting toward hull vertices.

For a configuration ``gamma = sum(x_i B_i)`` written in barycentric
coordinates of a vertex simplex, ``Level(Kx) = sum({K x_i})``.  Whenever the
level is at most one, ``K gamma`` splits into whole copies of the simplex
vertices plus a single configuration ``delta``; trading ``K`` copies of
``gamma`` for that split lowers the weight held by non-vertices.
"""
from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (InsufficientWeightError, InvalidInputError,
                     NoDecompositionError, PreconditionViolatedError,
                     ResourceLimitError)
from .knapsack import (Instance, SimplexCoords, VertexSet, barycentric,
                       hull_vertices, simplex_containing)
from .lp import simplex
from .numeric import lcm


def _coords(x) -> tuple:
    if isinstance(x, SimplexCoords):
        x = x.coords
    x = tuple(Fraction(v) for v in x)
    if sum(x) != 1:
        raise InvalidInputError(f"barycentric coordinates must sum to 1, got {sum(x)}")
    if any(v < 0 or v > 1 for v in x):
        raise InvalidInputError(f"coordinates outside [0, 1]: {x}")
    return x


def _integerize(x):
    D = lcm(v.denominator for v in x)
    return [v.numerator * (D // v.denominator) for v in x], D


def level(x, K: int) -> int:
    """``sum({K x_i})``, an exact integer."""
    x = _coords(x)
    if K < 0:
        raise InvalidInputError(f"K must be >= 0, got {K}")
    nums, D = _integerize(x)
    total = sum(K * n % D for n in nums)
    assert total % D == 0
    return total // D


def jumps_at(x, K: int) -> set:
    """Coordinates whose fractional part wraps between ``K - 1`` and ``K``,
    i.e. ``floor(K x_i) > floor((K - 1) x_i)``."""
    x = _coords(x)
    if K < 1:
        raise InvalidInputError(f"K must be >= 1, got {K}")
    return {i for i, v in enumerate(x) if math.floor(K * v) > math.floor((K - 1) * v)}


def jumps_at_ceiling(x, K: int) -> set:
    """Ceiling-based jump test ``ceil(K x_i) > ceil((K - 1) x_i)``.

    Kept for diagnostics only: it misses the wrap when ``(K - 1) x_i`` is a
    positive integer, so the level recurrence fails under it.
    """
    x = _coords(x)
    return {i for i, v in enumerate(x) if math.ceil(K * v) > math.ceil((K - 1) * v)}


def recurrence_failures(x, K_max: int, rule: str = "wrap") -> list:
    """Multiplicities ``2 <= K <= K_max`` where
    ``Level(Kx) = Level((K-1)x) + 1 - J`` fails under the given jump rule."""
    x = _coords(x)
    jump = {"wrap": jumps_at, "ceiling": jumps_at_ceiling}[rule]
    nums, D = _integerize(x)
    prev = sum(n % D for n in nums) // D
    bad = []
    for K in range(2, K_max + 1):
        cur = sum(K * n % D for n in nums) // D
        if cur != prev + 1 - len(jump(x, K)):
            bad.append(K)
        prev = cur
    return bad


def verify_level_recurrence(x, K_max: int, rule: str = "wrap") -> bool:
    return not recurrence_failures(x, K_max, rule)


@dataclass(frozen=True)
class LevelProfile:
    coords: tuple
    K: int
    level: int
    jumps: tuple  # one flag per coordinate: wraps between K-1 and K


def level_profile(x, K: int) -> LevelProfile:
    x = _coords(x)
    j = jumps_at(x, K) if K >= 1 else set()
    return LevelProfile(x, K, level(x, K), tuple(i in j for i in range(len(x))))


def find_shift_multiplicity(x, cap: int | None = None) -> int:
    """Smallest ``K >= 2`` with ``Level(Kx) <= 1``.

    Such a ``K`` always exists below the common denominator of ``x`` (where
    the level is 0), which is the default scan limit.
    """
    x = _coords(x)
    nums, D = _integerize(x)
    limit = max(D, 2) if cap is None else cap
    if limit < 2:
        raise InvalidInputError(f"cap must be >= 2, got {cap}")
    for K in range(2, limit + 1):
        if sum(K * n % D for n in nums) <= D:
            return K
    raise ResourceLimitError(f"no K in [2, {limit}] with level <= 1", estimate=D)


def decompose_multiple(gamma: Sequence[int], K: int, basis, coords: SimplexCoords | None = None):
    """Split ``K gamma = delta + sum(Lambda_i B_i)``.

    ``Lambda_i = floor(K x_i)`` and ``delta = B {K x}``; ``delta`` is a
    configuration when the level is 1 and zero when it is 0.
    """
    if coords is None:
        coords = barycentric(gamma, basis)
    lev = level(coords, K)
    if lev > 1:
        raise PreconditionViolatedError(f"Level({K}x) = {lev} > 1 for {tuple(gamma)}")
    lam = tuple(math.floor(K * v) for v in coords.coords)
    d = len(gamma)
    delta = tuple(K * gamma[k] - sum(l * b[k] for l, b in zip(lam, coords.basis))
                  for k in range(d))
    assert all(v >= 0 for v in delta)
    if lev == 0:
        assert not any(delta)
    return delta, lam


class Weights(Mapping):
    """Sparse nonnegative integer weights on configurations.

    Zero weights are never stored.  Instances are treated as immutable;
    rewrites return new objects.
    """

    def __init__(self, items: Mapping | Iterable = ()):
        acc: dict = {}
        pairs = items.items() if isinstance(items, Mapping) else items
        for p, w in pairs:
            w = int(w)
            if w < 0:
                raise InvalidInputError(f"negative weight {w} on {tuple(p)}")
            if w:
                p = tuple(int(v) for v in p)
                acc[p] = acc.get(p, 0) + w
        self._w = dict(sorted(acc.items()))

    def __getitem__(self, p):
        return self._w[tuple(p)]

    def __iter__(self):
        return iter(self._w)

    def __len__(self):
        return len(self._w)

    def __repr__(self):
        return f"Weights({self._w!r})"

    def __eq__(self, other):
        if isinstance(other, Mapping):
            return self._w == dict(Weights(other)._w)
        return NotImplemented

    __hash__ = None

    def total(self) -> int:
        return sum(self._w.values())

    def target(self, d: int | None = None) -> tuple:
        if d is None:
            if not self._w:
                raise InvalidInputError("empty weights need an explicit dimension")
            d = len(next(iter(self._w)))
        out = [0] * d
        for p, w in self._w.items():
            for k in range(d):
                out[k] += w * p[k]
        return tuple(out)

    def nonvertex_mass(self, vertices: VertexSet) -> int:
        return sum(w for p, w in self._w.items() if p not in vertices)

    def vertex_support(self, vertices: VertexSet) -> list:
        return [p for p in self._w if p in vertices and any(p)]

    def nonvertex_support(self, vertices: VertexSet) -> list:
        return [p for p in self._w if p not in vertices]


def _apply_shift(w: dict, gamma, K, delta, lam, basis):
    w[gamma] -= K
    if not w[gamma]:
        del w[gamma]
    if any(delta):
        w[delta] = w.get(delta, 0) + 1
    for l, b in zip(lam, basis):
        if l and any(b):
            w[b] = w.get(b, 0) + l


def shift_weight(weights: Weights, gamma: Sequence[int], vertices: VertexSet,
                 coords: SimplexCoords | None = None) -> Weights:
    """Replace ``K`` copies of the non-vertex ``gamma`` by ``delta`` plus
    whole vertex copies, ``K`` being the smallest shift multiplicity."""
    gamma = tuple(gamma)
    if gamma in vertices:
        raise InvalidInputError(f"{gamma} is a vertex; nothing to shift")
    have = weights.get(gamma, 0)
    if coords is None:
        coords = simplex_containing(gamma, vertices)
    K = find_shift_multiplicity(coords)
    if have < K:
        raise InsufficientWeightError(
            f"weight {have} on {gamma} is below the shift multiplicity {K}", required=K)
    delta, lam = decompose_multiple(gamma, K, coords.basis, coords=coords)
    w = dict(weights)
    _apply_shift(w, gamma, K, delta, lam, coords.basis)
    return Weights(w)


def _parity_merge(w: dict, eligible, sink=None) -> int:
    """Merge pairs of eligible points with equal parity into two copies of
    their midpoint until all parity classes are singletons.

    ``sum(w_p |p|^2)`` drops with every merge, so this terminates.  Midpoints
    failing ``eligible`` go to ``sink`` (a dict) when given.  Returns the
    number of merges.
    """
    merges = 0
    while True:
        classes: dict = {}
        pair = None
        for p in sorted(w):
            if not eligible(p):
                continue
            key = tuple(v & 1 for v in p)
            if key in classes:
                pair = (classes[key], p)
                break
            classes[key] = p
        if pair is None:
            return merges
        p, q = pair
        t = min(w[p], w[q])
        m = tuple((a + b) // 2 for a, b in zip(p, q))
        for r in (p, q):
            w[r] -= t
            if not w[r]:
                del w[r]
        target = w if (sink is None or eligible(m)) else sink
        target[m] = target.get(m, 0) + 2 * t
        merges += 1


def support_reduce(weights: Weights, vertices: VertexSet) -> Weights:
    """Same target, at most ``2^d`` non-vertex configurations.

    Two non-vertex configurations with equal parity vectors have an
    integral midpoint, which is again a configuration; ``t`` copies of
    each are traded for ``2t`` copies of the midpoint.
    """
    w = dict(weights)
    _parity_merge(w, lambda p: p not in vertices)
    return Weights(w)


def first_fit_decreasing(instance: Instance, b: Sequence[int]) -> list:
    """Item-by-item first-fit decreasing; returns one configuration per bin."""
    w, cap = instance.weights, instance.capacity
    order = sorted(range(instance.d), key=lambda i: (-w[i], i))
    bins: list = []
    loads: list = []
    for i in order:
        for _ in range(b[i]):
            for k, load in enumerate(loads):
                if load + w[i] <= cap:
                    bins[k][i] += 1
                    loads[k] += w[i]
                    break
            else:
                row = [0] * instance.d
                row[i] = 1
                bins.append(row)
                loads.append(w[i])
    return [tuple(r) for r in bins]


def initial_decomposition(instance: Instance, vertices: VertexSet) -> Weights:
    """Whole vertex copies from a basic LP solution over the vertices,
    remainder packed first-fit decreasing."""
    b = instance.multiplicities
    if not any(b):
        return Weights()
    nz = list(vertices.nonzero)
    res = simplex(nz, b, [1] * len(nz))
    if not res.optimal:
        raise NoDecompositionError(f"{b} is not in the cone of the hull vertices")
    w: dict = {}
    rest = list(b)
    for v, mu in zip(nz, res.x):
        k = math.floor(mu)
        if k:
            w[v] = k
            rest = [r - k * x for r, x in zip(rest, v)]
    for p in first_fit_decreasing(instance, rest):
        w[p] = w.get(p, 0) + 1
    return Weights(w)


@dataclass
class StructureReport:
    weights: Weights
    vertex_distance_bound: int
    shift_multiplicities: dict = field(default_factory=dict)
    simplices: list = field(default_factory=list)
    vertex_support: int = 0
    nonvertex_support: int = 0
    vertex_support_bound: int = 0
    nonvertex_support_bound: int = 0
    shifts: int = 0
    merges: int = 0

    @property
    def bounds_hold(self) -> bool:
        return (self.vertex_support <= self.vertex_support_bound
                and self.nonvertex_support <= self.nonvertex_support_bound)


def structure_decompose(instance: Instance, vertices: VertexSet | None = None,
                        initial: Weights | None = None) -> StructureReport:
    """Decomposition of ``b`` with small non-vertex weights and support.

    1. Start from any decomposition, merge equal-parity points (at most
       ``2^d`` support points remain).
    2. Each remaining non-vertex point fixes a home simplex (origin plus
       ``d`` hull vertices).  Shifting and midpoints never leave it, so
       vertex weight only lands on those simplices' vertices.
    3. Inside each home simplex alternate parity merging with shifting the
       heaviest point whose weight reaches its shift multiplicity.  Every
       shift lowers the non-vertex mass, which bounds the loop.
    """
    d = instance.d
    b = instance.multiplicities
    V = vertices if vertices is not None else hull_vertices(instance)
    lam = dict(initial if initial is not None else initial_decomposition(instance, V))
    lam.pop((0,) * d, None)
    if Weights(lam).target(d) != b:
        raise NoDecompositionError("initial decomposition does not represent b")

    merges = _parity_merge(lam, lambda p: True)
    vertex_w = {p: w for p, w in lam.items() if p in V}
    bases: list = []
    groups: list = []
    for g in sorted(p for p in lam if p not in V):
        bases.append(simplex_containing(g, V).basis)
        groups.append({g: lam[g]})

    Kcache: dict = {}

    def mult(k, g):
        if (k, g) not in Kcache:
            co = barycentric(g, bases[k])
            Kcache[(k, g)] = (find_shift_multiplicity(co), co)
        return Kcache[(k, g)]

    def consolidate():
        owner: dict = {}
        for k, grp in enumerate(groups):
            for g in list(grp):
                if g in owner:
                    dest = groups[owner[g]]
                    dest[g] += grp.pop(g)
                else:
                    owner[g] = k

    shifts = 0
    while True:
        while True:
            consolidate()
            m = 0
            for grp in groups:
                m += _parity_merge(grp, lambda p: p not in V, sink=vertex_w)
            merges += m
            if not m:
                break
        best = None
        for k, grp in enumerate(groups):
            for g, wt in grp.items():
                K, co = mult(k, g)
                if wt >= K:
                    key = (-wt, g, k)
                    if best is None or key < best[0]:
                        best = (key, k, g, K, co)
        if best is None:
            break
        _, k, g, K, co = best
        delta, lam_v = decompose_multiple(g, K, co.basis, coords=co)
        grp = groups[k]
        grp[g] -= K
        if not grp[g]:
            del grp[g]
        if any(delta):
            dest = vertex_w if delta in V else grp
            dest[delta] = dest.get(delta, 0) + 1
        for l, v in zip(lam_v, co.basis):
            if l and any(v):
                vertex_w[v] = vertex_w.get(v, 0) + l
        shifts += 1

    total = dict(vertex_w)
    Ks = {}
    used = []
    for k, grp in enumerate(groups):
        if grp:
            used.append(bases[k])
        for g, wt in grp.items():
            total[g] = total.get(g, 0) + wt
            Ks[g] = mult(k, g)[0]
    result = Weights(total)
    assert result.target(d) == b
    return StructureReport(
        weights=result,
        vertex_distance_bound=result.nonvertex_mass(V),
        shift_multiplicities=Ks,
        simplices=used,
        vertex_support=len(result.vertex_support(V)),
        nonvertex_support=len(result.nonvertex_support(V)),
        vertex_support_bound=d * 2 ** d,
        nonvertex_support_bound=2 ** (2 * d),
        shifts=shifts,
        merges=merges,
    )
