"""Knapsack instances, their lattice points (configurations) and the
vertices of the integer hull.

A configuration is a plain ``tuple[int, ...]``.  Size comparisons are done
on integer loads: every size is scaled by the lcm of the denominators so
``s . p <= 1`` becomes ``w . p <= capacity``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import hull as _hull
from .errors import (InvalidInputError, NotInSimplexError, ResourceLimitError,
                     SingularBasisError)
from .lp import simplex
from .numeric import lcm

Config = tuple

DEFAULT_CONFIG_CAP = 20_000_000


@dataclass(frozen=True)
class Instance:
    """Item sizes in (0, 1] plus the multiplicity vector ``b``.

    ``bins`` is an optional bin-count row.  When set, the instance is the
    lifted point ``(bins, b)`` of the cone over ``{1} x P``: exactly
    ``bins`` configurations (empty ones allowed) must sum to ``b``.
    """

    sizes: tuple
    multiplicities: tuple = None
    name: str | None = None
    bins: int | None = None

    def __post_init__(self):
        sizes = tuple(Fraction(s) for s in self.sizes)
        if not sizes:
            raise InvalidInputError("an instance needs at least one item size")
        for s in sizes:
            if not 0 < s <= 1:
                raise InvalidInputError(f"item size {s} outside (0, 1]")
        mult = self.multiplicities
        mult = (0,) * len(sizes) if mult is None else tuple(mult)
        if len(mult) != len(sizes):
            raise InvalidInputError(
                f"{len(sizes)} sizes but {len(mult)} multiplicities")
        for b in mult:
            if isinstance(b, bool) or int(b) != b or b < 0:
                raise InvalidInputError(f"multiplicity {b!r} is not a nonnegative integer")
        if self.bins is not None and (int(self.bins) != self.bins or self.bins < 0):
            raise InvalidInputError(f"bin count {self.bins!r} is not a nonnegative integer")
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "multiplicities", tuple(int(b) for b in mult))

    @property
    def d(self) -> int:
        return len(self.sizes)

    @property
    def capacity(self) -> int:
        return lcm(s.denominator for s in self.sizes)

    @property
    def weights(self) -> tuple:
        cap = self.capacity
        return tuple(int(s * cap) for s in self.sizes)

    @property
    def is_unit_fraction(self) -> bool:
        return all(s.numerator == 1 for s in self.sizes)

    @property
    def denominators(self) -> tuple:
        return tuple(s.denominator for s in self.sizes)

    def size_of(self, p: Sequence[int]) -> Fraction:
        return sum((s * x for s, x in zip(self.sizes, p)), Fraction(0))

    def with_multiplicities(self, b, bins=None, name=None) -> "Instance":
        return Instance(self.sizes, tuple(b), name=name, bins=bins)

    @classmethod
    def unit_fraction(cls, denominators, multiplicities=None, **kw) -> "Instance":
        return cls(tuple(Fraction(1, a) for a in denominators), multiplicities, **kw)


def _as_sizes(obj) -> tuple:
    if isinstance(obj, Instance):
        return obj.sizes
    return Instance(tuple(obj)).sizes


def _scaled(sizes):
    cap = lcm(s.denominator for s in sizes)
    return [int(s * cap) for s in sizes], cap


def is_config(sizes, p: Sequence[int]) -> bool:
    sizes = _as_sizes(sizes)
    if len(p) != len(sizes):
        raise InvalidInputError(f"dimension mismatch: {len(p)} vs {len(sizes)}")
    if any(x < 0 for x in p):
        raise InvalidInputError(f"negative component in {tuple(p)}")
    return sum((s * x for s, x in zip(sizes, p)), Fraction(0)) <= 1


def _walk(w, cap, upper, min_load, d) -> Iterator[tuple]:
    """Yield configurations in lexicographic order (prefix DFS, last
    coordinate as a range)."""
    last = d - 1
    prefix = [0] * d
    # largest extra load the coordinates after i could add, ignoring capacity
    tail = [math.inf] * (d + 1)
    if upper is not None:
        tail[d] = 0
        for k in range(d - 1, -1, -1):
            tail[k] = tail[k + 1] + upper[k] * w[k]

    def rec(i, load):
        hi = (cap - load) // w[i]
        if upper is not None:
            hi = min(hi, upper[i])
        if i == last:
            lo = 0
            if min_load is not None and min_load > load:
                lo = -(-(min_load - load) // w[i])
            for x in range(lo, hi + 1):
                prefix[i] = x
                yield tuple(prefix)
            prefix[i] = 0
            return
        for x in range(hi + 1):
            nl = load + x * w[i]
            if min_load is not None and min(cap, nl + tail[i + 1]) < min_load:
                continue
            prefix[i] = x
            yield from rec(i + 1, nl)
        prefix[i] = 0

    yield from rec(0, 0)


def count_configs(sizes, cap: int | None = None, upper=None) -> int:
    """Exact number of configurations (optionally below ``upper``).

    Raises :class:`ResourceLimitError` as soon as the running count passes
    ``cap``.
    """
    sizes = _as_sizes(sizes)
    w, C = _scaled(sizes)
    d = len(w)
    total = 0

    def rec(i, load):
        nonlocal total
        room = C - load
        hi = room // w[i]
        if upper is not None:
            hi = min(hi, upper[i])
        if i == d - 1:
            total += hi + 1
            if cap is not None and total > cap:
                raise ResourceLimitError(
                    f"more than {cap} configurations", estimate=volume_estimate(sizes))
            return
        for x in range(hi + 1):
            rec(i + 1, load + x * w[i])

    rec(0, 0)
    return total


def volume_estimate(sizes) -> int:
    """Volume of the knapsack simplex, a rough configuration count."""
    sizes = _as_sizes(sizes)
    d = len(sizes)
    vol = Fraction(1, math.factorial(d))
    for s in sizes:
        vol /= s
    return math.ceil(vol)


def enumerate_configs(sizes, cap: int = DEFAULT_CONFIG_CAP, upper=None,
                      min_size=None) -> list[Config]:
    """All integer ``p >= 0`` with ``s . p <= 1`` in lexicographic order.

    ``upper`` restricts to ``p <= upper``; ``min_size`` keeps only
    configurations whose size is at least that value.  The count is
    checked against ``cap`` before anything is materialized.
    """
    sizes = _as_sizes(sizes)
    if cap is not None:
        count_configs(sizes, cap=cap, upper=upper)
    w, C = _scaled(sizes)
    min_load = None
    if min_size is not None:
        min_load = math.ceil(Fraction(min_size) * C)
        if min_load <= 0:
            min_load = None
    return list(_walk(w, C, upper, min_load, len(w)))


def config_array(configs: Iterable[Config], d: int) -> np.ndarray:
    arr = np.array(list(configs), dtype=np.int64)
    return arr.reshape(-1, d)


@dataclass(frozen=True)
class VertexSet:
    """Vertices of conv(P ∩ Z^d), origin included, lexicographically sorted."""

    vertices: tuple
    d: int
    method: str = "incremental"
    _index: frozenset = field(default=frozenset(), repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(sorted(tuple(v) for v in self.vertices)))
        object.__setattr__(self, "_index", frozenset(self.vertices))

    def __contains__(self, p) -> bool:
        return tuple(p) in self._index

    def __len__(self) -> int:
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)

    @property
    def nonzero(self) -> tuple:
        return tuple(v for v in self.vertices if any(v))


def _axis_vertices(sizes) -> list[Config]:
    d = len(sizes)
    out = [(0,) * d]
    for i, s in enumerate(sizes):
        v = [0] * d
        v[i] = math.floor(1 / s)
        out.append(tuple(v))
    return out


def _dot_max(pts: np.ndarray, normal) -> tuple[int, np.ndarray]:
    big = max(abs(x) for x in normal) * (int(pts.max()) if pts.size else 0) * len(normal)
    if big < 2 ** 62:
        vals = pts @ np.array(normal, dtype=np.int64)
    else:
        vals = pts.astype(object) @ np.array(normal, dtype=object)
    mx = vals.max()
    return int(mx), np.nonzero(vals == mx)[0]


def hull_vertices(instance, method: str = "incremental",
                  cap: int = DEFAULT_CONFIG_CAP, configs=None) -> VertexSet:
    """Vertex set of the integer hull of the knapsack polytope.

    ``incremental`` grows a vertex set facet by facet: for every facet
    ``n.x <= c`` of the current hull the lattice points are maximized
    along ``n`` (exhaustive oracle); a point beyond the facet is added.
    Among tied maximizers the lexicographically largest is taken, which is
    always a vertex of the integer hull.  ``direct`` tests every lattice
    point for membership in the hull of the others with an exact LP.
    Unit-fraction sizes short-circuit to ``{0} ∪ {a_i e_i}``.
    """
    sizes = _as_sizes(instance)
    d = len(sizes)
    if method == "unit" or (method == "incremental" and configs is None
                            and all(s.numerator == 1 for s in sizes)):
        return VertexSet(_axis_vertices(sizes), d, method="unit-fraction")
    if configs is None:
        configs = enumerate_configs(sizes, cap=cap)
    if method == "direct":
        return VertexSet(_direct_vertices(configs, d), d, method="direct")
    if method != "incremental":
        raise InvalidInputError(f"unknown hull method {method!r}")
    if d == 1:
        return VertexSet(_axis_vertices(sizes), d, method="incremental")

    pts = config_array(configs, d)
    current = set(_axis_vertices(sizes))
    confirmed = set()
    while True:
        new = set()
        for normal, c in _hull.facets(sorted(current)):
            if (normal, c) in confirmed:
                continue
            mx, idx = _dot_max(pts, normal)
            if mx > c:
                new.add(max(tuple(int(v) for v in pts[i]) for i in idx))
            else:
                confirmed.add((normal, c))
        if not new:
            break
        current |= new
    return VertexSet(current, d, method="incremental")


def _direct_vertices(configs, d) -> list[Config]:
    present = set(map(tuple, configs))

    def midpoint_of_neighbours(p):
        for j in range(d):
            if p[j] == 0:
                continue
            lo = p[:j] + (p[j] - 1,) + p[j + 1:]
            hi = p[:j] + (p[j] + 1,) + p[j + 1:]
            if lo in present and hi in present:
                return True
        return False

    cands = sorted(p for p in present if not midpoint_of_neighbours(p))
    out = []
    for p in cands:
        others = [q for q in cands if q != p]
        cols = [tuple(q) + (1,) for q in others]
        res = simplex(cols, tuple(p) + (1,), [0] * len(cols))
        if not res.optimal:
            out.append(p)
    return out


@dataclass(frozen=True)
class SimplexCoords:
    """Barycentric coordinates of a point with respect to ``d + 1``
    affinely independent configurations (``basis[0]`` is the origin when
    the simplex comes from :func:`simplex_containing`)."""

    coords: tuple
    basis: tuple

    def point(self) -> tuple:
        d = len(self.basis[0])
        return tuple(sum(c * b[k] for c, b in zip(self.coords, self.basis)) for k in range(d))


def _solve(matrix, rhs):
    """Exact Gaussian elimination for a square system; None if singular."""
    n = len(rhs)
    a = [[Fraction(v) for v in row] + [Fraction(r)] for row, r in zip(matrix, rhs)]
    for col in range(n):
        piv = next((i for i in range(col, n) if a[i][col] != 0), None)
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        pv = a[col][col]
        a[col] = [v / pv for v in a[col]]
        for i in range(n):
            if i != col and a[i][col] != 0:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
    return [row[-1] for row in a]


def barycentric(gamma: Sequence[int], basis: Sequence[Sequence[int]]) -> SimplexCoords:
    basis = tuple(tuple(b) for b in basis)
    d = len(gamma)
    if len(basis) != d + 1 or any(len(b) != d for b in basis):
        raise InvalidInputError(f"need {d + 1} basis points of dimension {d}")
    b0 = basis[0]
    matrix = [[basis[j + 1][i] - b0[i] for j in range(d)] for i in range(d)]
    y = _solve(matrix, [g - o for g, o in zip(gamma, b0)])
    if y is None:
        raise SingularBasisError(f"basis {basis} is affinely dependent")
    coords = (1 - sum(y, Fraction(0)),) + tuple(y)
    if any(c < 0 for c in coords):
        raise NotInSimplexError(f"{tuple(gamma)} lies outside the simplex {basis}")
    return SimplexCoords(coords, basis)


def simplex_containing(gamma: Sequence[int], vertices: VertexSet) -> SimplexCoords:
    """A simplex of hull vertices with the origin as ``B_0`` containing
    ``gamma``, and its barycentric coordinates.

    Minimizing ``sum(mu)`` over ``sum(mu_v v) = gamma`` picks a basic
    solution on the boundary facet hit by the ray through ``gamma``; its
    ``d`` basic vertices together with the origin span the simplex.
    """
    gamma = tuple(gamma)
    d = len(gamma)
    nz = vertices.nonzero
    axis = all(sum(1 for x in v if x) == 1 for v in nz) and len(nz) == d
    if axis:
        order = sorted(nz, key=lambda v: [i for i, x in enumerate(v) if x][0])
        return barycentric(gamma, ((0,) * d,) + tuple(order))
    res = simplex(list(nz), gamma, [1] * len(nz))
    if not res.optimal or res.value > 1:
        raise NotInSimplexError(f"{gamma} is not in the integer hull")
    chosen = sorted(j for j in res.basis if j >= 0)
    if len(chosen) < d:
        raise SingularBasisError(f"vertex set does not span R^{d}")
    return barycentric(gamma, ((0,) * d,) + tuple(nz[j] for j in chosen))
