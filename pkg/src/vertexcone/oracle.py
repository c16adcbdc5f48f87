"""Slow reference computations used by ``--oracle`` and ``verify``.

Each one shares as little as possible with the fast path it checks.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .knapsack import Instance, enumerate_configs
from .lp import simplex


def min_bins(instance: Instance) -> int:
    """Minimum bin count by memoized recursion over residual vectors."""
    b = instance.multiplicities
    configs = [p for p in enumerate_configs(instance.sizes, upper=b) if any(p)]

    @lru_cache(maxsize=None)
    def f(r):
        if not any(r):
            return 0
        # some bin holds the first remaining item
        i0 = next(i for i, x in enumerate(r) if x)
        best = None
        for p in configs:
            if p[i0] and all(x <= y for x, y in zip(p, r)):
                v = f(tuple(y - x for x, y in zip(p, r)))
                if best is None or v < best:
                    best = v
        return best + 1

    return f(tuple(b))


def lp_all_columns(instance: Instance) -> Fraction:
    """Configuration LP with every maximal configuration as a column and
    free surplus columns (a maximal bin may overfill ``b``)."""
    b = instance.multiplicities
    act = [i for i, x in enumerate(b) if x]
    if not act:
        return Fraction(0)
    sub = Instance(tuple(instance.sizes[i] for i in act))
    configs = enumerate_configs(sub.sizes)
    w, cap = sub.weights, sub.capacity
    maximal = [p for p in configs
               if all(sum(x * y for x, y in zip(p, w)) + wi > cap for wi in w)]
    res = simplex(maximal + [tuple(-int(k == i) for k in range(len(act)))
                             for i in range(len(act))],
                  [b[i] for i in act],
                  [1] * len(maximal) + [0] * len(act))
    return res.value


def vertex_distance_enum(instance: Instance, vertices) -> int:
    """Vertex distance by recursion over the residual, counting
    non-vertex bins."""
    b = instance.multiplicities
    configs = [p for p in enumerate_configs(instance.sizes, upper=b) if any(p)]

    @lru_cache(maxsize=None)
    def f(r):
        if not any(r):
            return 0
        i0 = next(i for i, x in enumerate(r) if x)
        best = None
        for p in configs:
            if p[i0] and all(x <= y for x, y in zip(p, r)):
                sub = f(tuple(y - x for x, y in zip(p, r)))
                if sub is None:
                    continue
                v = sub + (0 if p in vertices else 1)
                if best is None or v < best:
                    best = v
        return best

    return f(tuple(b))
