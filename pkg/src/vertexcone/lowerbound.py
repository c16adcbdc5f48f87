"""Unit-fraction instances whose full generator sits just below the
reciprocals of the Sylvester numbers.

With ``x_i = g_i / a_i`` in ``[(1 - eps) / S_i, 1 / S_i)`` for ``i < d`` the
first ``d - 1`` coordinates nearly fill a bin, so every multiple ``[K g]``
with ``2 <= K <= S_d - 2`` overflows.  Then ``K`` copies of ``(1, g)`` are
the only way to write ``(K, K g)`` with ``K`` bins, which makes its vertex
distance ``K``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import InvalidInputError, NoCertificateError, ResourceLimitError
from .group import DiagonalBasis, full_generator, generator_orbit, size_of
from .knapsack import Instance
from .numeric import crt_solve, mod_inverse, pairwise_coprime, sylvester, Residue


def default_epsilon(d: int) -> Fraction:
    """``1 / ((S_d - 1)^2 + 1)``, just inside the admissible range."""
    return Fraction(1, (sylvester(d) - 1) ** 2 + 1)


def _check_epsilon(d: int, eps: Fraction):
    bound = Fraction(1, (sylvester(d) - 1) ** 2)
    if not 0 < eps < bound:
        raise InvalidInputError(f"epsilon must lie in (0, {bound}), got {eps}")


def in_window(m: int, a: int, S: int, eps: Fraction) -> bool:
    """``(1 - eps) / S <= m / a < 1 / S``."""
    x = Fraction(m, a)
    return (1 - eps) / S <= x < Fraction(1, S)


@dataclass(frozen=True)
class SylvesterInstance:
    d: int
    epsilon: Fraction
    a: tuple
    m: tuple
    g: tuple
    window_last: bool = True

    @property
    def det(self) -> int:
        return math.prod(self.a)

    @property
    def basis(self) -> DiagonalBasis:
        return DiagonalBasis(self.a)

    @property
    def sizes(self) -> tuple:
        return tuple(Fraction(1, x) for x in self.a)

    def instance(self, K: int = 1, lifted: bool = True) -> Instance:
        """The target ``K g``; with ``lifted`` the bin count ``K`` is fixed."""
        return Instance(self.sizes, tuple(K * x for x in self.g),
                        name=f"sylvester-d{self.d}-K{K}", bins=K if lifted else None)


def _least_admissible(start: int, residue: Residue, S: int, eps: Fraction,
                      need_window: bool, need_gcd: bool, max_steps: int):
    M = residue.modulus
    c = residue.value + ((start - residue.value) // M) * M
    while c <= start:
        c += M
    for _ in range(max_steps):
        m = c // S
        ok = c % S != 0
        if ok and need_window:
            ok = in_window(m, c, S, eps)
        if ok and need_gcd:
            ok = math.gcd(m, c) == 1
        if ok:
            return c, m
        c += M
    raise ResourceLimitError(
        f"no admissible denominator within {max_steps} candidates of the class "
        f"{residue.value} mod {M}", estimate=max_steps)


def construct_sylvester_instance(d: int, epsilon=None, enforce_last_window: bool = True,
                                 max_steps: int = 1_000_000) -> SylvesterInstance:
    """Smallest-admissible denominators satisfying the two congruence
    families

    * ``a_{i+1} == (a_1 ... a_{i-1})^{-1} (-m_i)^{-1}  (mod a_i)``
    * ``a_{i+1} == 1  (mod a_j)`` for ``j < i``

    with each ``a_i`` the least candidate above ``S_i / eps`` that is not a
    multiple of ``S_i``, whose window ``m_i = floor(a_i / S_i)`` satisfies the
    window inequalities and (for ``i < d``) ``gcd(m_i, a_i) = 1``.
    """
    if d < 2:
        raise InvalidInputError(f"d must be >= 2, got {d}")
    eps = default_epsilon(d) if epsilon is None else Fraction(epsilon)
    _check_epsilon(d, eps)
    a: list = []
    m: list = []
    for i in range(d):
        S = sylvester(i + 1)
        start = math.floor(S / eps)
        need_window = i < d - 1 or enforce_last_window
        need_gcd = i < d - 1
        if i == 0:
            cls = Residue(0, 1)
        else:
            prefix = math.prod(a[:i - 1])
            r = (mod_inverse(prefix, a[i - 1]).value
                 * mod_inverse(-m[i - 1], a[i - 1]).value) % a[i - 1]
            cls = crt_solve([Residue(r, a[i - 1])] + [Residue(1 % aj, aj) for aj in a[:i - 1]])
        c, mi = _least_admissible(start, cls, S, eps, need_window, need_gcd, max_steps)
        a.append(c)
        m.append(mi)
    g = full_generator(DiagonalBasis(a))
    return SylvesterInstance(d, eps, tuple(a), tuple(m), g, enforce_last_window)


def verify_construction(inst: SylvesterInstance) -> dict:
    """Every premise of the construction, each checked directly."""
    d, a, m, eps = inst.d, inst.a, inst.m, inst.epsilon
    S = [sylvester(i + 1) for i in range(d)]
    out = {}
    out["epsilon_bound"] = 0 < eps < Fraction(1, (S[-1] - 1) ** 2)
    out["pairwise_coprime"] = pairwise_coprime(a)
    out["not_multiple"] = all(a[i] % S[i] for i in range(d))
    last = d if inst.window_last else d - 1
    out["windows"] = all(in_window(m[i], a[i], S[i], eps) for i in range(last))
    out["window_gcd"] = all(math.gcd(m[i], a[i]) == 1 for i in range(d - 1))
    inv_ok = cong1 = cong2 = True
    for i in range(1, d):
        prefix = math.prod(a[:i - 1])
        if math.gcd(prefix, a[i - 1]) != 1 or math.gcd(m[i - 1], a[i - 1]) != 1:
            inv_ok = False
            continue
        want = (pow(prefix, -1, a[i - 1]) * pow(-m[i - 1], -1, a[i - 1])) % a[i - 1]
        cong1 &= a[i] % a[i - 1] == want
        cong2 &= all(a[i] % a[j] == 1 % a[j] for j in range(i - 1))
    out["inverses_exist"] = inv_ok
    out["congruence_inverse"] = cong1
    out["congruence_one"] = cong2
    out["generator_matches_windows"] = all(inst.g[i] == m[i] for i in range(d - 1))
    out["generator_size"] = size_of(inst.g, inst.sizes) == Fraction(inst.det - 1, inst.det)
    out["long_run"] = check_long_run(inst.g, a, eps)
    return out


def check_long_run(g: Sequence[int], a: Sequence[int], epsilon, slack: bool = False) -> bool:
    """Window inequalities ``(1 - eps) / S_i <= g_i / a_i < 1 / S_i`` for
    ``i = 1 .. d-1``.

    With ``slack`` also require the slack coordinate
    ``x_0 = 1 - sum(x_i)`` and the last coordinate ``x_d`` to stay below
    ``1 / (S_d - 2)``, so neither wraps for ``K <= S_d - 2``.
    """
    if len(g) != len(a):
        raise InvalidInputError("dimension mismatch")
    d = len(a)
    eps = Fraction(epsilon)
    ok = all(in_window(g[i], a[i], sylvester(i + 1), eps) for i in range(d - 1))
    if ok and slack:
        x = [Fraction(gi, ai) for gi, ai in zip(g, a)]
        x0 = 1 - sum(x)
        bound = sylvester(d) - 2
        ok = x0 >= 0 and (bound <= 0 or (x0 < Fraction(1, bound) and x[-1] < Fraction(1, bound)))
    return ok


def _basis_of(inst) -> DiagonalBasis:
    if isinstance(inst, SylvesterInstance):
        return inst.basis
    if isinstance(inst, DiagonalBasis):
        return inst
    return DiagonalBasis(tuple(inst))


def check_uniqueness(inst, K_max: int | None = None):
    """``([K g] is not a configuration for K = 2 .. K_max, witness)``.

    The witness lists ``(K, [K g], Size([K g]))`` for every checked ``K``.
    Default ``K_max`` is ``S_d - 2``.
    """
    basis = _basis_of(inst)
    if K_max is None:
        K_max = sylvester(basis.d) - 2
    witness = []
    ok = True
    for K in range(2, K_max + 1):
        e = generator_orbit(basis, K)
        s = size_of(e, basis.sizes)
        witness.append((K, e, s))
        if s <= 1:
            ok = False
    return ok, witness


@dataclass(frozen=True)
class DistCertificate:
    a: tuple
    g: tuple
    K: int
    target: tuple          # lifted (K, K g)
    dist: int
    free_space: Fraction   # K / det
    premises: dict = field(default_factory=dict)
    orbit: tuple = ()


def dist_certificate(inst: SylvesterInstance, K: int | None = None) -> DistCertificate:
    """Certificate that the lifted target ``(K, K g)`` has vertex distance
    ``K``: every premise is recomputed and any failure refuses the
    certificate."""
    d = inst.d
    if d < 3:
        raise NoCertificateError(f"certificates need d >= 3, got d={d}")
    if K is None:
        K = sylvester(d) - 2
    if K < 1:
        raise InvalidInputError(f"K must be >= 1, got {K}")
    basis = inst.basis
    premises = {}
    premises["coprime"] = basis.coprime
    premises["generator"] = tuple(inst.g) == full_generator(basis)
    premises["configuration"] = size_of(inst.g, basis.sizes) <= 1
    premises["long_run"] = check_long_run(inst.g, inst.a, inst.epsilon)
    premises["within_range"] = K <= max(1, sylvester(d) - 2)
    uniq, orbit = check_uniqueness(inst, K)
    premises["uniqueness"] = uniq
    failed = [k for k, v in premises.items() if not v]
    if failed:
        raise NoCertificateError(f"unverified premises: {', '.join(failed)}")
    return DistCertificate(
        a=inst.a, g=inst.g, K=K,
        target=(K,) + tuple(K * x for x in inst.g),
        dist=K, free_space=Fraction(K, basis.det),
        premises=premises, orbit=tuple(orbit))


def jump_schedule(inst: SylvesterInstance, K_max: int | None = None) -> dict:
    """Multiplicities ``2 <= K <= K_max`` at which each barycentric
    coordinate ``(x_0, x_1, ..., x_d)`` of ``g`` wraps."""
    if K_max is None:
        K_max = sylvester(inst.d) - 2
    x = [Fraction(gi, ai) for gi, ai in zip(inst.g, inst.a)]
    x = [1 - sum(x)] + x
    return {i: [K for K in range(2, K_max + 1)
                if math.floor(K * v) > math.floor((K - 1) * v)]
            for i, v in enumerate(x)}


def expected_jump_schedule(d: int, K_max: int | None = None) -> dict:
    """Coordinate ``i < d`` wraps at ``1 + S_i, 1 + 2 S_i, ...``; the slack
    coordinate and coordinate ``d`` never do."""
    if K_max is None:
        K_max = sylvester(d) - 2
    out = {0: [], d: []}
    for i in range(1, d):
        S = sylvester(i)
        out[i] = [K for K in range(2, K_max + 1) if (K - 1) % S == 0]
    return dict(sorted(out.items()))


def _window_candidates(S: int, eps: Fraction, hi: int):
    """Denominators ``a <= hi`` admitting some ``m`` in the window."""
    out = []
    for a in range(2, hi + 1):
        m = -(-a // S) - 1  # largest m with m / a < 1 / S
        if m >= 0 and Fraction(m, a) >= (1 - eps) / S:
            out.append(a)
    return out


def search_min_instance(d: int, epsilon=None, det_bound: int = 10 ** 6):
    """Pairwise-coprime ``a`` (all ``a_i >= 2``) of least determinant
    ``<= det_bound`` whose full generator is a configuration satisfying the
    windows for ``i < d``.  Ties go to the lexicographically smaller tuple.
    Returns ``None`` when nothing qualifies.
    """
    if d < 2:
        raise InvalidInputError(f"d must be >= 2, got {d}")
    eps = default_epsilon(d) if epsilon is None else Fraction(epsilon)
    if eps <= 0:
        raise InvalidInputError("epsilon must be positive")
    cands = [_window_candidates(sylvester(i + 1), eps, det_bound // 2 ** (d - 1))
             for i in range(d - 1)]
    best = None

    def rec(prefix, prod_):
        nonlocal best
        i = len(prefix)
        if i == d - 1:
            last_hi = det_bound // prod_
            for ad in range(2, last_hi + 1):
                det = prod_ * ad
                if best is not None and det > best[0]:
                    break
                if any(math.gcd(ad, x) != 1 for x in prefix):
                    continue
                a = tuple(prefix) + (ad,)
                basis = DiagonalBasis(a)
                g = full_generator(basis)
                if size_of(g, basis.sizes) < 1 and check_long_run(g, a, eps):
                    key = (det, a)
                    if best is None or key < best:
                        best = key
                    break
            return
        rest_min = 2 ** (d - 1 - i)
        for x in cands[i]:
            if prod_ * x * rest_min > det_bound:
                break
            if best is not None and prod_ * x * rest_min > best[0]:
                break
            if all(math.gcd(x, y) == 1 for y in prefix):
                prefix.append(x)
                rec(prefix, prod_ * x)
                prefix.pop()

    rec([], 1)
    if best is None:
        return None
    a = best[1]
    g = full_generator(DiagonalBasis(a))
    m = tuple(a[i] // sylvester(i + 1) for i in range(d))
    return SylvesterInstance(d, eps, a, m, g, window_last=False)
