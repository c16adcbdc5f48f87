"""The half-open parallelepiped spanned by ``B_i = a_i e_i`` and the group
``Pi ∩ Z^d`` under addition modulo the lattice.

Group elements are residue tuples ``0 <= pi_i < a_i``.  Sizes are always
taken with the matching ``s_i = 1 / a_i``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .errors import InvalidInputError
from .numeric import frac_part, mod_inverse, pairwise_coprime


@dataclass(frozen=True)
class DiagonalBasis:
    """Denominators ``a`` of unit-fraction sizes, with ``det`` and the
    cofactors ``R_i = det / a_i``."""

    a: tuple

    def __post_init__(self):
        a = tuple(int(x) for x in self.a)
        if not a:
            raise InvalidInputError("empty basis")
        if any(x < 1 for x in a):
            raise InvalidInputError(f"denominators must be >= 1, got {a}")
        object.__setattr__(self, "a", a)

    @property
    def d(self) -> int:
        return len(self.a)

    @property
    def det(self) -> int:
        return math.prod(self.a)

    @property
    def cofactors(self) -> tuple:
        det = self.det
        return tuple(det // x for x in self.a)

    @property
    def sizes(self) -> tuple:
        return tuple(Fraction(1, x) for x in self.a)

    @property
    def coprime(self) -> bool:
        return pairwise_coprime(self.a)

    def vertex(self, i: int) -> tuple:
        v = [0] * self.d
        v[i] = self.a[i]
        return tuple(v)

    def require_coprime(self):
        if not self.coprime:
            raise InvalidInputError(f"denominators {self.a} are not pairwise coprime")

    def elements(self) -> Iterator[tuple]:
        """Every element of the group, lexicographically."""
        def rec(i, prefix):
            if i == self.d:
                yield tuple(prefix)
                return
            for x in range(self.a[i]):
                prefix.append(x)
                yield from rec(i + 1, prefix)
                prefix.pop()
        yield from rec(0, [])


def _check(p, basis):
    if len(p) != basis.d:
        raise InvalidInputError(f"dimension mismatch: {len(p)} vs {basis.d}")


def residue_map(b: Sequence[int], basis: DiagonalBasis) -> tuple:
    """``[b]``: the representative of ``b`` inside the parallelepiped."""
    _check(b, basis)
    if any(x < 0 for x in b):
        raise InvalidInputError(f"negative component in {tuple(b)}")
    return tuple(x % a for x, a in zip(b, basis.a))


def integral_part(b: Sequence[int], basis: DiagonalBasis) -> tuple:
    """Multiples ``floor(b_i / a_i)`` of each ``B_i`` with
    ``b = sum(k_i B_i) + [b]``."""
    _check(b, basis)
    return tuple(x // a for x, a in zip(b, basis.a))


def group_add(p: Sequence[int], q: Sequence[int], basis: DiagonalBasis) -> tuple:
    _check(p, basis)
    _check(q, basis)
    return tuple((x + y) % a for x, y, a in zip(p, q, basis.a))


def group_neg(p: Sequence[int], basis: DiagonalBasis) -> tuple:
    _check(p, basis)
    return tuple((-x) % a for x, a in zip(p, basis.a))


def size_of(pi: Sequence[int], sizes: Sequence) -> Fraction:
    if any(x < 0 for x in pi):
        raise InvalidInputError(f"negative component in {tuple(pi)}")
    return sum((Fraction(s) * x for s, x in zip(sizes, pi)), Fraction(0))


def fractional_index(pi: Sequence[int], basis: DiagonalBasis) -> int:
    """``k`` with ``{Size(pi)} = k / det``."""
    det = basis.det
    return sum(r * x for r, x in zip(basis.cofactors, pi)) % det


def element_of_fractional_size(basis: DiagonalBasis, k: int) -> tuple:
    """The unique element whose size has fractional part ``k / det``.

    ``Size(pi) = sum(R_i pi_i) / det``, so the condition splits by CRT into
    ``R_i pi_i == k (mod a_i)`` for each coordinate.
    """
    basis.require_coprime()
    if not 0 <= k < basis.det:
        raise InvalidInputError(f"k={k} outside [0, {basis.det})")
    return tuple(k * mod_inverse(r, a).value % a
                 for r, a in zip(basis.cofactors, basis.a))


def full_generator(basis: DiagonalBasis) -> tuple:
    """Element with fractional size ``(det - 1) / det``:
    ``g_i = -R_i^{-1} mod a_i``."""
    basis.require_coprime()
    if any(a < 2 for a in basis.a):
        raise InvalidInputError(f"full generator needs all a_i >= 2, got {basis.a}")
    return tuple((-mod_inverse(r, a).value) % a
                 for r, a in zip(basis.cofactors, basis.a))


def generator_orbit(basis: DiagonalBasis, K: int) -> tuple:
    """``[K g]`` for the full generator ``g``."""
    if K < 0:
        raise InvalidInputError(f"K must be >= 0, got {K}")
    g = full_generator(basis)
    return tuple(K * x % a for x, a in zip(g, basis.a))


def fractional_size(pi: Sequence[int], basis: DiagonalBasis) -> Fraction:
    return frac_part(size_of(pi, basis.sizes))


def group_order_of(p: Sequence[int], basis: DiagonalBasis) -> int:
    """Order of ``p`` in the group (lcm of the per-coordinate orders)."""
    _check(p, basis)
    order = 1
    for x, a in zip(p, basis.a):
        o = a // math.gcd(x, a)
        order = order * o // math.gcd(order, o)
    return order
