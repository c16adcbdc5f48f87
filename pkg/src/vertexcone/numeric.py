"""Exact arithmetic and elementary number theory.

Rationals are :class:`fractions.Fraction` (always canonical, arbitrary
precision); everything else here works on plain Python ints.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from itertools import combinations
from typing import Iterable, Sequence

from .errors import InvalidInputError, NotInvertibleError

Rational = Fraction

__all__ = [
    "Rational",
    "Residue",
    "ext_gcd",
    "mod_inverse",
    "crt_solve",
    "sylvester",
    "sylvester_prefix",
    "parse_rational",
    "format_rational",
    "frac_part",
    "lcm",
    "pairwise_coprime",
]


@dataclass(frozen=True)
class Residue:
    """Congruence class ``value mod modulus`` with ``0 <= value < modulus``."""

    value: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 1:
            raise InvalidInputError(f"modulus must be >= 1, got {self.modulus}")
        if not 0 <= self.value < self.modulus:
            raise InvalidInputError(
                f"residue {self.value} outside [0, {self.modulus})")

    @classmethod
    def of(cls, value: int, modulus: int) -> "Residue":
        return cls(value % modulus, modulus)

    def __str__(self):
        return f"{self.value} mod {self.modulus}"


def _euclid(a: int, b: int) -> tuple[int, int, int]:
    r0, r1 = a, b
    s0, s1 = 1, 0
    t0, t1 = 0, 1
    while r1 != 0:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    return r0, s0, t0


def ext_gcd(values: Sequence[int]) -> tuple[int, list[int]]:
    """Return ``(g, coeffs)`` with ``g = gcd(values) > 0`` and
    ``sum(c * v) == g``.

    The coefficients come from folding the iterative extended Euclid chain
    left to right; they satisfy the Bezout identity and nothing more.
    """
    values = [int(v) for v in values]
    if not values:
        raise InvalidInputError("ext_gcd needs at least one value")
    if all(v == 0 for v in values):
        raise InvalidInputError("ext_gcd of all-zero values is undefined")
    g, coeffs = values[0], [1]
    for v in values[1:]:
        g, s, t = _euclid(g, v)
        coeffs = [c * s for c in coeffs] + [t]
    if g < 0:
        g, coeffs = -g, [-c for c in coeffs]
    return g, coeffs


def mod_inverse(x: int, a: int) -> Residue:
    """Inverse of ``x`` modulo ``a``; negative ``x`` is normalized first."""
    if a < 1:
        raise InvalidInputError(f"modulus must be >= 1, got {a}")
    x %= a
    if a == 1:
        return Residue(0, 1)
    g, (s, _) = ext_gcd([x, a])
    if g != 1:
        raise NotInvertibleError(f"{x} is not invertible mod {a} (gcd {g})")
    return Residue.of(s, a)


def pairwise_coprime(moduli: Iterable[int]) -> bool:
    return all(math.gcd(p, q) == 1 for p, q in combinations(list(moduli), 2))


def crt_solve(residues: Sequence[Residue]) -> Residue:
    """Combine congruences with pairwise coprime moduli into one residue
    modulo the product of the moduli."""
    if not residues:
        raise InvalidInputError("crt_solve needs at least one congruence")
    moduli = [r.modulus for r in residues]
    if not pairwise_coprime(moduli):
        raise InvalidInputError(f"moduli {moduli} are not pairwise coprime")
    x, m = 0, 1
    for r in residues:
        # x + m*t == r.value (mod r.modulus)
        t = (r.value - x) * mod_inverse(m, r.modulus).value % r.modulus
        x += m * t
        m *= r.modulus
    return Residue.of(x, m)


def sylvester_prefix(n: int) -> list[int]:
    """First ``n`` Sylvester numbers ``[S_1, ..., S_n]``."""
    if n < 0:
        raise InvalidInputError(f"n must be >= 0, got {n}")
    seq, prod = [], 1
    for _ in range(n):
        s = prod + 1
        seq.append(s)
        prod *= s
    return seq


def sylvester(n: int) -> int:
    if n < 1:
        raise InvalidInputError(f"Sylvester index must be >= 1, got {n}")
    return sylvester_prefix(n)[-1]


def lcm(values: Iterable[int]) -> int:
    return reduce(lambda x, y: x * y // math.gcd(x, y), values, 1)


def frac_part(q: Fraction) -> Fraction:
    return q - math.floor(q)


def parse_rational(text) -> Fraction:
    """Parse ``"p/q"`` or an integer string into a Fraction.

    Floats are rejected on purpose: an instance file must never carry a
    rounded binary value.
    """
    if isinstance(text, bool):
        raise InvalidInputError(f"not a fraction: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, Fraction):
        return text
    if not isinstance(text, str):
        raise InvalidInputError(f"fractions must be strings like '1/3', got {text!r}")
    s = text.strip()
    if "." in s or "e" in s.lower():
        raise InvalidInputError(f"decimal notation not allowed: {text!r}")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidInputError(f"cannot parse fraction {text!r}") from exc


def format_rational(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
