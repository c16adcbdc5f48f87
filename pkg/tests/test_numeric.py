import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from vertexcone.errors import InvalidInputError, NotInvertibleError
from vertexcone.numeric import (Residue, crt_solve, ext_gcd, format_rational,
                                frac_part, mod_inverse, pairwise_coprime,
                                parse_rational, sylvester, sylvester_prefix)


def test_ext_gcd_examples():
    g, c = ext_gcd([4, 3])
    assert g == 1 and 4 * c[0] + 3 * c[1] == 1
    g, c = ext_gcd([2, 4])
    assert g == 2 and 2 * c[0] + 4 * c[1] == 2
    g, c = ext_gcd([6, 10, 15])
    assert g == 1 and 6 * c[0] + 10 * c[1] + 15 * c[2] == 1


def test_ext_gcd_rejects_degenerate():
    with pytest.raises(InvalidInputError):
        ext_gcd([])
    with pytest.raises(InvalidInputError):
        ext_gcd([0, 0])


@given(st.lists(st.integers(-10 ** 6, 10 ** 6), min_size=1, max_size=5)
       .filter(lambda v: any(v)))
def test_ext_gcd_bezout(values):
    g, c = ext_gcd(values)
    assert g == math.gcd(*values)
    assert sum(x * y for x, y in zip(c, values)) == g


def test_mod_inverse_examples():
    assert mod_inverse(3, 4) == Residue(3, 4)
    assert mod_inverse(-37, 75).value == 2
    assert mod_inverse(5, 1) == Residue(0, 1)
    with pytest.raises(NotInvertibleError):
        mod_inverse(2, 4)


@given(st.integers(-10 ** 6, 10 ** 6), st.integers(2, 10 ** 5))
def test_mod_inverse_matches_pow(x, a):
    if math.gcd(x, a) == 1:
        assert mod_inverse(x, a).value == pow(x, -1, a)
    else:
        with pytest.raises(NotInvertibleError):
            mod_inverse(x, a)


def test_crt_examples():
    assert crt_solve([Residue(2, 3), Residue(3, 5)]) == Residue(8, 15)
    assert crt_solve([Residue(1, 2), Residue(2, 3), Residue(3, 5)]) == Residue(23, 30)
    with pytest.raises(InvalidInputError):
        crt_solve([Residue(1, 4), Residue(1, 6)])


@given(st.lists(st.sampled_from([2, 3, 5, 7, 11, 13, 17]), min_size=1, max_size=4, unique=True),
       st.data())
def test_crt_by_scan(moduli, data):
    res = [Residue(data.draw(st.integers(0, m - 1)), m) for m in moduli]
    out = crt_solve(res)
    M = math.prod(moduli)
    scan = [x for x in range(M) if all(x % r.modulus == r.value for r in res)]
    assert out == Residue(scan[0], M) and len(scan) == 1


def test_residue_validation():
    with pytest.raises(InvalidInputError):
        Residue(5, 3)
    with pytest.raises(InvalidInputError):
        Residue(0, 0)
    assert Residue.of(-1, 7) == Residue(6, 7)


def test_sylvester_values():
    assert sylvester_prefix(5) == [2, 3, 7, 43, 1807]
    assert sylvester(5) == 1807
    with pytest.raises(InvalidInputError):
        sylvester(0)


@pytest.mark.parametrize("j", range(1, 11))
def test_sylvester_reciprocal_sum(j):
    S = sylvester_prefix(j)
    assert sum(Fraction(1, s) for s in S[:j - 1]) == 1 - Fraction(1, S[j - 1] - 1)


def test_pairwise_coprime():
    assert pairwise_coprime([3, 4, 5])
    assert not pairwise_coprime([3, 4, 6])
    assert pairwise_coprime([7])


def test_parse_and_format():
    assert parse_rational("1/3") == Fraction(1, 3)
    assert parse_rational(" 2 ") == 2
    for bad in ["0.5", "1e-3", 0.5, "x/2", "1/0", True]:
        with pytest.raises(InvalidInputError):
            parse_rational(bad)
    assert format_rational(Fraction(6, 4)) == "3/2"
    assert format_rational(Fraction(4, 2)) == "2"


@given(st.fractions())
def test_format_round_trip(q):
    assert parse_rational(format_rational(q)) == q


def test_frac_part():
    assert frac_part(Fraction(7, 3)) == Fraction(1, 3)
    assert frac_part(Fraction(-1, 3)) == Fraction(2, 3)
