import math
from fractions import Fraction as F

import pytest
from hypothesis import assume, given, settings, strategies as st

from reference import frac_level, vertex_distance_by_search
from vertexcone.errors import (InsufficientWeightError, InvalidInputError,
                               PreconditionViolatedError, ResourceLimitError)
from vertexcone.knapsack import (Instance, barycentric, enumerate_configs,
                                 hull_vertices, is_config, simplex_containing)
from vertexcone.level import (Weights, decompose_multiple, find_shift_multiplicity,
                              jumps_at, jumps_at_ceiling, level, level_profile,
                              recurrence_failures, shift_weight,
                              structure_decompose, support_reduce,
                              verify_level_recurrence)

HT = (F(1, 2), F(1, 3))
BASIS = ((0, 0), (2, 0), (0, 3))


@st.composite
def barycentric_vectors(draw, max_den=1000, max_d=4):
    d = draw(st.integers(1, max_d))
    den = draw(st.integers(1, max_den))
    cuts = sorted(draw(st.lists(st.integers(0, den), min_size=d, max_size=d)))
    parts = [b - a for a, b in zip([0] + cuts, cuts + [den])]
    return tuple(F(p, den) for p in parts)


def test_level_examples():
    assert level((F(1, 6), F(1, 2), F(1, 3)), 2) == 1
    assert level((0, 1, 0), 7) == 0
    assert level((F(2, 5), F(2, 5), F(1, 5)), 2) == 2
    with pytest.raises(InvalidInputError):
        level((F(1, 2), F(1, 3)), 2)


@given(barycentric_vectors(), st.integers(0, 2000))
def test_level_matches_fraction_sum(x, K):
    lv = level(x, K)
    assert lv == frac_level(x, K)
    assert 0 <= lv <= len(x) - 1


@given(barycentric_vectors())
def test_level_one_at_K1(x):
    if any(v.denominator > 1 for v in x):
        assert level(x, 1) == 1


def test_jumps_examples():
    x = (F(1, 6), F(1, 2), F(1, 3))
    assert jumps_at(x, 2) == {1}
    assert 0 not in jumps_at((0, F(1, 2), F(1, 2)), 5)
    assert jumps_at((F(1, 3), F(2, 3)), 3) == {0, 1}


def test_recurrence_examples():
    assert verify_level_recurrence((F(1, 6), F(1, 2), F(1, 3)), 100)
    assert verify_level_recurrence((0, 1, 0), 50)


def test_ceiling_jump_divergence():
    x = (F(1, 2), F(1, 2))
    # both halves wrap going from K=1 to K=2; the level drops from 1 to 0
    assert level(x, 1) == 1 and level(x, 2) == 0
    assert jumps_at(x, 2) == {0, 1}
    assert jumps_at_ceiling(x, 2) == set()
    assert 2 in recurrence_failures(x, 2, rule="ceiling")
    assert recurrence_failures(x, 2, rule="wrap") == []


@settings(max_examples=60, deadline=None)
@given(barycentric_vectors(max_den=200))
def test_recurrence_property(x):
    assert verify_level_recurrence(x, 300)


def test_find_shift_examples():
    assert find_shift_multiplicity((F(1, 6), F(1, 2), F(1, 3))) == 2
    x = (0, F(1, 2), F(1, 2))
    assert find_shift_multiplicity(x) == 2 and level(x, 2) == 0
    assert find_shift_multiplicity((F(2, 5), F(2, 5), F(1, 5))) == 3


def test_find_shift_cap():
    with pytest.raises(ResourceLimitError):
        find_shift_multiplicity((F(2, 5), F(2, 5), F(1, 5)), cap=2)


@given(barycentric_vectors(max_den=300))
def test_find_shift_is_minimal(x):
    K = find_shift_multiplicity(x)
    assert frac_level(x, K) <= 1
    assert all(frac_level(x, k) > 1 for k in range(2, K))


def test_profile():
    p = level_profile((F(1, 6), F(1, 2), F(1, 3)), 2)
    assert p.level == 1 and p.jumps == (False, True, False)


def test_decompose_multiple_examples():
    delta, lam = decompose_multiple((1, 1), 2, BASIS)
    assert delta == (0, 2) and lam == (0, 1, 0)
    delta, lam = decompose_multiple((2, 0), 2, BASIS)
    assert delta == (0, 0) and lam == (0, 2, 0)
    with pytest.raises(PreconditionViolatedError):
        decompose_multiple((2, 2, 1), 2, ((0, 0, 0), (5, 0, 0), (0, 5, 0), (0, 0, 5)))


@settings(max_examples=80, deadline=None)
@given(st.lists(st.integers(2, 12), min_size=2, max_size=3), st.data())
def test_decompose_multiple_reconstructs(a, data):
    sizes = tuple(F(1, x) for x in a)
    d = len(a)
    basis = ((0,) * d,) + tuple(tuple(x if k == i else 0 for k in range(d)) for i, x in enumerate(a))
    confs = enumerate_configs(sizes)
    gamma = data.draw(st.sampled_from(confs))
    K = find_shift_multiplicity(barycentric(gamma, basis))
    delta, lam = decompose_multiple(gamma, K, basis)
    total = tuple(delta[k] + sum(l * b[k] for l, b in zip(lam, basis)) for k in range(d))
    assert total == tuple(K * g for g in gamma)
    assert min(delta) >= 0 and is_config(sizes, delta)


def _target(w, d):
    return tuple(sum(c * p[k] for p, c in w.items()) for k in range(d))


def test_weights_basics():
    w = Weights({(1, 1): 2, (0, 0): 0, (2, 0): 1})
    assert dict(w) == {(1, 1): 2, (2, 0): 1}
    assert w.target() == (4, 2) and w.total() == 3
    with pytest.raises(InvalidInputError):
        Weights({(1, 1): -1})


def test_shift_weight_example():
    V = hull_vertices(Instance(HT))
    w = Weights({(1, 1): 5})
    new = shift_weight(w, (1, 1), V)
    assert dict(new) == {(1, 1): 3, (0, 2): 1, (2, 0): 1}
    assert w.nonvertex_mass(V) == 5 and new.nonvertex_mass(V) == 4
    exact = shift_weight(Weights({(1, 1): 2}), (1, 1), V)
    assert (1, 1) not in exact
    with pytest.raises(InsufficientWeightError) as info:
        shift_weight(Weights({(1, 1): 1}), (1, 1), V)
    assert info.value.required == 2


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(2, 7), min_size=2, max_size=3), st.data())
def test_shift_preserves_target(a, data):
    inst = Instance.unit_fraction(a)
    V = hull_vertices(inst)
    confs = [p for p in enumerate_configs(inst.sizes) if p not in V]
    assume(confs)
    gamma = data.draw(st.sampled_from(confs))
    K = find_shift_multiplicity(simplex_containing(gamma, V))
    w = Weights({gamma: K + data.draw(st.integers(0, 3))})
    new = shift_weight(w, gamma, V)
    assert new.target(len(a)) == w.target(len(a))
    assert new.nonvertex_mass(V) < w.nonvertex_mass(V)


def test_support_reduce_examples():
    V = hull_vertices(Instance(HT))
    small = Weights({(1, 1): 3, (0, 1): 2})
    assert support_reduce(small, V) == small
    five = Weights({(1, 1): 1, (0, 1): 1, (1, 0): 1, (0, 2): 1, (1, 2): 0})
    big = Weights({(1, 1): 2, (0, 1): 1, (1, 0): 3, (0, 2): 1, (0, 0): 0})
    for w in (five, big):
        r = support_reduce(w, V)
        assert r.target(2) == w.target(2)
        assert len(r.nonvertex_support(V)) <= 4


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(2, 6), min_size=2, max_size=3), st.data())
def test_support_reduce_property(a, data):
    inst = Instance.unit_fraction(a)
    V = hull_vertices(inst)
    confs = enumerate_configs(inst.sizes)
    w = Weights(data.draw(st.dictionaries(st.sampled_from(confs), st.integers(1, 5),
                                          max_size=12)))
    r = support_reduce(w, V)
    assert r.target(len(a)) == w.target(len(a))
    assert len(r.nonvertex_support(V)) <= 2 ** len(a)


def test_structure_examples():
    V = hull_vertices(Instance(HT))
    r = structure_decompose(Instance(HT, (2, 3)), V)
    assert dict(r.weights) == {(2, 0): 1, (0, 3): 1} and r.vertex_distance_bound == 0
    r = structure_decompose(Instance(HT, (8, 0)), V)
    assert dict(r.weights) == {(2, 0): 4}
    r = structure_decompose(Instance(HT, (5, 5)), V)
    assert r.weights.target(2) == (5, 5)
    assert r.vertex_distance_bound == 2
    assert r.bounds_hold


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(1, 5), min_size=2, max_size=2).flatmap(
    lambda q: st.tuples(st.just(q), st.lists(st.integers(1, 4), min_size=2, max_size=2))),
    st.lists(st.integers(0, 5), min_size=2, max_size=2))
def test_structure_property(den_num, b):
    dens, nums = den_num
    sizes = tuple(F(min(n, d), d) for n, d in zip(nums, dens))
    inst = Instance(sizes, tuple(b))
    V = hull_vertices(inst, method="incremental", configs=enumerate_configs(sizes))
    r = structure_decompose(inst, V)
    assert r.weights.target(2) == tuple(b)
    assert r.bounds_hold
    for g, K in r.shift_multiplicities.items():
        assert r.weights[g] < K
    assert r.vertex_distance_bound >= vertex_distance_by_search(sizes, b, list(V))
