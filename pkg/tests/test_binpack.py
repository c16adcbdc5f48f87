import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from reference import (lifted_distance_by_search, lp_by_bases, lp_by_highs,
                       min_bins_by_partition, vertex_distance_by_search)
from vertexcone.errors import InvalidInputError, NoDecompositionError, ResourceLimitError
from vertexcone.group import DiagonalBasis
from vertexcone.knapsack import Instance, enumerate_configs, hull_vertices, is_config
from vertexcone.binpack import (gap_report, in_vertex_monoid, irup_family, price,
                                residues_distinct, solve_ilp, solve_lp,
                                vertex_distance)
from vertexcone.lowerbound import construct_sylvester_instance, search_min_instance

HT = (F(1, 2), F(1, 3))

frac = st.integers(2, 9).flatmap(lambda q: st.integers(1, q).map(lambda p: F(p, q)))


@st.composite
def small_instances(draw, max_items=8, max_d=3):
    d = draw(st.integers(1, max_d))
    sizes = tuple(draw(st.lists(frac, min_size=d, max_size=d)))
    b = [0] * d
    for _ in range(draw(st.integers(0, max_items))):
        b[draw(st.integers(0, d - 1))] += 1
    return Instance(sizes, tuple(b))


def check_packing(inst, packing):
    assert all(is_config(inst.sizes, p) for p in packing.weights)
    assert packing.weights.target(inst.d) == tuple(inst.multiplicities)


def test_ilp_examples():
    p = solve_ilp(Instance(HT, (2, 3)))
    assert p.bins == 2 and dict(p.weights) == {(2, 0): 1, (0, 3): 1}
    p = solve_ilp(Instance(HT, (3, 1)))
    assert p.bins == 2 and dict(p.weights) == {(2, 0): 1, (1, 1): 1}
    assert solve_ilp(Instance((F(3, 4),), (1,))).bins == 1
    assert solve_ilp(Instance(HT, (0, 0))).bins == 0


@settings(max_examples=150, deadline=None)
@given(small_instances())
def test_ilp_matches_partitions(inst):
    p = solve_ilp(inst)
    check_packing(inst, p)
    assert p.bins == min_bins_by_partition(inst.sizes, inst.multiplicities)


def test_lp_examples():
    lp = solve_lp(Instance(HT, (2, 3)))
    assert lp.value == 2
    assert solve_lp(Instance(HT, (1, 0))).value == F(1, 2)
    assert solve_lp(Instance(HT, (0, 0))).value == 0


@settings(max_examples=120, deadline=None)
@given(small_instances(max_items=10))
def test_lp_against_bases_and_highs(inst):
    lp = solve_lp(inst)
    b = inst.multiplicities
    assert lp.value == lp_by_bases(inst.sizes, b)
    assert abs(float(lp.value) - lp_by_highs(inst.sizes, b)) < 1e-7
    # volume bound and a dual certificate over every configuration
    assert lp.value >= sum(s * x for s, x in zip(inst.sizes, b))
    y = lp.duals
    assert sum(yi * bi for yi, bi in zip(y, b)) == lp.value
    for p in enumerate_configs(inst.sizes):
        assert sum(yi * pi for yi, pi in zip(y, p)) <= 1
    # primal covers b exactly or with surplus
    for i in range(inst.d):
        assert sum(w * p[i] for p, w in lp.weights.items()) >= b[i]


def test_pricing_methods_agree():
    y = (F(3, 7), F(2, 5), F(1, 9))
    sizes = (F(1, 2), F(1, 3), F(1, 7))
    dp = price(y, sizes, "dp")
    bb = price(y, sizes, "bb")
    assert dp[0] == bb[0]
    brute = max(sum(a * b for a, b in zip(y, p)) for p in enumerate_configs(sizes))
    assert dp[0] == brute
    with pytest.raises(InvalidInputError):
        price(y, sizes, "greedy")


def test_gap_examples():
    r = gap_report(Instance(HT, (2, 3)))
    assert r.gap == 0 and r.irup and r.mirup
    r = gap_report(Instance(HT, (0, 0)))
    assert r.gap == 0 and r.ilp_opt == 0


@settings(max_examples=80, deadline=None)
@given(small_instances())
def test_gap_invariants(inst):
    r = gap_report(inst)
    assert r.ilp_opt >= math.ceil(r.lp_opt)
    assert r.irup == (r.ilp_opt <= math.ceil(r.lp_opt))
    assert r.mirup == (r.ilp_opt <= math.ceil(r.lp_opt) + 1)
    assert r.gap == r.ilp_opt - r.lp_opt


def test_node_cap():
    inst = Instance((F(1, 6), F(4, 11), F(1, 2)), (5, 4, 1))
    assert solve_ilp(inst).bins == 3
    with pytest.raises(ResourceLimitError):
        solve_ilp(inst, node_cap=3)


def test_distance_examples():
    V = hull_vertices(Instance(HT))
    for b, want in [((2, 3), 0), ((1, 1), 1), ((5, 5), 2)]:
        r = vertex_distance(Instance(HT, b), V)
        assert r.value == want == vertex_distance_by_search(HT, b, list(V))
        assert r.witness.target(2) == b
        assert sum(c for p, c in r.witness.items() if p not in V) == want


def test_distance_unreachable():
    sizes = (F(2, 3),)
    with pytest.raises(NoDecompositionError):
        vertex_distance(Instance(sizes, (2,), bins=1), lifted=True)


def test_distance_cell_cap():
    with pytest.raises(ResourceLimitError):
        vertex_distance(Instance(HT, (50, 50)), cell_cap=100)


@settings(max_examples=80, deadline=None)
@given(small_instances(max_items=9))
def test_distance_against_search(inst):
    V = hull_vertices(inst)
    r = vertex_distance(inst, V)
    b = inst.multiplicities
    assert r.value == vertex_distance_by_search(inst.sizes, b, list(V))
    assert (r.value == 0) == in_vertex_monoid(b, V)
    assert r.witness.target(inst.d) == tuple(b)


@settings(max_examples=50, deadline=None)
@given(small_instances(max_items=7, max_d=2), st.integers(0, 3))
def test_lifted_distance_against_search(inst, extra):
    lb = solve_ilp(inst).bins
    bins = lb + extra
    lifted = inst.with_multiplicities(inst.multiplicities, bins=bins)
    V = hull_vertices(inst)
    want = lifted_distance_by_search(inst.sizes, inst.multiplicities, bins, list(V))
    r = vertex_distance(lifted, V)
    assert r.lifted and r.value == want
    assert r.witness.total() == bins


def test_lifted_small_family():
    inst = search_min_instance(3, det_bound=40000)
    base = inst.instance(1)
    V = hull_vertices(base)
    for K in (1, 2):
        r = vertex_distance(inst.instance(K), V)
        assert r.value == K
        assert r.witness == {inst.g: K}


def test_residues_distinct_examples():
    assert residues_distinct((2, 1), 1, 2, DiagonalBasis((3, 4)))
    assert not residues_distinct((1, 1), 1, 7, DiagonalBasis((2, 3)))
    assert not residues_distinct((2, 1), 1, 13, DiagonalBasis((3, 4)))
    with pytest.raises(InvalidInputError):
        residues_distinct((1, 1), 2, 2, DiagonalBasis((2, 3)))


@given(st.integers(1, 30), st.integers(1, 30))
def test_residues_distinct_periodicity(K1, K2):
    basis = DiagonalBasis((3, 4))
    if K1 < K2:
        # (2, 1) generates the whole group of order 12
        assert residues_distinct((2, 1), K1, K2, basis) == ((K2 - K1) % 12 != 0)


def test_irup_family_small():
    inst = Instance.unit_fraction((3, 4))
    assert irup_family(inst, (1, 1), 0).members == []
    res = irup_family(inst, (1, 1), 3)
    assert [m.K for m in res.members] == [3, 4, 5]
    assert res.distinct and res.complete
    for m in res.members:
        assert m.multiplicities == tuple(m.K * x % a for x, a in zip((1, 1), (3, 4)))
        sub = Instance.unit_fraction((3, 4), m.multiplicities)
        assert m.report.ilp_opt == min_bins_by_partition(sub.sizes, sub.multiplicities)
    with pytest.raises(InvalidInputError):
        irup_family(inst, (3, 0), 1)
    with pytest.raises(InvalidInputError):
        irup_family(Instance((F(2, 3), F(1, 3))), (1, 1), 1)
    with pytest.raises(InvalidInputError):
        irup_family(inst, (1, 1), -1)


def test_irup_family_threads_deterministic():
    inst = Instance.unit_fraction((3, 5, 7))
    a = irup_family(inst, (1, 1, 1), 4)
    b = irup_family(inst, (1, 1, 1), 4, threads=3)
    assert [(m.K, m.multiplicities, m.report.ilp_opt, m.report.lp_opt) for m in a.members] == \
        [(m.K, m.multiplicities, m.report.ilp_opt, m.report.lp_opt) for m in b.members]


def test_irup_family_resource_limit():
    inst = construct_sylvester_instance(3)
    res = irup_family(inst.instance(1, lifted=False), inst.g, 1, node_cap=50)
    assert not res.complete
    assert res.members[0].status == "resource-limit" and res.members[0].irup_holds is None
