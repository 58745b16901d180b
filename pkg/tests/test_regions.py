import random
from fractions import Fraction
from itertools import combinations
from math import factorial

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hdta.model import HdtaModel
from hdta.precubical import Cube
from hdta.regions import (all_regions, describe, region_bound, region_graph, region_of,
                          region_reach)
from hdta.zonegraph import zone_reach

import gen


def atom_profile(v, cmax):
    """Truth of every atom with constants up to cmax; determines the region."""
    out = []
    clocks = sorted(v)
    for c in clocks:
        out += [(v[c] < k, v[c] == k) for k in range(cmax + 1)]
    for a, b in combinations(clocks, 2):
        if v[a] <= cmax and v[b] <= cmax:
            d = v[a] - v[b]
            out += [(d < k, d == k) for k in range(-cmax, cmax + 1)]
    return tuple(out)


def test_zero_valuation():
    r = region_of({"x": 0, "y": 0}, 4)
    assert r.ints == (0, 0) and all(r.zero) and r.order == ()


def test_same_fraction_order_same_region():
    a = region_of({"x": Fraction(5, 2), "y": Fraction(1, 2)}, 4)
    b = region_of({"x": Fraction(27, 10), "y": Fraction(1, 10)}, 4)
    # both fractions nonzero, x's larger than y's only in the second
    assert a != b
    c = region_of({"x": Fraction(27, 10), "y": Fraction(3, 10)}, 4)
    assert b == c


def test_overflow():
    r = region_of({"x": Fraction(26, 5)}, 4)
    assert r.overflow == (True,)
    assert region_of({"x": 9}, 4) == r
    assert describe(r, ("x",)) == "x>4"


@settings(max_examples=400, deadline=None)
@given(st.lists(st.integers(0, 24), min_size=4, max_size=4))
def test_region_equivalence_matches_atom_profile(q):
    cmax = 4
    v = {"x": Fraction(q[0], 4), "y": Fraction(q[1], 4)}
    w = {"x": Fraction(q[2], 4), "y": Fraction(q[3], 4)}
    same = region_of(v, cmax) == region_of(w, cmax)
    assert same == (atom_profile(v, cmax) == atom_profile(w, cmax))


@pytest.mark.parametrize("n, cmax", [(1, 0), (1, 2), (1, 4), (2, 1), (2, 4), (3, 2)])
def test_region_count_within_bound(n, cmax):
    regions = list(all_regions(("x", "y", "z")[:n], cmax))
    assert len(regions) == len(set(regions))
    assert len(regions) <= region_bound(n, cmax)
    if n == 1:
        assert len(regions) == 2 * cmax + 2


def test_bound_formula():
    assert region_bound(2, 4) == factorial(2) * 2 ** 2 * 10 ** 2 == 800


def test_every_region_is_hit_by_a_grid_point():
    # all regions over 2 clocks at cmax 2 are realized by points of step 1/4
    grid = {region_of({"x": Fraction(i, 4), "y": Fraction(j, 4)}, 2, ("x", "y"))
            for i in range(13) for j in range(13)}
    assert grid == set(all_regions(("x", "y"), 2))


def test_initial_final_is_trivially_reachable():
    m = HdtaModel.build([Cube("p", 0)], "p", ["p"], ["x"])
    res = region_reach(m)
    assert res.reachable and res.witness == []


@pytest.mark.parametrize("name, want", [("fig3", True), ("fig4", True), ("fig5", True),
                                        ("fig5-no-square", False)])
def test_fixture_verdicts(load_fixture, name, want):
    assert region_reach(load_fixture(f"{name}.hdta")).reachable is want


def test_graph_nodes_within_bound(load_fixture):
    m = load_fixture("fig3.hdta")
    nodes, edges = region_graph(m)
    assert len(nodes) <= len(m.space) * region_bound(2, m.cmax)
    assert {c for c, _ in nodes} == {c.name for c in m.space}
    assert all(0 <= s < len(nodes) and 0 <= d < len(nodes) for s, d, _, _ in edges)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_agrees_with_zones(seed):
    m = gen.random_hdta(random.Random(seed))
    assert region_reach(m).reachable == zone_reach(m, witness=False).reachable
