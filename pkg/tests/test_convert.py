import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hdta.clocks import TRUE, URGENT_CLOCK, parse_constraint
from hdta.convert import (TAU, Edge, TimedAutomaton, hdta_to_ta, one_dta_to_ta, product_ta,
                          ta_to_1dta, ta_zone_reach)
from hdta.errors import HdtaError, ModelError
from hdta.model import HdtaModel
from hdta.precubical import Cube, validate_hda_labeling
from hdta.regions import region_reach
from hdta.zonegraph import zone_reach

import gen


def guarded():
    return TimedAutomaton(["x"], ["q0", "q1"], "q0", ["q1"], {},
                          [Edge("go", "q0", "q1", parse_constraint("x >= 1"), "a", {"x"})])


def test_edge_becomes_instantaneous_cube():
    m = ta_to_1dta(guarded())
    assert m.clocks == ("x", URGENT_CLOCK)
    assert m.inv["go"] == parse_constraint(f"x >= 1 & {URGENT_CLOCK} <= 0")
    assert m.exit["go"] == {"x"} and m.exit["q0"] == {URGENT_CLOCK}
    assert m.cube("go").lower == ("q0",) and m.cube("go").label == ("a",)
    assert validate_hda_labeling(m.hda) == []
    assert zone_reach(m).reachable


def test_no_edges():
    ta = TimedAutomaton(["x"], ["q0", "q1"], "q0", ["q1"])
    m = ta_to_1dta(ta)
    assert {c.dim for c in m.space} == {0}
    assert not zone_reach(m).reachable and not ta_zone_reach(ta).reachable


def test_reserved_clock():
    ta = TimedAutomaton([URGENT_CLOCK], ["q"], "q")
    with pytest.raises(HdtaError, match="reserved"):
        ta_to_1dta(ta)


def test_invalid_automaton():
    ta = TimedAutomaton(["x"], ["q"], "q", [], {}, [Edge("e", "q", "nowhere")])
    with pytest.raises(ModelError, match="nowhere"):
        ta_to_1dta(ta)


def test_edge_to_three_location_chain():
    # source (phi1, C1) --e (phi2, C2)--> target (phi3, C3)
    cubes = [Cube("s", 0), Cube("t", 0), Cube("e", 1, ["s"], ["t"], ["a"])]
    inv = {"s": parse_constraint("x <= 1"), "e": parse_constraint("x <= 2"),
           "t": parse_constraint("y >= 1")}
    exit = {"s": {"x"}, "e": {"y"}, "t": {"x", "y"}}
    ta = one_dta_to_ta(HdtaModel.build(cubes, "s", ["t"], ["x", "y"], inv, exit))
    assert set(ta.locations) == {"s", "e", "t"}
    assert ta.invariants == inv
    enter, leave = sorted(ta.edges, key=lambda e: e.name)[::-1]
    assert (enter.source, enter.target, enter.guard, enter.action, enter.resets) == \
        ("s", "e", TRUE, TAU, frozenset({"x"}))
    assert (leave.source, leave.target, leave.guard, leave.action, leave.resets) == \
        ("e", "t", TRUE, "a", frozenset({"y"}))
    assert ta.clocks == ("x", "y")


def test_points_only():
    m = HdtaModel.build([Cube("p", 0), Cube("q", 0)], "p", ["q"], ["x"])
    ta = one_dta_to_ta(m)
    assert ta.edges == () and set(ta.locations) == {"p", "q"}


def test_two_dimensional_rejected(load_fixture):
    with pytest.raises(HdtaError, match="not 1-dimensional"):
        one_dta_to_ta(load_fixture("fig3.hdta"))


@pytest.mark.parametrize("name", ["fig3", "fig4", "fig5", "fig5-no-square", "fig9-a"])
def test_flattening_preserves_fixture_verdicts(load_fixture, name):
    m = load_fixture(f"{name}.hdta")
    want = zone_reach(m).reachable
    ta = hdta_to_ta(m)
    assert ta_zone_reach(ta).reachable == want
    assert zone_reach(ta_to_1dta(ta)).reachable == want


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_conversions_agree(seed):
    ta = gen.random_ta(random.Random(seed))
    one = ta_to_1dta(ta)
    want = ta_zone_reach(ta).reachable
    assert zone_reach(one, witness=False).reachable == want
    assert region_reach(one).reachable == want
    assert ta_zone_reach(one_dta_to_ta(one)).reachable == want


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_cube_and_edge_counts_are_linear(seed):
    ta = gen.random_ta(random.Random(seed))
    one = ta_to_1dta(ta)
    assert len(one.space) == len(ta.locations) + len(ta.edges)
    back = one_dta_to_ta(one)
    assert len(back.locations) == len(one.space)
    assert len(back.edges) == 2 * len(ta.edges)


def test_product_of_automata():
    a = guarded()
    b = TimedAutomaton(["y"], ["p0", "p1"], "p0", ["p1"], {"p0": parse_constraint("y <= 2")},
                       [Edge("go", "p0", "p1", parse_constraint("y >= 3"), "b")])
    p = product_ta([a, b])
    assert len(p.locations) == 4
    assert not ta_zone_reach(p).reachable  # y >= 3 is never possible under y <= 2
