import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hdta.convert import TimedAutomaton, hdta_to_ta, ta_to_1dta
from hdta.errors import ModelError, ParseError
from hdta.model import HdtaModel
from hdta.modelfile import dump, load, parse_model, serialize

import gen

FIXTURES = ["fig3", "fig4", "fig5", "fig5-no-square", "fig9-a", "fig9-b"]


def text(fixture_path, name):
    return fixture_path(f"{name}.hdta").read_text()


def test_fig3_shape(load_fixture):
    m = load_fixture("fig3.hdta")
    assert m.count_by_dim() == {0: 4, 1: 4, 2: 1}
    assert m.initial == "l0" and m.finals == {"lf"}
    assert m.actions == ("a", "b")


@pytest.mark.parametrize("name", FIXTURES)
def test_canonical_text_is_stable(fixture_path, name):
    once = serialize(parse_model(text(fixture_path, name)))
    assert serialize(parse_model(once)) == once


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_models_round_trip(seed):
    rng = random.Random(seed)
    m = gen.random_hdta(rng)
    once = serialize(m)
    back = parse_model(once)
    assert serialize(back) == once
    assert back.inv == m.inv and back.exit == m.exit and back.initial == m.initial
    ta = gen.random_ta(rng)
    once = serialize(ta)
    assert serialize(parse_model(once)) == once


def test_converted_models_reparse(load_fixture):
    ta = hdta_to_ta(load_fixture("fig3.hdta"))
    back = parse_model(serialize(ta))
    assert isinstance(back, TimedAutomaton) and len(back.edges) == len(ta.edges)
    one = ta_to_1dta(back)
    assert serialize(parse_model(serialize(one))) == serialize(one)


def test_dump_and_load(tmp_path, load_fixture):
    m = load_fixture("fig5.hdta")
    dump(m, tmp_path / "m.hdta")
    assert serialize(load(tmp_path / "m.hdta")) == serialize(m)


@pytest.mark.parametrize("body", ["", "# only a comment\n", "hdta 1\nclocks x\ncube p dim=0\n"])
def test_no_initial_state(body):
    with pytest.raises(ParseError, match="no initial state"):
        parse_model(body)


def test_off_by_one_face_is_reported(fixture_path):
    src = text(fixture_path, "fig3").replace("lower=e2,e1", "lower=e1,e2")
    with pytest.raises(ModelError) as info:
        parse_model(src)
    lines = [e for e in info.value.errors if "precubical identity" in e]
    assert lines and all(": u: " in e for e in lines)
    u_line = next(i for i, x in enumerate(src.splitlines(), 1) if x.startswith("cube u "))
    assert lines[0].startswith(f"line {u_line}: ")


@pytest.mark.parametrize("src, message, line", [
    ("ta 2\n", "unsupported format version", 1),
    ("graph 1\n", "first record", 1),
    ("hdta 1\nclocks x\nbogus p\n", "unknown record", 3),
    ("hdta 1\nclocks x\ncube p dim=0 inv=\"x <\"\n", "malformed clock constraint", 3),
    ("hdta 1\nclocks x\ncube p dim=0\ncube p dim=0\n", "already defined on line 3", 4),
    ("hdta 1\nclocks x\ncube p dim=1 lower=q\n", "needs 1 lower and 1 upper", 3),
    ("hdta 1\nclocks x\ncube p dim=0 colour=red\n", "unknown field", 3),
    ("hdta 1\ncube p dim=0 inv='x <= 1\n", "quotation", 2),
])
def test_syntax_errors_carry_lines(src, message, line):
    with pytest.raises(ParseError, match=message) as info:
        parse_model(src)
    assert info.value.line == line


@pytest.mark.parametrize("src, fragment", [
    ("hdta 1\nclocks x\ncube p dim=0 inv=\"y <= 1\"\ninitial p\n", "line 3: cube 'p': undeclared clock(s) ['y']"),
    ("hdta 1\nclocks x\nactions a\ncube p dim=0\ncube q dim=0\ncube e dim=1 lower=p upper=q label=b\ninitial p\n",
     "line 6: cube 'e': undeclared action(s) ['b']"),
    ("hdta 1\nclocks x\ncube p dim=0\ninitial p\nfinal r\n", "line 5: final cube 'r' is not defined"),
    ("hdta 1\nclocks x\ncube e dim=1 lower=p upper=p label=a\ninitial e\n", "unknown cube 'p'"),
    ("hdta 1\nclocks x y\ncube p dim=0 inv=\"x - y <= 1\"\ninitial p\n", "difference atom"),
    ("ta 1\nclocks x\nlocation q\nedge e q r\ninitial q\n", "undeclared location 'r'"),
])
def test_validation_errors(src, fragment):
    with pytest.raises(ModelError) as info:
        parse_model(src)
    assert any(fragment in e for e in info.value.errors), info.value.errors


def test_timed_automaton_file():
    src = """ta 1
clocks x
actions a
location q0 inv="x<=3"   # waits at most 3
location q1
edge go q0 q1 guard="x>=1" action=a reset=x
initial q0
final q1
"""
    ta = parse_model(src)
    assert isinstance(ta, TimedAutomaton)
    assert ta.edges[0].resets == {"x"} and str(ta.invariants["q0"]) == "x<=3"
    assert parse_model(serialize(ta)).edges == ta.edges


def test_equality_is_two_atoms():
    m = parse_model("hdta 1\nclocks x\ncube p dim=0 inv=\"x = 2\"\ninitial p\n")
    assert isinstance(m, HdtaModel)
    assert len(m.inv["p"].atoms) == 2
