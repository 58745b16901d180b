import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hdta.compose import tensor_all
from hdta.errors import StructuralError
from hdta.model import HdtaModel
from hdta.precubical import (MAX_DIM, Cube, Hda, PrecubicalSet, started_event,
                             terminated_event, validate_hda_labeling, validate_precubical)

import gen


def edge_model(a):
    cubes = [Cube(f"{a}0", 0), Cube(f"{a}1", 0), Cube(a, 1, [f"{a}0"], [f"{a}1"], [a])]
    return HdtaModel.build(cubes, f"{a}0", [f"{a}1"], [])


def square(**override):
    cubes = {
        "p": Cube("p", 0), "q": Cube("q", 0), "r": Cube("r", 0), "s": Cube("s", 0),
        "a0": Cube("a0", 1, ["p"], ["q"], ["a"]), "a1": Cube("a1", 1, ["r"], ["s"], ["a"]),
        "b0": Cube("b0", 1, ["p"], ["r"], ["b"]), "b1": Cube("b1", 1, ["q"], ["s"], ["b"]),
        "sq": Cube("sq", 2, ["b0", "a0"], ["b1", "a1"], ["a", "b"]),
    }
    cubes.update(override)
    return PrecubicalSet(cubes.values())


def test_square_is_valid(load_fixture):
    assert validate_precubical(square()) == []
    m = load_fixture("fig3.hdta")
    assert validate_precubical(m.space) == []
    assert validate_hda_labeling(m.hda) == []


def test_swapped_faces_break_the_identity():
    bad = square(sq=Cube("sq", 2, ["b1", "a0"], ["b0", "a1"], ["a", "b"]))
    v = validate_precubical(bad)
    assert v and all(x.cube == "sq" and x.rule == "precubical identity" for x in v)


def test_full_and_hollow_cube():
    full = tensor_all([edge_model(a) for a in "abc"])
    assert full.count_by_dim() == {0: 8, 1: 12, 2: 6, 3: 1}
    assert validate_precubical(full.space) == []
    hollow = PrecubicalSet(c for c in full.space if c.dim < 3)
    assert validate_precubical(hollow) == [] and hollow.dim == 2


@pytest.mark.parametrize("cube, message", [
    (Cube("x", 1, ["p"], [], ["a"]), "expected 1 lower and upper"),
    (Cube("x", 1, ["p"], ["nowhere"], ["a"]), "unknown cube 'nowhere'"),
    (Cube("x", 2, ["a0", "p"], ["a1", "b1"], ["a", "b"]), "has dimension 0, expected 1"),
    (Cube("x", MAX_DIM + 1), "exceeds the cap"),
])
def test_structural_errors(cube, message):
    with pytest.raises(StructuralError, match=message):
        square(x=cube)


def test_duplicate_cube():
    with pytest.raises(StructuralError, match="duplicate"):
        PrecubicalSet([Cube("p", 0), Cube("p", 0)])


def test_initial_must_be_a_state():
    with pytest.raises(StructuralError, match="not a 0-cube"):
        Hda(square(), "a0")
    with pytest.raises(StructuralError, match="does not exist"):
        Hda(square(), "p", {"zz"})


def test_labeling_rules():
    ok = Hda(square(), "p", {"s"})
    assert validate_hda_labeling(ok) == []
    wrong_size = Hda(square(sq=Cube("sq", 2, ["b0", "a0"], ["b1", "a1"], ["a"])), "p")
    assert {v.rule for v in validate_hda_labeling(wrong_size)} >= {"L1"}
    mismatch = Hda(square(a1=Cube("a1", 1, ["r"], ["s"], ["c"])), "p")
    assert "L2" in {v.rule for v in validate_hda_labeling(mismatch)}
    twice = Hda(square(sq=Cube("sq", 2, ["b0", "a0"], ["b1", "a1"], ["a", "a"])), "p")
    assert "L3" in {v.rule for v in validate_hda_labeling(twice)}


def test_events_of_the_square(load_fixture):
    m = load_fixture("fig3.hdta")
    # index 1 of u is a: its lower face 1 is the b-edge, its upper face 1 the b-edge e3
    assert started_event(m.space, "u", 1) == "a"
    assert started_event(m.space, "u", 2) == "b"
    assert terminated_event(m.space, "u", 1) == "a"
    assert terminated_event(m.space, "u", 2) == "b"
    assert started_event(m.space, "e1", 1) == "a"


def test_face_index_out_of_range():
    with pytest.raises(IndexError):
        square()["a0"].face(2, 0)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_models_are_precubical(seed):
    m = gen.random_hdta(random.Random(seed))
    assert validate_precubical(m.space) == []
    assert validate_hda_labeling(m.hda) == []


def brute_force_violations(space):
    """Independent enumeration of composite faces, iterating l downwards."""
    out = set()
    for x in space:
        for l in range(x.dim, 1, -1):
            for k in range(l - 1, 0, -1):
                for nu in (1, 0):
                    for mu in (1, 0):
                        a = space[x.upper[l - 1] if mu else x.lower[l - 1]]
                        b = space[x.upper[k - 1] if nu else x.lower[k - 1]]
                        lhs = a.upper[k - 1] if nu else a.lower[k - 1]
                        rhs = b.upper[l - 2] if mu else b.lower[l - 2]
                        if lhs != rhs:
                            out.add((x.name, k, l, nu, mu))
    return out


def test_single_point_is_valid():
    space = PrecubicalSet([Cube("p", 0)])
    assert validate_precubical(space) == []
    assert validate_hda_labeling(Hda(space, "p")) == []


def test_one_bad_corner_gives_one_violation():
    bad = square(p2=Cube("p2", 0), a0=Cube("a0", 1, ["p2"], ["q"], ["a"]))
    v = validate_precubical(bad)
    assert len(v) == 1 and v[0].indices == (1, 2, 0, 0)
    assert brute_force_violations(bad) == {("sq", 1, 2, 0, 0)}


def test_torus_gluing_is_accepted():
    # one state, two loops, a square whose opposite faces coincide
    torus = PrecubicalSet([
        Cube("v", 0), Cube("a", 1, ["v"], ["v"], ["a"]), Cube("b", 1, ["v"], ["v"], ["b"]),
        Cube("t", 2, ["b", "a"], ["b", "a"], ["a", "b"]),
    ])
    assert validate_precubical(torus) == []
    assert validate_hda_labeling(Hda(torus, "v")) == []


def test_two_labels_on_an_edge():
    space = PrecubicalSet([Cube("p", 0), Cube("q", 0), Cube("e", 1, ["p"], ["q"], ["a", "b"])])
    assert [v.rule for v in validate_hda_labeling(Hda(space, "p"))][0] == "L1"


def test_full_cube_labels():
    full = tensor_all([edge_model(a) for a in "abc"])
    top = next(c for c in full.space if c.dim == 3)
    assert top.label == ("a", "b", "c")
    assert validate_hda_labeling(full.hda) == []


@pytest.mark.parametrize("name", ["fig3", "fig4", "fig5", "fig9-a"])
def test_started_event_defined_everywhere(load_fixture, name):
    m = load_fixture(f"{name}.hdta")
    for c in m.space:
        for k in range(1, c.dim + 1):
            assert started_event(m.space, c, k) in c.label
            assert terminated_event(m.space, c, k) in c.label


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 8))
def test_validation_agrees_with_brute_force(seed, which):
    rng = random.Random(seed)
    m = gen.random_hdta(rng)
    cubes = list(m.space)
    # maybe rewire one face of a higher cube to another cube of the right dimension
    high = [c for c in cubes if c.dim >= 2]
    if high and which:
        c = rng.choice(high)
        pool = [d.name for d in cubes if d.dim == c.dim - 1]
        lower = list(c.lower)
        lower[rng.randrange(c.dim)] = rng.choice(pool)
        cubes = [Cube(c.name, c.dim, lower, c.upper, c.label) if d.name == c.name else d
                 for d in cubes]
    space = PrecubicalSet(cubes)
    found = {(v.cube, *v.indices) for v in validate_precubical(space)}
    assert found == brute_force_violations(space)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_lower_face_label_is_one_smaller(seed):
    m = gen.random_hdta(random.Random(seed))
    from collections import Counter
    for c in m.space:
        for k in range(1, c.dim + 1):
            lo = Counter(m.space[c.lower[k - 1]].label)
            assert not lo - Counter(c.label)
            assert len(c.label) - sum(lo.values()) == 1
