"""Line-oriented model files for HDTA and timed automata.

An HDTA file::

    hdta 1
    clocks x y
    actions a b
    cube l0 dim=0 exit=x,y
    cube e1 dim=1 lower=l0 upper=l1 label=a inv="x<=4" exit=y
    ...
    initial l0
    final lf

A timed automaton file::

    ta 1
    clocks x
    actions a
    location q0 inv="x<=3"
    edge go q0 q1 guard="x>=1" action=a reset=x
    initial q0
    final q1

Tokens are split shell-style, ``#`` starts a comment.  Errors carry the line
number of the offending record.
"""

from __future__ import annotations

import re
import shlex

from .clocks import NAME_RE, parse_constraint
from .convert import TAU, Edge, TimedAutomaton
from .errors import HdtaError, ModelError, ParseError, StructuralError
from .model import HdtaModel, validate_model
from .precubical import MAX_DIM, Cube, Hda, PrecubicalSet

VERSION = 1

# cube and location names may carry product and conversion punctuation
CUBE_NAME_RE = re.compile(r"^[^\s,=\"'#]+$")

_CUBE_KEYS = {"dim", "lower", "upper", "label", "inv", "exit"}
_LOC_KEYS = {"inv"}
_EDGE_KEYS = {"guard", "action", "reset"}


def _names(text, what, line):
    out = [t for t in text.split(",") if t]
    pattern = CUBE_NAME_RE if what == "cube" else NAME_RE
    for t in out:
        if not pattern.match(t):
            raise ParseError(f"invalid {what} name {t!r}", line)
    return out


def _fields(tokens, allowed, line):
    out = {}
    for tok in tokens:
        key, eq, val = tok.partition("=")
        if not eq:
            raise ParseError(f"expected key=value, got {tok!r}", line)
        if key not in allowed:
            raise ParseError(f"unknown field {key!r}", line)
        if key in out:
            raise ParseError(f"field {key!r} given twice", line)
        out[key] = val
    return out


def _records(text):
    for no, raw in enumerate(text.splitlines(), 1):
        try:
            toks = shlex.split(raw, comments=True)
        except ValueError as e:
            raise ParseError(str(e), no) from None
        if toks:
            yield no, toks


def parse_model(text: str):
    """Parse an HDTA or TA file.  Returns :class:`HdtaModel` or :class:`TimedAutomaton`."""
    recs = list(_records(text))
    if not recs:
        raise ParseError("empty model file: no initial state")
    no, head = recs[0]
    if len(head) != 2 or head[0] not in ("hdta", "ta"):
        raise ParseError("first record must be 'hdta 1' or 'ta 1'", no)
    if head[1] != str(VERSION):
        raise ParseError(f"unsupported format version {head[1]!r}", no)
    if head[0] == "hdta":
        return _parse_hdta(recs[1:])
    return _parse_ta(recs[1:])


def _common(kind, toks, no, state):
    """Handle clocks/actions/initial/final records; True if consumed."""
    if kind == "clocks":
        state["clocks"] += _names(",".join(toks[1:]), "clock", no)
    elif kind == "actions":
        state["actions"] += _names(",".join(toks[1:]), "action", no)
    elif kind == "initial":
        if len(toks) != 2:
            raise ParseError("'initial' takes one name", no)
        if state["initial"] is not None:
            raise ParseError("initial state declared twice", no)
        state["initial"] = (toks[1], no)
    elif kind == "final":
        if len(toks) < 2:
            raise ParseError("'final' needs at least one name", no)
        state["finals"] += [(t, no) for t in toks[1:]]
    else:
        return False
    return True


def _check_clocks(names, declared, no, errors, where):
    bad = sorted(set(names) - declared)
    if bad:
        errors.append(f"line {no}: {where}: undeclared clock(s) {bad}")


def _check_actions(names, declared, no, errors, where):
    bad = sorted(set(names) - declared - {TAU})
    if bad:
        errors.append(f"line {no}: {where}: undeclared action(s) {bad}")


def _parse_hdta(recs) -> HdtaModel:
    state = {"clocks": [], "actions": [], "initial": None, "finals": []}
    cubes, inv, exit, lines = [], {}, {}, {}
    for no, toks in recs:
        kind = toks[0]
        if _common(kind, toks, no, state):
            continue
        if kind != "cube":
            raise ParseError(f"unknown record {kind!r}", no)
        if len(toks) < 2 or "=" in toks[1]:
            raise ParseError("cube record needs a name", no)
        name = toks[1]
        if not CUBE_NAME_RE.match(name):
            raise ParseError(f"invalid cube name {name!r}", no)
        if name in lines:
            raise ParseError(f"cube {name!r} already defined on line {lines[name]}", no)
        f = _fields(toks[2:], _CUBE_KEYS, no)
        try:
            dim = int(f.get("dim", "0"))
        except ValueError:
            raise ParseError(f"bad dimension {f['dim']!r}", no) from None
        if not 0 <= dim <= MAX_DIM:
            raise ParseError(f"dimension {dim} outside 0..{MAX_DIM}", no)
        lower = _names(f.get("lower", ""), "cube", no)
        upper = _names(f.get("upper", ""), "cube", no)
        if len(lower) != dim or len(upper) != dim:
            raise ParseError(f"a {dim}-cube needs {dim} lower and {dim} upper faces", no)
        cubes.append(Cube(name, dim, lower, upper, _names(f.get("label", ""), "action", no)))
        inv[name] = parse_constraint(f.get("inv", ""), no)
        exit[name] = _names(f.get("exit", ""), "clock", no)
        lines[name] = no

    if state["initial"] is None:
        raise ParseError("no initial state")
    errors = []
    clocks, actions = set(state["clocks"]), set(state["actions"])
    if len(clocks) != len(state["clocks"]):
        errors.append("duplicate clock declaration")
    dims = {c.name: c.dim for c in cubes}
    for c in cubes:
        no = lines[c.name]
        for nu, faces in ((0, c.lower), (1, c.upper)):
            for k, g in enumerate(faces, 1):
                slot = f"{'upper' if nu else 'lower'} face {k}"
                if g not in lines:
                    errors.append(f"line {no}: cube {c.name!r}, {slot}: unknown cube {g!r}")
                elif dims[g] != c.dim - 1:
                    errors.append(f"line {no}: cube {c.name!r}, {slot}: {g!r} has dimension "
                                  f"{dims[g]}, expected {c.dim - 1}")
        _check_clocks(inv[c.name].clocks() | set(exit[c.name]), clocks, no, errors,
                      f"cube {c.name!r}")
        _check_actions(c.label, actions, no, errors, f"cube {c.name!r}")
    init, ino = state["initial"]
    if init not in lines:
        errors.append(f"line {ino}: initial cube {init!r} is not defined")
    for fin, fno in state["finals"]:
        if fin not in lines:
            errors.append(f"line {fno}: final cube {fin!r} is not defined")
    if errors:
        raise ModelError(errors)
    try:
        hda = Hda(PrecubicalSet(cubes), init, {f for f, _ in state["finals"]})
    except StructuralError as e:
        raise ModelError([str(e)]) from None
    model = HdtaModel(hda, state["clocks"], inv, exit)
    problems = validate_model(model)
    if problems:
        raise ModelError([f"line {lines.get(v.cube, '?')}: {v}" for v in problems])
    model.actions = tuple(state["actions"])
    return model


def _parse_ta(recs) -> TimedAutomaton:
    state = {"clocks": [], "actions": [], "initial": None, "finals": []}
    locs, inv, edges, lines = [], {}, [], {}
    for no, toks in recs:
        kind = toks[0]
        if _common(kind, toks, no, state):
            continue
        if kind == "location":
            if len(toks) < 2 or "=" in toks[1]:
                raise ParseError("location record needs a name", no)
            name = toks[1]
            if name in lines:
                raise ParseError(f"{name!r} already defined on line {lines[name]}", no)
            f = _fields(toks[2:], _LOC_KEYS, no)
            locs.append(name)
            inv[name] = parse_constraint(f.get("inv", ""), no)
            lines[name] = no
        elif kind == "edge":
            if len(toks) < 4 or any("=" in t for t in toks[1:4]):
                raise ParseError("edge record needs NAME SOURCE TARGET", no)
            name, src, tgt = toks[1:4]
            if name in lines:
                raise ParseError(f"{name!r} already defined on line {lines[name]}", no)
            f = _fields(toks[4:], _EDGE_KEYS, no)
            edges.append(Edge(name, src, tgt, parse_constraint(f.get("guard", ""), no),
                              f.get("action", TAU), _names(f.get("reset", ""), "clock", no)))
            lines[name] = no
        else:
            raise ParseError(f"unknown record {kind!r}", no)
    if state["initial"] is None:
        raise ParseError("no initial state")
    clocks, actions = set(state["clocks"]), set(state["actions"])
    errors = []
    for e in edges:
        _check_actions([e.action], actions, lines[e.name], errors, f"edge {e.name!r}")
    ta = TimedAutomaton(state["clocks"], locs, state["initial"][0],
                        {f for f, _ in state["finals"]}, inv, edges)
    errors += ta.validate()
    if errors:
        raise ModelError(errors)
    ta.actions = tuple(state["actions"])
    return ta


def _actions_of(obj):
    declared = set(getattr(obj, "actions", ()))
    if isinstance(obj, HdtaModel):
        used = {a for c in obj.space for a in c.label}
    else:
        used = {e.action for e in obj.edges}
    return sorted((declared | used) - {TAU})


def _fmt_inv(phi):
    return f'"{phi}"' if phi else ""


def serialize(obj) -> str:
    """Canonical text: cubes ordered by (dimension, name), fixed field order."""
    lines = []
    if isinstance(obj, HdtaModel):
        lines.append(f"hdta {VERSION}")
        lines.append(" ".join(["clocks", *obj.clocks]).rstrip())
        lines.append(" ".join(["actions", *_actions_of(obj)]).rstrip())
        for c in sorted(obj.space, key=lambda c: (c.dim, c.name)):
            parts = ["cube", c.name, f"dim={c.dim}"]
            if c.dim:
                parts += [f"lower={','.join(c.lower)}", f"upper={','.join(c.upper)}",
                          f"label={','.join(c.label)}"]
            if obj.inv[c.name]:
                parts.append(f"inv={_fmt_inv(obj.inv[c.name])}")
            if obj.exit[c.name]:
                parts.append(f"exit={','.join(sorted(obj.exit[c.name]))}")
            lines.append(" ".join(parts))
    elif isinstance(obj, TimedAutomaton):
        lines.append(f"ta {VERSION}")
        lines.append(" ".join(["clocks", *obj.clocks]).rstrip())
        lines.append(" ".join(["actions", *_actions_of(obj)]).rstrip())
        for q in sorted(obj.locations):
            parts = ["location", q]
            if obj.invariants[q]:
                parts.append(f"inv={_fmt_inv(obj.invariants[q])}")
            lines.append(" ".join(parts))
        for e in sorted(obj.edges, key=lambda e: e.name):
            parts = ["edge", e.name, e.source, e.target]
            if e.guard:
                parts.append(f"guard={_fmt_inv(e.guard)}")
            parts.append(f"action={e.action}")
            if e.resets:
                parts.append(f"reset={','.join(sorted(e.resets))}")
            lines.append(" ".join(parts))
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")
    lines.append(f"initial {obj.initial}")
    for f in sorted(obj.finals):
        lines.append(f"final {f}")
    return "\n".join(lines) + "\n"


def load(path):
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read())


def load_hdta(path) -> HdtaModel:
    m = load(path)
    if not isinstance(m, HdtaModel):
        raise HdtaError(f"{path}: expected an HDTA model, found a timed automaton")
    return m


def dump(obj, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize(obj))
