"""Valuation-level semantics of HDTA: delay, start and finish steps."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from .clocks import satisfies, valuation_delay, valuation_reset, zero_valuation
from .model import HdtaModel


class ConcreteState(NamedTuple):
    cube: str
    valuation: dict


@dataclass(frozen=True)
class Step:
    """One witness step.  ``kind`` is ``delay``, ``start`` or ``finish``;
    ``index`` is the face index k for start/finish; ``data`` is the valuation,
    zone or region reached."""

    kind: str
    index: int
    cube: str
    data: object

    def __str__(self):
        what = self.kind if self.kind == "delay" else f"{self.kind} {self.index}"
        return f"{what:>9} -> {self.cube}  {_fmt(self.data)}"


def _fmt(data):
    if isinstance(data, dict):
        return "{" + ", ".join(f"{c}={v}" for c, v in data.items()) + "}"
    return str(data)


@dataclass
class Stats:
    explored: int = 0
    subsumed: int = 0
    peak_waiting: int = 0


@dataclass
class ReachResult:
    reachable: bool
    witness: list | None = None
    stats: Stats = field(default_factory=Stats)


def initial_state(model: HdtaModel) -> ConcreteState | None:
    v0 = zero_valuation(model.clocks)
    if not satisfies(v0, model.inv[model.initial]):
        return None
    return ConcreteState(model.initial, v0)


def concrete_delay(model: HdtaModel, s: ConcreteState, d) -> ConcreteState | None:
    # invariants are conjunctions of single-clock atoms, so the set of legal
    # delays is an interval containing 0: checking the endpoint suffices
    if d < 0:
        raise ValueError(f"negative delay {d}")
    v = valuation_delay(s.valuation, d)
    inv = model.inv[s.cube]
    if not (satisfies(s.valuation, inv) and satisfies(v, inv)):
        return None
    return ConcreteState(s.cube, v)


def concrete_start(model: HdtaModel, s: ConcreteState, l: str, k: int) -> ConcreteState | None:
    cube = model.cube(l)
    if not 1 <= k <= cube.dim:
        raise IndexError(f"start index {k} out of range for {l!r}")
    if cube.face(k, 0) != s.cube:
        raise ValueError(f"{s.cube!r} is not lower face {k} of {l!r}")
    v = valuation_reset(s.valuation, model.exit[s.cube])
    if not satisfies(v, model.inv[l]):
        return None
    return ConcreteState(l, v)


def concrete_finish(model: HdtaModel, s: ConcreteState, k: int) -> ConcreteState | None:
    cube = model.cube(s.cube)
    if not 1 <= k <= cube.dim:
        raise IndexError(f"finish index {k} out of range for {s.cube!r}")
    target = cube.face(k, 1)
    v = valuation_reset(s.valuation, model.exit[s.cube])
    if not satisfies(v, model.inv[target]):
        return None
    return ConcreteState(target, v)


def discrete_successors(model: HdtaModel, s: ConcreteState):
    """``(kind, k, state)`` for every enabled start and finish step."""
    for l, k in model.cofaces[s.cube]:
        t = concrete_start(model, s, l, k)
        if t is not None:
            yield "start", k, t
    for k in range(1, model.cube(s.cube).dim + 1):
        t = concrete_finish(model, s, k)
        if t is not None:
            yield "finish", k, t


def bounded_search(model: HdtaModel, depth: int = 12, step=Fraction(1, 4)) -> ReachResult:
    """Breadth-first search over runs of at most ``depth`` steps.

    Delays are multiples of ``step`` up to ``cmax + 1``.  States are
    deduplicated with clock values above ``cmax`` clamped to ``cmax + 1``; no
    constraint in the model can tell such values apart.  A positive answer
    comes with a replayable run; a negative one is only evidence.
    """
    s0 = initial_state(model)
    stats = Stats()
    if s0 is None:
        return ReachResult(False, None, stats)
    cap = model.cmax + 1
    delays = [step * i for i in range(1, int(cap / step) + 1)]
    clocks = model.clocks

    def key(s):
        return s.cube, tuple(min(s.valuation[c], cap) for c in clocks)

    parent = {key(s0): None}
    frontier = deque([(s0, 0)])
    while frontier:
        stats.peak_waiting = max(stats.peak_waiting, len(frontier))
        s, n = frontier.popleft()
        stats.explored += 1
        if s.cube in model.finals:
            return ReachResult(True, _unwind(parent, key(s)), stats)
        if n == depth:
            continue
        moves = [("delay", 0, concrete_delay(model, s, d)) for d in delays]
        moves += list(discrete_successors(model, s))
        for kind, k, t in moves:
            if t is None:
                continue
            kt = key(t)
            if kt in parent:
                continue
            parent[kt] = (key(s), Step(kind, k, t.cube, t.valuation))
            frontier.append((t, n + 1))
    return ReachResult(False, None, stats)


def _unwind(parent, k):
    steps = []
    while parent[k] is not None:
        k, step = parent[k]
        steps.append(step)
    return steps[::-1]


def replay(model: HdtaModel, steps) -> ConcreteState:
    """Re-execute a concrete witness; raises if any step is not a legal move.

    Delay steps carry the valuation after the delay.  Returns the last state.
    """
    s = initial_state(model)
    if s is None:
        raise ValueError("initial valuation violates the initial invariant")
    for st in steps:
        if st.kind == "delay":
            if st.cube != s.cube:
                raise ValueError(f"delay step changes cube {s.cube!r} -> {st.cube!r}")
            ds = {st.data[c] - s.valuation[c] for c in model.clocks}
            if len(ds) > 1:
                raise ValueError(f"delay step is not uniform: {st}")
            d = ds.pop() if ds else 0
            t = concrete_delay(model, s, d) if d >= 0 else None
        else:
            try:
                if st.kind == "start":
                    t = concrete_start(model, s, st.cube, st.index)
                elif st.kind == "finish":
                    t = concrete_finish(model, s, st.index)
                else:
                    raise ValueError(f"unknown step kind {st.kind!r}")
            except (IndexError, KeyError) as e:
                raise ValueError(f"witness step not applicable: {st}: {e}") from None
        if t is None or t.cube != st.cube or (
                isinstance(st.data, dict) and t.valuation != st.data):
            raise ValueError(f"witness step not enabled: {st}")
        s = t
    return s
