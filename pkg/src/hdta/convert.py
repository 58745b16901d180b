"""Classical timed automata and their conversions to and from 1-dimensional HDTA."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .clocks import TRUE, URGENT_CLOCK, Atom, Constraint
from .errors import HdtaError, ModelError
from .model import HdtaModel
from .precubical import Cube, terminated_event
from .semantics import ReachResult, Stats, Step
from .zones import Zone, max_constants

TAU = "__tau"


@dataclass(frozen=True)
class Edge:
    name: str
    source: str
    target: str
    guard: Constraint = TRUE
    action: str = TAU
    resets: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "resets", frozenset(self.resets))


@dataclass
class TimedAutomaton:
    clocks: tuple
    locations: tuple
    initial: str
    finals: frozenset = frozenset()
    invariants: dict = field(default_factory=dict)
    edges: tuple = ()

    def __post_init__(self):
        self.clocks = tuple(self.clocks)
        self.locations = tuple(self.locations)
        self.finals = frozenset(self.finals)
        self.edges = tuple(self.edges)
        self.invariants = {q: self.invariants.get(q, TRUE) for q in self.locations}

    def validate(self) -> list:
        out = []
        locs = set(self.locations)
        clocks = set(self.clocks)
        if len(locs) != len(self.locations):
            out.append("duplicate location")
        if self.initial not in locs:
            out.append(f"initial location {self.initial!r} undeclared")
        out += [f"final location {q!r} undeclared" for q in sorted(self.finals - locs)]
        names = set()
        for e in self.edges:
            if e.name in names or e.name in locs:
                out.append(f"edge name {e.name!r} is not unique")
            names.add(e.name)
            for q in (e.source, e.target):
                if q not in locs:
                    out.append(f"edge {e.name!r}: undeclared location {q!r}")
            bad = (e.guard.clocks() | e.resets) - clocks
            if bad:
                out.append(f"edge {e.name!r}: undeclared clock(s) {sorted(bad)}")
            if not e.guard.is_simple:
                out.append(f"edge {e.name!r}: difference atom in guard")
        for q, phi in self.invariants.items():
            bad = phi.clocks() - clocks
            if bad:
                out.append(f"location {q!r}: undeclared clock(s) {sorted(bad)}")
            if not phi.is_simple:
                out.append(f"location {q!r}: difference atom in invariant")
        return out

    def max_constants(self) -> dict:
        return max_constants(list(self.invariants.values()) + [e.guard for e in self.edges],
                             self.clocks)


def ta_to_1dta(ta: TimedAutomaton) -> HdtaModel:
    """Locations become 0-cubes, edges 1-cubes; a fresh clock makes edges instantaneous.

    Every 0-cube resets the fresh clock on exit and every 1-cube requires it
    to be 0, so no time passes inside an edge.
    """
    if URGENT_CLOCK in ta.clocks:
        raise HdtaError(f"clock name {URGENT_CLOCK!r} is reserved")
    problems = ta.validate()
    if problems:
        raise ModelError(problems)
    urgent = Constraint([Atom(URGENT_CLOCK, None, "<=", 0)])
    cubes, inv, exit = [], {}, {}
    for q in ta.locations:
        cubes.append(Cube(q, 0))
        inv[q] = ta.invariants[q]
        exit[q] = {URGENT_CLOCK}
    for e in ta.edges:
        cubes.append(Cube(e.name, 1, (e.source,), (e.target,), (e.action,)))
        inv[e.name] = e.guard & urgent
        exit[e.name] = e.resets
    return HdtaModel.build(cubes, ta.initial, ta.finals, ta.clocks + (URGENT_CLOCK,), inv, exit)


def hdta_to_ta(model: HdtaModel) -> TimedAutomaton:
    """Every cube becomes a location; start and finish steps become edges.

    Entering a cube from its k-th lower face is a silent edge resetting the
    face's exit set; leaving through the k-th upper face carries the
    terminated event and resets the cube's exit set.  Linear in the size of
    the model.
    """
    edges = []
    for c in model.space:
        for k in range(1, c.dim + 1):
            lo, hi = c.face(k, 0), c.face(k, 1)
            edges.append(Edge(f"{c.name}:s{k}", lo, c.name, TRUE, TAU, model.exit[lo]))
            edges.append(Edge(f"{c.name}:f{k}", c.name, hi, TRUE,
                              terminated_event(model.space, c, k), model.exit[c.name]))
    return TimedAutomaton(model.clocks, tuple(model.space.cubes), model.initial,
                          model.finals, dict(model.inv), tuple(edges))


def one_dta_to_ta(model: HdtaModel) -> TimedAutomaton:
    high = sorted(c.name for c in model.space if c.dim > 1)
    if high:
        raise HdtaError(f"model is not 1-dimensional: {high[:5]}")
    return hdta_to_ta(model)


def ta_zone_reach(ta: TimedAutomaton, subsumption=True) -> ReachResult:
    """Classical zone-based reachability for a timed automaton."""
    clocks = ta.clocks
    k = ta.max_constants()
    universe = Zone.universe(clocks)
    inv = {q: universe.intersect(phi) for q, phi in ta.invariants.items()}
    guard = {e.name: universe.intersect(e.guard) for e in ta.edges}
    out = {}
    for e in ta.edges:
        out.setdefault(e.source, []).append(e)
    stats = Stats()

    z0 = Zone.zero(clocks).intersect(inv[ta.initial])
    if z0.empty:
        return ReachResult(False, None, stats)
    z0 = z0.up().intersect(inv[ta.initial]).normalize(k)
    passed = {ta.initial: [z0]}
    parent = {(ta.initial, z0): None}
    waiting = deque([(ta.initial, z0)])
    while waiting:
        stats.peak_waiting = max(stats.peak_waiting, len(waiting))
        q, z = waiting.popleft()
        stats.explored += 1
        if q in ta.finals:
            steps = []
            node = (q, z)
            while parent[node] is not None:
                node, st = parent[node]
                steps.append(st)
            return ReachResult(True, steps[::-1], stats)
        for e in out.get(q, ()):
            t = z.intersect(guard[e.name])
            if t.empty:
                continue
            t = t.reset(e.resets).intersect(inv[e.target])
            if t.empty:
                continue
            t = t.up().intersect(inv[e.target]).normalize(k)
            seen = passed.setdefault(e.target, [])
            if any((w.includes(t) if subsumption else w == t) for w in seen):
                stats.subsumed += 1
                continue
            seen.append(t)
            parent[(e.target, t)] = ((q, z), Step("edge", 0, e.target, t))
            waiting.append((e.target, t))
    return ReachResult(False, None, stats)


def product_ta(automata: Iterable[TimedAutomaton], sep="|") -> TimedAutomaton:
    """Interleaving (asynchronous) product: each edge moves one component."""
    automata = list(automata)
    clocks = tuple(c for a in automata for c in a.clocks)
    if len(set(clocks)) != len(clocks):
        raise HdtaError("components share clock names")
    name = sep.join

    locs, invs, edges = [], {}, []
    start = tuple(a.initial for a in automata)
    seen = {start}
    queue = deque([start])
    outgoing = [{} for _ in automata]
    for i, a in enumerate(automata):
        for e in a.edges:
            outgoing[i].setdefault(e.source, []).append(e)
    while queue:
        tup = queue.popleft()
        locs.append(name(tup))
        phi = TRUE
        for a, q in zip(automata, tup):
            phi = phi & a.invariants[q]
        invs[name(tup)] = phi
        for i, q in enumerate(tup):
            for e in outgoing[i].get(q, ()):
                nxt = tup[:i] + (e.target,) + tup[i + 1:]
                edges.append(Edge(f"{name(tup)}/{e.name}", name(tup), name(nxt),
                                  e.guard, e.action, e.resets))
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
    finals = {name(t) for t in map(tuple, _tuples(locs, sep))
              if all(q in a.finals for a, q in zip(automata, t))}
    return TimedAutomaton(clocks, tuple(locs), name(start), frozenset(finals), invs, tuple(edges))


def _tuples(locs, sep):
    return (loc.split(sep) for loc in locs)


def rename_ta(ta: TimedAutomaton, mapping: Mapping[str, str]) -> TimedAutomaton:
    return TimedAutomaton(
        tuple(mapping.get(c, c) for c in ta.clocks), ta.locations, ta.initial, ta.finals,
        {q: phi.rename(mapping) for q, phi in ta.invariants.items()},
        tuple(Edge(e.name, e.source, e.target, e.guard.rename(mapping), e.action,
                   frozenset(mapping.get(c, c) for c in e.resets)) for e in ta.edges))
