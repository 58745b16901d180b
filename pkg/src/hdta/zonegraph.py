"""Zone-graph reachability for HDTA.

Two successor rules are available:

``sound`` (default)
    ``Z' = ((Z[R <- 0] & inv') ^up) & inv'``.  Only valuations that satisfy
    the target invariant at the moment of entry are let through, matching the
    valuation-level semantics exactly.

``literal``
    ``Z' = (Z[R <- 0] ^up) & inv'``, the rule as usually printed.  It can
    admit entry valuations that violate ``inv'`` and later drift into it, so
    it over-approximates; it is kept to reproduce published zone graphs.

In both cases ``R`` is the exit set of the cube being left.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .clocks import zero_valuation
from .errors import HdtaError
from .model import HdtaModel
from .semantics import ReachResult, Stats, Step, replay
from .zones import Zone

RULES = ("sound", "literal")


class SymbolicState(NamedTuple):
    cube: str
    zone: Zone


class Successor(NamedTuple):
    kind: str
    index: int
    state: SymbolicState


class _Engine:
    def __init__(self, model: HdtaModel, rule="sound", normalize=True):
        if rule not in RULES:
            raise ValueError(f"unknown successor rule {rule!r}")
        self.model = model
        self.rule = rule
        self.normalize = normalize
        self.k = model.max_constants
        clocks = model.clocks
        universe = Zone.universe(clocks)
        memo = {}
        for phi in model.inv.values():
            if phi not in memo:
                memo[phi] = universe.intersect(phi)
        self.inv = {c: memo[phi] for c, phi in model.inv.items()}

    def _finish(self, z: Zone) -> Zone:
        if self.normalize and not z.empty:
            z = z.normalize(self.k)
        return z

    def enter(self, z: Zone, reset, target) -> Zone:
        inv = self.inv[target]
        z = z.reset(reset)
        if self.rule == "sound":
            z = z.intersect(inv)
        return self._finish(z.up().intersect(inv))

    def initial(self) -> SymbolicState | None:
        z0 = Zone.zero(self.model.clocks)
        l0 = self.model.initial
        inv = self.inv[l0]
        if self.rule == "sound":
            z0 = z0.intersect(inv)
        z = self._finish(z0.up().intersect(inv))
        return None if z.empty else SymbolicState(l0, z)

    def successors(self, s: SymbolicState, reverse=False):
        model = self.model
        reset = model.exit[s.cube]
        out = []
        for l, k in model.cofaces[s.cube]:
            z = self.enter(s.zone, reset, l)
            if not z.empty:
                out.append(Successor("start", k, SymbolicState(l, z)))
        cube = model.cube(s.cube)
        for k in range(1, cube.dim + 1):
            t = cube.upper[k - 1]
            z = self.enter(s.zone, reset, t)
            if not z.empty:
                out.append(Successor("finish", k, SymbolicState(t, z)))
        if reverse:
            out.reverse()
        return out


def initial_symbolic_state(model: HdtaModel, rule="sound") -> SymbolicState | None:
    return _Engine(model, rule).initial()


def zone_successors(model: HdtaModel, s: SymbolicState, rule="sound") -> list:
    """Normalized start and finish successors of ``s``; empty zones are dropped."""
    return _Engine(model, rule).successors(s)


@dataclass
class Node:
    id: int
    state: SymbolicState
    parent: int | None
    via: tuple | None  # (kind, index) of the step from the parent


class Exploration:
    """FIFO waiting list, passed list with inclusion subsumption."""

    def __init__(self, model: HdtaModel, rule="sound", subsumption=True,
                 reverse=False, trace=None):
        self.model = model
        self.engine = _Engine(model, rule)
        self.subsumption = subsumption
        self.reverse = reverse
        self.trace = trace
        self.nodes: list[Node] = []
        self.edges: list[tuple] = []  # (src, dst, kind, index, covered)
        self.stats = Stats()
        self._passed: dict[str, list[int]] = {}

    def _covering(self, s: SymbolicState):
        for i in self._passed.get(s.cube, ()):
            z = self.nodes[i].state.zone
            if (z.includes(s.zone) if self.subsumption else z == s.zone):
                return i
        return None

    def _add(self, s, parent, via):
        node = Node(len(self.nodes), s, parent, via)
        self.nodes.append(node)
        self._passed.setdefault(s.cube, []).append(node.id)
        if self.trace is not None:
            self.trace.write(json.dumps({
                "id": node.id, "cube": s.cube, "zone": str(s.zone),
                "parent": parent, "via": None if via is None else f"{via[0]} {via[1]}",
            }) + "\n")
        return node

    def run(self, stop_at_final=True) -> Node | None:
        s0 = self.engine.initial()
        if s0 is None:
            return None
        root = self._add(s0, None, None)
        waiting = deque([root])
        finals = self.model.finals
        found = None
        while waiting:
            self.stats.peak_waiting = max(self.stats.peak_waiting, len(waiting))
            node = waiting.popleft()
            self.stats.explored += 1
            if node.state.cube in finals and found is None:
                found = node
                if stop_at_final:
                    break
            for kind, k, t in self.engine.successors(node.state, self.reverse):
                cover = self._covering(t)
                if cover is not None:
                    self.stats.subsumed += 1
                    self.edges.append((node.id, cover, kind, k, True))
                    continue
                new = self._add(t, node.id, (kind, k))
                self.edges.append((node.id, new.id, kind, k, False))
                waiting.append(new)
        return found

    def path_to(self, node: Node) -> list[Node]:
        path = [node]
        while path[-1].parent is not None:
            path.append(self.nodes[path[-1].parent])
        return path[::-1]


def zone_reach(model: HdtaModel, rule="sound", subsumption=True, witness=True,
               trace=None) -> ReachResult:
    ex = Exploration(model, rule, subsumption, trace=trace)
    found = ex.run(stop_at_final=True)
    if found is None:
        return ReachResult(False, None, ex.stats)
    steps = None
    if witness:
        path = ex.path_to(found)
        steps = concretize(model, path) if rule == "sound" else symbolic_steps(path)
    return ReachResult(True, steps, ex.stats)


def symbolic_steps(path) -> list:
    return [Step(n.via[0], n.via[1], n.state.cube, n.state.zone) for n in path[1:]]


class ZoneGraph(NamedTuple):
    nodes: list   # Node, in discovery order
    edges: list   # (src, dst, kind, index, covered)
    stats: Stats


def zone_graph(model: HdtaModel, rule="sound", reverse=False, subsumption=True) -> ZoneGraph:
    """The full normalized zone graph (exploration does not stop at finals).

    Without subsumption the node set does not depend on the exploration
    order.  With it, only the per-cube unions of zones are order-independent:
    a small zone found before a larger one at the same cube is kept.
    """
    ex = Exploration(model, rule, subsumption=subsumption, reverse=reverse)
    ex.run(stop_at_final=False)
    return ZoneGraph(ex.nodes, ex.edges, ex.stats)


# --------------------------------------------------------------------------
# witness concretization
#
# The symbolic path is re-run without normalization, giving exact zones.  A
# concrete run is then built backwards: pick a point in the last zone, and for
# each step recover the entry point and delay, then a point in the previous
# zone that resets to it.  Finally the run is replayed on the concrete
# semantics, so a reported witness is always a real run.

_INF = (float("inf"), 1)


def _fraction_dbm(z: Zone):
    n = z.n
    m = []
    for b in z.m:
        if b == (1 << 62):
            m.append(_INF)
        else:
            m.append((Fraction(b >> 1), b & 1))
    return [m[i * n:(i + 1) * n] for i in range(n)]


def _fclose(m):
    n = len(m)
    for k in range(n):
        for i in range(n):
            ik = m[i][k]
            if ik[0] == float("inf"):
                continue
            for j in range(n):
                kj = m[k][j]
                c = (ik[0] + kj[0], min(ik[1], kj[1]))
                if c < m[i][j]:
                    m[i][j] = c
    return all(m[i][i] >= (0, 1) for i in range(n))


def _pick_in(z: Zone, fixed: dict) -> dict | None:
    """A point of ``z`` agreeing with ``fixed`` on its keys, or None."""
    m = _fraction_dbm(z)
    idx = {c: i + 1 for i, c in enumerate(z.clocks)}

    def pin(i, val):
        m[i][0] = min(m[i][0], (val, 1))
        m[0][i] = min(m[0][i], (-val, 1))

    for c, val in fixed.items():
        pin(idx[c], Fraction(val))
    if not _fclose(m):
        return None
    out = dict(fixed)
    for c in z.clocks:
        if c in fixed:
            continue
        i = idx[c]
        lo, lo_ns = -m[0][i][0], m[0][i][1]
        hi, hi_ns = m[i][0]
        if lo_ns:
            val = lo
        elif hi == float("inf"):
            val = lo + Fraction(1, 2)
        else:
            val = (lo + hi) / 2
        out[c] = val
        pin(i, val)
        if not _fclose(m):
            return None
    return {c: Fraction(out[c]) for c in z.clocks}


def _back_delay(zprev: Zone, u: dict) -> Fraction | None:
    """Largest-freedom delay d >= 0 with ``u - d`` in ``zprev``."""
    lo, hi = (Fraction(0), 1), _INF
    for i, c in enumerate(zprev.clocks, 1):
        b = zprev.bound_of(i, 0)      # c - d <= k  ->  d >= c - k
        if b is not None:
            k, strict = b
            lo = max(lo, (u[c] - k, 0 if strict else 1), key=lambda t: (t[0], -t[1]))
        b = zprev.bound_of(0, i)      # d - c <= k  ->  d <= c + k
        if b is not None:
            k, strict = b
            hi = min(hi, (u[c] + k, 0 if strict else 1))
    if lo[1]:
        d = lo[0]
    elif hi[0] == float("inf"):
        d = lo[0] + Fraction(1, 2)
    else:
        d = (lo[0] + hi[0]) / 2
    if d < lo[0] or (d == lo[0] and not lo[1]) or (hi[0] != float("inf") and (
            d > hi[0] or (d == hi[0] and not hi[1]))):
        return None
    return d


def concretize(model: HdtaModel, path: list[Node]) -> list:
    engine = _Engine(model, "sound", normalize=False)
    s = engine.initial()
    exact = [s.zone]
    for node in path[1:]:
        reset = model.exit[s.cube]
        z = engine.enter(s.zone, reset, node.state.cube)
        if z.empty:
            raise HdtaError("symbolic witness does not survive exact replay")
        s = SymbolicState(node.state.cube, z)
        exact.append(z)

    u = _pick_in(exact[-1], {})
    points = [u]          # point after the delay in each cube
    entries = [None]      # entry point after each step
    for i in range(len(path) - 1, 0, -1):
        prev_cube = path[i - 1].state.cube
        cube = path[i].state.cube
        reset = model.exit[prev_cube]
        if reset:
            d = u[next(iter(reset))]
        else:
            d = _back_delay(exact[i - 1].intersect(engine.inv[cube]), u)
            if d is None:
                raise HdtaError("could not recover a concrete delay")
        entry = {c: x - d for c, x in u.items()}
        prev = _pick_in(exact[i - 1], {c: x for c, x in entry.items() if c not in reset})
        if prev is None:
            raise HdtaError("could not recover a concrete predecessor")
        entries.insert(1, entry)
        points.insert(0, prev)
        u = prev
    steps = []
    v0 = zero_valuation(model.clocks)
    if points[0] != v0:
        steps.append(Step("delay", 0, path[0].state.cube, points[0]))
    for i in range(1, len(path)):
        kind, k = path[i].via
        cube = path[i].state.cube
        steps.append(Step(kind, k, cube, entries[i]))
        if points[i] != entries[i]:
            steps.append(Step("delay", 0, cube, points[i]))
    replay(model, steps)
    return steps


def write_dot(graph: ZoneGraph, out, name="zonegraph"):
    """Deterministic DOT text; nodes ordered by (cube, discovery index)."""
    out.write(f"digraph {name} {{\n")
    out.write("  node [shape=box, fontname=monospace];\n")
    for node in sorted(graph.nodes, key=lambda n: (n.state.cube, n.id)):
        label = f"{node.state.cube}\\n{node.state.zone}"
        out.write(f'  n{node.id} [label="{label}"];\n')
    for src, dst, kind, k, covered in sorted(graph.edges):
        style = ", style=dashed" if covered else ""
        out.write(f'  n{src} -> n{dst} [label="{kind} {k}"{style}];\n')
    out.write("}\n")
