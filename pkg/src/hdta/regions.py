"""Alur-Dill regions and the region-graph reachability oracle.

The oracle is deliberately independent of the zone engine: it works on
concrete representative valuations and the descriptor definition only.
Representatives are kept as integers in units of ``1/L`` with
``L = 2 * (|C| + 1)``: fractional parts ``g / (|C| + 1)`` for the g-th
fraction class leave room for the half-step used by the time successor.
"""

from __future__ import annotations

import math
from collections import deque
from fractions import Fraction
from itertools import permutations, product
from typing import Mapping, NamedTuple, Sequence

from .model import HdtaModel
from .semantics import ReachResult, Stats, Step


class Region(NamedTuple):
    ints: tuple        # integer part, capped at cmax
    overflow: tuple    # v(c) > cmax
    zero: tuple        # fractional part is 0 (False when overflowed)
    order: tuple       # classes of clock indices with equal nonzero fraction, increasing


def region_of(v: Mapping[str, object], cmax: int, clocks: Sequence[str] | None = None) -> Region:
    clocks = tuple(sorted(v)) if clocks is None else tuple(clocks)
    ints, over, zero, fracs = [], [], [], {}
    for i, c in enumerate(clocks):
        x = Fraction(v[c])
        if x > cmax:
            ints.append(cmax)
            over.append(True)
            zero.append(False)
            continue
        n = math.floor(x)
        f = x - n
        ints.append(n)
        over.append(False)
        zero.append(f == 0)
        if f:
            fracs.setdefault(f, []).append(i)
    order = tuple(tuple(fracs[f]) for f in sorted(fracs))
    return Region(tuple(ints), tuple(over), tuple(zero), order)


class _Scaled:
    """Integer arithmetic on representatives for a fixed clock set and cmax."""

    def __init__(self, clocks, cmax):
        self.clocks = tuple(clocks)
        self.cmax = cmax
        self.L = 2 * (len(self.clocks) + 1)

    def region(self, v) -> Region:
        L, cmax = self.L, self.cmax
        ints, over, zero, fracs = [], [], [], {}
        for i, x in enumerate(v):
            if x > cmax * L:
                ints.append(cmax)
                over.append(True)
                zero.append(False)
                continue
            n, f = divmod(x, L)
            ints.append(n)
            over.append(False)
            zero.append(f == 0)
            if f:
                fracs.setdefault(f, []).append(i)
        order = tuple(tuple(fracs[f]) for f in sorted(fracs))
        return Region(tuple(ints), tuple(over), tuple(zero), order)

    def rep(self, r: Region) -> tuple:
        L = self.L
        v = [0] * len(self.clocks)
        for i in range(len(v)):
            v[i] = (self.cmax + 1) * L if r.overflow[i] else r.ints[i] * L
        for g, cls in enumerate(r.order, 1):
            for i in cls:
                v[i] += 2 * g
        return tuple(v)

    def time_successor(self, r: Region) -> Region | None:
        """The next region reached by letting time pass, or None if stable."""
        v = self.rep(r)
        L = self.L
        live = [i for i in range(len(v)) if not r.overflow[i]]
        if not live:
            return None
        fr = [v[i] % L for i in live]
        top = max(fr)
        if 0 in fr:
            d = (L - top) // 2 if top else L // 2
        else:
            d = L - top
        return self.region(tuple(x + d for x in v))

    def valuation(self, v) -> dict:
        return {c: Fraction(x, self.L) for c, x in zip(self.clocks, v)}

    def satisfies(self, v, phi) -> bool:
        L = self.L
        for a in phi.atoms:
            x = v[self.clocks.index(a.left)]
            if a.right is not None:
                x -= v[self.clocks.index(a.right)]
            k = a.bound * L
            op = a.op
            if op == "<=":
                ok = x <= k
            elif op == "<":
                ok = x < k
            elif op == ">=":
                ok = x >= k
            else:
                ok = x > k
            if not ok:
                return False
        return True

    def reset(self, v, clocks) -> tuple:
        if not clocks:
            return v
        idx = {self.clocks.index(c) for c in clocks}
        return tuple(0 if i in idx else x for i, x in enumerate(v))


def all_regions(clocks: Sequence[str], cmax: int):
    """Enumerate every region descriptor over ``clocks`` at bound ``cmax``."""
    n = len(clocks)
    # per clock: ("over",) | ("int", k) with zero fraction | ("frac", k) in (k, k+1)
    choices = [("over", cmax)] + [("int", k) for k in range(cmax + 1)] + \
              [("frac", k) for k in range(cmax)]
    seen = set()
    for combo in product(choices, repeat=n):
        fr = [i for i, (kind, _) in enumerate(combo) if kind == "frac"]
        for ordered in _ordered_partitions(fr):
            r = Region(tuple(k for _, k in combo),
                       tuple(kind == "over" for kind, _ in combo),
                       tuple(kind == "int" for kind, _ in combo),
                       tuple(tuple(sorted(c)) for c in ordered))
            if r not in seen:
                seen.add(r)
                yield r


def _ordered_partitions(items):
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for part in _ordered_partitions(rest):
        # put ``first`` into an existing class or as a new class at any position
        for i in range(len(part)):
            yield part[:i] + (tuple(sorted(part[i] + (first,))),) + part[i + 1:]
        for i in range(len(part) + 1):
            yield part[:i] + ((first,),) + part[i:]


def region_bound(n_clocks: int, cmax: int) -> int:
    """The classical upper bound |C|! * 2^|C| * prod_c (2 cmax + 2)."""
    return math.factorial(n_clocks) * 2 ** n_clocks * (2 * cmax + 2) ** n_clocks


def region_successors(model: HdtaModel, ops: _Scaled, cube: str, r: Region):
    v = ops.rep(r)
    nxt = ops.time_successor(r)
    if nxt is not None and nxt != r and ops.satisfies(ops.rep(nxt), model.inv[cube]):
        yield "delay", 0, cube, nxt
    w = ops.reset(v, model.exit[cube])
    for l, k in model.cofaces[cube]:
        if ops.satisfies(w, model.inv[l]):
            yield "start", k, l, ops.region(w)
    c = model.cube(cube)
    for k in range(1, c.dim + 1):
        t = c.upper[k - 1]
        if ops.satisfies(w, model.inv[t]):
            yield "finish", k, t, ops.region(w)


def region_reach(model: HdtaModel, stop_at_final: bool = True) -> ReachResult:
    """Reachability on the finite quotient by region equivalence."""
    ops = _Scaled(model.clocks, model.cmax)
    stats = Stats()
    v0 = tuple(0 for _ in model.clocks)
    if not ops.satisfies(v0, model.inv[model.initial]):
        return ReachResult(False, None, stats)
    start = (model.initial, ops.region(v0))
    parent = {start: None}
    waiting = deque([start])
    found = None
    while waiting:
        stats.peak_waiting = max(stats.peak_waiting, len(waiting))
        node = waiting.popleft()
        stats.explored += 1
        if node[0] in model.finals and found is None:
            found = node
            if stop_at_final:
                break
        for kind, k, cube, r in region_successors(model, ops, *node):
            nxt = (cube, r)
            if nxt in parent:
                stats.subsumed += 1
                continue
            parent[nxt] = (node, Step(kind, k, cube, ops.valuation(ops.rep(r))))
            waiting.append(nxt)
    if found is None:
        return ReachResult(False, None, stats)
    steps = []
    node = found
    while parent[node] is not None:
        node, st = parent[node]
        steps.append(st)
    return ReachResult(True, steps[::-1], stats)


def region_graph(model: HdtaModel):
    """All reachable ``(cube, region)`` nodes and the edges between them."""
    ops = _Scaled(model.clocks, model.cmax)
    v0 = tuple(0 for _ in model.clocks)
    if not ops.satisfies(v0, model.inv[model.initial]):
        return [], []
    start = (model.initial, ops.region(v0))
    index = {start: 0}
    nodes, edges = [start], []
    waiting = deque([start])
    while waiting:
        node = waiting.popleft()
        for kind, k, cube, r in region_successors(model, ops, *node):
            nxt = (cube, r)
            if nxt not in index:
                index[nxt] = len(nodes)
                nodes.append(nxt)
                waiting.append(nxt)
            edges.append((index[node], index[nxt], kind, k))
    return nodes, edges


def describe(r: Region, clocks: Sequence[str]) -> str:
    """Human-readable region, e.g. ``x=1, 0<y<1, frac(y)<frac(x)``."""
    parts = []
    for i, c in enumerate(clocks):
        if r.overflow[i]:
            parts.append(f"{c}>{r.ints[i]}")
        elif r.zero[i]:
            parts.append(f"{c}={r.ints[i]}")
        else:
            parts.append(f"{r.ints[i]}<{c}<{r.ints[i] + 1}")
    if len(r.order) > 1 or any(len(cls) > 1 for cls in r.order):
        chain = " < ".join("=".join(f"frac({clocks[i]})" for i in cls) for cls in r.order)
        parts.append(chain)
    return ", ".join(parts) if parts else "true"


def write_dot(model: HdtaModel, nodes, edges, out, name="regiongraph"):
    out.write(f"digraph {name} {{\n")
    out.write("  node [shape=box, fontname=monospace];\n")
    order = sorted(range(len(nodes)), key=lambda i: (nodes[i][0], i))
    for i in order:
        cube, r = nodes[i]
        out.write(f'  n{i} [label="{cube}\\n{describe(r, model.clocks)}"];\n')
    for src, dst, kind, k in sorted(edges):
        label = kind if kind == "delay" else f"{kind} {k}"
        out.write(f'  n{src} -> n{dst} [label="{label}"];\n')
    out.write("}\n")
