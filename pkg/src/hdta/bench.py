"""Milner's round-robin scheduler as a benchmark family.

Only the structure of a node is fixed by the usual description (work and
token passing are independent; work takes between ``d`` and ``D``), so the
guards here are a reconstruction.  One round of the ring is modelled:

* node i owns clock ``t_i``, never reset, so every clock shows global time;
* the token reaches node i at ``i*d``; from then on it may work (``w_i``) and
  pass the token on (``p_i``), independently of each other;
* work terminates within ``[i*d + d, i*d + D]``, passing by ``(i+1)*d``.

In the HDTA variant work and pass form a genuine square and nodes are
composed by tensor product, without synchronisation.  The interleaved
variant is the same system with every start and finish of an event turned
into an instantaneous transition: the product is flattened into a timed
automaton and converted back into a 1-dimensional HDTA.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .clocks import Atom, Constraint
from .compose import tensor_all
from .convert import hdta_to_ta, ta_to_1dta
from .errors import HdtaError
from .model import HdtaModel
from .precubical import MAX_DIM, Cube
from .zonegraph import zone_graph


@dataclass(frozen=True)
class BenchSpec:
    n: int
    d: int = 4
    D: int = 30

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one node")
        if not 0 <= self.d <= self.D:
            raise ValueError("need 0 <= d <= D")
        if 2 * self.n > MAX_DIM:
            raise HdtaError(f"{self.n} nodes give dimension {2 * self.n} > {MAX_DIM}")


def milner_node(i: int, d: int, D: int) -> HdtaModel:
    """Node i of a single round of the ring.

    The token reaches node i at time ``i*d``.  Its clock is never reset, so
    all node clocks show global time.  Work ``w_i`` may start once the token
    is there and terminates within ``[i*d + d, i*d + D]``; passing the token
    on (``p_i``) terminates by ``(i+1)*d``.
    """
    t = f"t{i}"
    arrive, lo, hi = i * d, i * d + d, i * d + D

    def atoms(*spec):
        return Constraint([Atom(t, None, op, k) for op, k in spec])

    # corners: B start, W work done, P token passed, T both done
    B, W, P, T = (f"{c}{i}" for c in "BWPT")
    w, p = f"w{i}", f"p{i}"
    cubes = [
        Cube(B, 0), Cube(W, 0), Cube(P, 0), Cube(T, 0),
        Cube(f"work{i}", 1, [B], [W], [w]),
        Cube(f"pass{i}", 1, [B], [P], [p]),
        Cube(f"work{i}'", 1, [P], [T], [w]),
        Cube(f"pass{i}'", 1, [W], [T], [p]),
        Cube(f"sq{i}", 2, [f"pass{i}", f"work{i}"], [f"pass{i}'", f"work{i}'"], [w, p]),
    ]
    inv = {
        B: atoms(("<=", arrive + d)),
        W: atoms((">=", lo), ("<=", arrive + d)),
        P: atoms(("<=", hi)),
        T: atoms((">=", lo)),
        f"work{i}": atoms((">=", arrive), ("<=", arrive + d)),
        f"pass{i}": atoms((">=", arrive), ("<=", arrive + d)),
        f"work{i}'": atoms((">=", arrive), ("<=", hi)),
        f"pass{i}'": atoms((">=", lo), ("<=", arrive + d)),
        f"sq{i}": atoms((">=", arrive), ("<=", arrive + d)),
    }
    return HdtaModel.build(cubes, B, [T], [t], inv)


def gen_milner(spec: BenchSpec):
    """``(hdta, interleaved)`` for the given spec."""
    nodes = [milner_node(i, spec.d, spec.D) for i in range(spec.n)]
    hdta = tensor_all(nodes)
    return hdta, interleave(hdta)


def interleave(model: HdtaModel) -> HdtaModel:
    return ta_to_1dta(hdta_to_ta(model))


def measure(model: HdtaModel):
    t = time.perf_counter()
    g = zone_graph(model)
    return g.stats.explored, time.perf_counter() - t


def growth_table(ns, d=4, D=30, budget=None):
    """Rows ``(n, hdta_states, interleaved_states, ratio, seconds)``."""
    rows = []
    start = time.perf_counter()
    for n in ns:
        h, i = gen_milner(BenchSpec(n, d, D))
        hs, ht = measure(h)
        is_, it = measure(i)
        rows.append((n, hs, is_, hs / is_, ht + it))
        if budget is not None and time.perf_counter() - start > budget:
            break
    return rows
