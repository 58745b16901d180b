"""Tensor product of HDTA and an isomorphism checker for small models."""

from __future__ import annotations

import sys
from collections import deque
from functools import reduce

from .errors import HdtaError
from .model import HdtaModel, check_model
from .precubical import Cube
from .zones import Zone


def product_id(left: str, right: str) -> str:
    return f"({left}*{right})"


def rename_clocks(model: HdtaModel, prefix: str) -> HdtaModel:
    mapping = {c: prefix + c for c in model.clocks}
    return HdtaModel(model.hda, [mapping[c] for c in model.clocks],
                     {x: phi.rename(mapping) for x, phi in model.inv.items()},
                     {x: {mapping[c] for c in r} for x, r in model.exit.items()})


def tensor(a: HdtaModel, b: HdtaModel, rename: bool = False) -> HdtaModel:
    """Parallel composition: every pair of cubes becomes a cube.

    The faces of ``(x, y)`` with index ``i <= dim x`` come from ``x``, the
    rest from ``y``.  Labels add as multisets, invariants are conjoined and
    exit sets united.  Clocks of the two factors must be disjoint unless
    ``rename`` is set, in which case they are prefixed ``l.`` and ``r.``.
    """
    shared = set(a.clocks) & set(b.clocks)
    if shared:
        if not rename:
            raise HdtaError(f"factors share clock(s) {sorted(shared)}; enable renaming")
        a, b = rename_clocks(a, "l."), rename_clocks(b, "r.")
    cubes, inv, exit = [], {}, {}
    for x in a.space:
        for y in b.space:
            name = product_id(x.name, y.name)
            lower = [product_id(f, y.name) for f in x.lower] + \
                    [product_id(x.name, f) for f in y.lower]
            upper = [product_id(f, y.name) for f in x.upper] + \
                     [product_id(x.name, f) for f in y.upper]
            cubes.append(Cube(name, x.dim + y.dim, lower, upper, x.label + y.label))
            inv[name] = a.inv[x.name] & b.inv[y.name]
            exit[name] = a.exit[x.name] | b.exit[y.name]
    finals = {product_id(p, q) for p in a.finals for q in b.finals}
    out = HdtaModel.build(cubes, product_id(a.initial, b.initial), finals,
                          a.clocks + b.clocks, inv, exit)
    return check_model(out)


def tensor_all(models) -> HdtaModel:
    return reduce(tensor, models)


def unit_model() -> HdtaModel:
    """One 0-cube, initial and final, ``true`` invariant: the unit of the tensor."""
    return HdtaModel.build([Cube("1", 0)], "1", {"1"}, ())


def _signatures(model: HdtaModel, clocks) -> dict:
    universe = Zone.universe(clocks)
    out = {}
    for c in model.space:
        out[c.name] = (c.dim, c.label, universe.intersect(model.inv[c.name]),
                       model.exit[c.name], c.name == model.initial,
                       c.name in model.finals)
    return out


def iso_check(a: HdtaModel, b: HdtaModel) -> dict | None:
    """A cube bijection preserving faces, labels, invariants and exit sets.

    Clocks are matched by name; invariants are compared as sets of
    valuations.  Returns the mapping from cubes of ``a`` to cubes of ``b`` or
    None.  Backtracking, meant for models of up to a few hundred cubes.
    """
    if set(a.clocks) != set(b.clocks) or len(a.space) != len(b.space):
        return None
    clocks = tuple(sorted(a.clocks))
    sa, sb = _signatures(a, clocks), _signatures(b, clocks)
    if sorted(map(_key, sa.values())) != sorted(map(_key, sb.values())):
        return None

    # visit cubes of ``a`` so that each one (after the first of its
    # component) is adjacent to an already placed cube
    order, seen = [], set()
    starts = [a.initial] + sorted(a.space.cubes, key=lambda n: (a.space[n].dim, n))
    for s in starts:
        if s in seen:
            continue
        seen.add(s)
        queue = deque([s])
        while queue:
            x = queue.popleft()
            order.append(x)
            cube = a.space[x]
            for y in list(cube.lower) + list(cube.upper) + [l for l, _ in a.cofaces[x]]:
                if y not in seen:
                    seen.add(y)
                    queue.append(y)

    by_sig = {}
    for y, sig in sb.items():
        by_sig.setdefault(sig, []).append(y)
    f, used = {}, set()

    def candidates(x):
        cube = a.space[x]
        for k in range(1, cube.dim + 1):
            for nu in (0, 1):
                g = cube.face(k, nu)
                if g in f:
                    # y must be a coface of f(g) at index k
                    if nu == 0:
                        return [l for l, j in b.cofaces[f[g]] if j == k]
                    return [c.name for c in b.space
                            if c.dim == cube.dim and c.face(k, 1) == f[g]]
        for l, k in a.cofaces[x]:
            if l in f:
                return [b.space[f[l]].face(k, 0)]
        for c in a.space:
            for k in range(1, c.dim + 1):
                if c.face(k, 1) == x and c.name in f:
                    return [b.space[f[c.name]].face(k, 1)]
        return by_sig.get(sa[x], [])

    def consistent(x, y):
        if y in used or sb[y] != sa[x]:
            return False
        cx, cy = a.space[x], b.space[y]
        for k in range(1, cx.dim + 1):
            for nu in (0, 1):
                g = cx.face(k, nu)
                if g in f and f[g] != cy.face(k, nu):
                    return False
        for c in a.space:
            if c.name in f:
                cb = b.space[f[c.name]]
                for k in range(1, c.dim + 1):
                    for nu in (0, 1):
                        if c.face(k, nu) == x and cb.face(k, nu) != y:
                            return False
        return True

    def search(i):
        if i == len(order):
            return True
        x = order[i]
        for y in candidates(x):
            if consistent(x, y):
                f[x] = y
                used.add(y)
                if search(i + 1):
                    return True
                del f[x]
                used.discard(y)
        return False

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, len(order) + 100))
    try:
        return dict(f) if search(0) else None
    finally:
        sys.setrecursionlimit(limit)


def _key(sig):
    dim, label, zone, exit, init, final = sig
    return (dim, label, str(zone), tuple(sorted(exit)), init, final)
