"""Difference-bound matrices.

Entry ``D[i][j]`` bounds ``c_i - c_j`` where index 0 is the constant-zero
reference clock.  A bound ``(k, <=)`` is stored as the integer ``2k + 1`` and
``(k, <)`` as ``2k``; integer order on the encoding is tightness order, and
``INF`` stands for "no bound".
"""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

from .clocks import Atom, Constraint
from .errors import ModelError

INF = 1 << 62
LE0 = 1  # (0, <=)
LT0 = 0  # (0, <)
_LIMIT = 1 << 60


def bound(value: int, strict: bool) -> int:
    if abs(value) >= _LIMIT >> 2:
        raise ModelError([f"clock constant {value} out of range"])
    return 2 * value + (0 if strict else 1)


def add(a: int, b: int) -> int:
    if a == INF or b == INF:
        return INF
    r = (a & ~1) + (b & ~1) | (a & b & 1)
    if abs(r) >= _LIMIT:
        raise ModelError(["bound arithmetic overflow"])
    return r


def decode(b: int):
    """``(value, strict)`` for a finite bound, ``None`` for INF."""
    if b == INF:
        return None
    return b >> 1, not (b & 1)


class Zone:
    """Immutable DBM over a fixed tuple of clock names.

    Every zone produced by the public constructors and operations is
    canonical (shortest-path closed).  The empty zone has one representative
    per clock tuple, so ``==`` is set equality.
    """

    __slots__ = ("clocks", "n", "m", "empty", "_hash")

    def __init__(self, clocks: Sequence[str], matrix: Sequence[int], empty=False):
        self.clocks = tuple(clocks)
        self.n = len(self.clocks) + 1
        self.m = tuple(matrix)
        self.empty = empty
        self._hash = None

    # constructors ---------------------------------------------------------

    @classmethod
    def universe(cls, clocks):
        n = len(clocks) + 1
        m = [INF] * (n * n)
        for j in range(n):
            m[j] = LE0  # 0 - c_j <= 0
            m[j * n + j] = LE0
        return cls(clocks, m)

    @classmethod
    def zero(cls, clocks):
        n = len(clocks) + 1
        return cls(clocks, [LE0] * (n * n))

    @classmethod
    def empty_zone(cls, clocks):
        n = len(clocks) + 1
        return cls(clocks, [LT0] * (n * n), empty=True)

    @classmethod
    def from_constraint(cls, clocks, phi: Constraint):
        return cls.universe(clocks).intersect(phi)

    @classmethod
    def from_raw(cls, clocks, matrix):
        """Build from an arbitrary (possibly unclosed) matrix and close it."""
        m = list(matrix)
        n = len(clocks) + 1
        if not _close(m, n):
            return cls.empty_zone(clocks)
        return cls(clocks, m)

    # inspection -----------------------------------------------------------

    def index(self, clock: str) -> int:
        try:
            return self.clocks.index(clock) + 1
        except ValueError:
            raise ModelError([f"unknown clock {clock!r}"]) from None

    def get(self, i: int, j: int) -> int:
        return self.m[i * self.n + j]

    def bound_of(self, i: int, j: int):
        return decode(self.get(i, j))

    def is_empty(self):
        return self.empty

    def contains(self, v: Mapping[str, object]) -> bool:
        if self.empty:
            return False
        vals = [0] + [v[c] for c in self.clocks]
        n = self.n
        for i in range(n):
            for j in range(n):
                b = self.m[i * n + j]
                if b == INF:
                    continue
                diff = vals[i] - vals[j]
                k = b >> 1
                if b & 1:
                    if diff > k:
                        return False
                elif diff >= k:
                    return False
        return True

    def __eq__(self, other):
        return (isinstance(other, Zone) and self.clocks == other.clocks
                and self.m == other.m and self.empty == other.empty)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.clocks, self.m, self.empty))
        return self._hash

    def __repr__(self):
        return f"Zone({str(self)!r})"

    def __str__(self):
        if self.empty:
            return "false"
        atoms = self.atoms()
        return " & ".join(str(a) for a in atoms) if atoms else "true"

    # operations -----------------------------------------------------------

    def up(self) -> Zone:
        """Delay closure: drop the upper bounds of individual clocks."""
        if self.empty:
            return self
        m = list(self.m)
        n = self.n
        for i in range(1, n):
            m[i * n] = INF
        return Zone(self.clocks, m)

    def reset(self, clocks: Iterable[str]) -> Zone:
        idx = [self.index(c) for c in clocks]
        if self.empty or not idx:
            return self
        m = list(self.m)
        n = self.n
        for x in idx:
            for j in range(n):
                m[x * n + j] = m[j]          # c_x - c_j := 0 - c_j
                m[j * n + x] = m[j * n]      # c_j - c_x := c_j - 0
            m[x * n + x] = LE0
        return Zone(self.clocks, m)

    def constrain(self, i: int, j: int, b: int) -> Zone:
        """Intersect with ``c_i - c_j <= b`` (encoded) and re-close in O(n^2)."""
        if self.empty:
            return self
        n = self.n
        m = self.m
        if b >= m[i * n + j]:
            return self
        if add(m[j * n + i], b) < LE0:
            return Zone.empty_zone(self.clocks)
        m = list(m)
        _tighten(m, n, i, j, b)
        return Zone(self.clocks, m)

    def intersect(self, phi) -> Zone:
        """Intersect with a constraint or another zone over the same clocks."""
        if isinstance(phi, Zone):
            return self._intersect_zone(phi)
        z = self
        for a in phi.atoms:
            if z.empty:
                break
            i, j, b = _atom_entry(z, a)
            z = z.constrain(i, j, b)
        return z

    def _intersect_zone(self, other: Zone) -> Zone:
        if self.empty or other.empty:
            return Zone.empty_zone(self.clocks)
        return Zone.from_raw(self.clocks, map(min, self.m, other.m))

    def includes(self, other: Zone) -> bool:
        """True iff ``other`` is a subset of ``self``."""
        if other.empty:
            return True
        if self.empty:
            return False
        return all(a >= b for a, b in zip(self.m, other.m))

    def normalize(self, k: Mapping[str, int]) -> Zone:
        """Classical k-normalization: coarsen bounds beyond the maximal constants."""
        if self.empty:
            return self
        n = self.n
        ks = [0] + [k.get(c, 0) for c in self.clocks]
        m = list(self.m)
        changed = False
        for i in range(n):
            upper = 2 * ks[i] + 1
            for j in range(n):
                if i == j:
                    continue
                b = m[i * n + j]
                if b == INF:
                    continue
                if b > upper:
                    m[i * n + j] = INF
                    changed = True
                else:
                    lower = -2 * ks[j]
                    if b < lower:
                        m[i * n + j] = lower
                        changed = True
        if not changed:
            return self
        return Zone.from_raw(self.clocks, m)

    def hull(self, other: Zone) -> Zone:
        """Smallest zone containing both (entrywise max)."""
        if self.empty:
            return other
        if other.empty:
            return self
        return Zone(self.clocks, map(max, self.m, other.m))

    # rendering ------------------------------------------------------------

    def _entry_atom(self, i: int, j: int) -> Atom:
        value, strict = decode(self.get(i, j))
        if j == 0:
            return Atom(self.clocks[i - 1], None, "<" if strict else "<=", value)
        if i == 0:
            return Atom(self.clocks[j - 1], None, ">" if strict else ">=", -value)
        return Atom(self.clocks[i - 1], self.clocks[j - 1], "<" if strict else "<=", value)

    def atoms(self):
        """A non-redundant list of atoms denoting this zone, sorted by text.

        Lower bounds ``c >= 0`` are implicit.  Redundant entries are removed
        greedily in text order, checking after each removal that the closure
        of the remaining entries still reproduces the zone.
        """
        if self.empty:
            return [Atom(self.clocks[0], None, "<", 0)] if self.clocks else []
        n = self.n
        cand = []
        for i in range(n):
            for j in range(n):
                if i == j or self.get(i, j) == INF:
                    continue
                if i == 0 and self.get(0, j) == LE0:
                    continue
                cand.append((str(self._entry_atom(i, j)), i, j))
        cand.sort()
        kept = {(i, j) for _, i, j in cand}
        base = Zone.universe(self.clocks).m
        for _, i, j in cand:
            trial = kept - {(i, j)}
            raw = list(base)
            for (a, b) in trial:
                raw[a * n + b] = self.get(a, b)
            if Zone.from_raw(self.clocks, raw) == self:
                kept = trial
        return sorted((self._entry_atom(i, j) for i, j in kept), key=str)

    def to_constraint(self) -> Constraint:
        return Constraint(self.atoms())


def _atom_entry(z: Zone, a: Atom):
    x = z.index(a.left)
    y = 0 if a.right is None else z.index(a.right)
    if a.op == "<=":
        return x, y, bound(a.bound, False)
    if a.op == "<":
        return x, y, bound(a.bound, True)
    if a.op == ">=":
        return y, x, bound(-a.bound, False)
    return y, x, bound(-a.bound, True)


def _tighten(m, n, i, j, b):
    m[i * n + j] = b
    col_i = [m[k * n + i] for k in range(n)]
    row_j = m[j * n:(j + 1) * n]
    for k in range(n):
        ki = col_i[k]
        if ki == INF:
            continue
        kib = add(ki, b)
        base = k * n
        for l in range(n):
            jl = row_j[l]
            if jl == INF:
                continue
            c = add(kib, jl)
            if c < m[base + l]:
                m[base + l] = c


def _close(m, n) -> bool:
    """Floyd-Warshall in place; False on a negative cycle."""
    for k in range(n):
        row_k = m[k * n:(k + 1) * n]
        for i in range(n):
            ik = m[i * n + k]
            if ik == INF:
                continue
            base = i * n
            for j in range(n):
                kj = row_k[j]
                if kj == INF:
                    continue
                c = add(ik, kj)
                if c < m[base + j]:
                    m[base + j] = c
        for i in range(n):
            if m[i * n + i] < LE0:
                return False
    return True


def canonicalize(z: Zone) -> Zone:
    """Shortest-path closure of ``z``'s matrix (idempotent on canonical zones)."""
    if z.empty:
        return z
    return Zone.from_raw(z.clocks, z.m)


def max_constants(constraints: Iterable[Constraint], clocks) -> dict:
    k = {c: 0 for c in clocks}
    for phi in constraints:
        for c, v in phi.max_constants().items():
            if v > k.get(c, 0):
                k[c] = v
    return k
