"""Clock constraints and clock valuations.

A constraint is a conjunction of atoms ``c ~ k`` or ``c1 - c2 ~ k`` with
``~`` one of ``<, <=, >=, >`` and ``k`` an integer.  Constraints that contain
no difference atom are *simple*; model invariants must be simple.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import HdtaError, ParseError

RELATIONS = ("<", "<=", ">=", ">")

URGENT_CLOCK = "__urgent"

_NAME = r"[A-Za-z_][A-Za-z0-9_.]*"
_ATOM_RE = re.compile(
    rf"^\s*({_NAME})\s*(?:-\s*({_NAME}))?\s*(<=|>=|==|=|<|>)\s*(-?\d+)\s*$"
)
NAME_RE = re.compile(rf"^{_NAME}$")

_HOLDS = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">=": lambda a, b: a >= b,
    ">": lambda a, b: a > b,
}


@dataclass(frozen=True, order=True)
class Atom:
    """``left ~ bound`` or, when ``right`` is set, ``left - right ~ bound``."""

    left: str
    right: str | None
    op: str
    bound: int

    def __post_init__(self):
        if self.op not in RELATIONS:
            raise ValueError(f"unknown relation {self.op!r}")

    @property
    def is_difference(self):
        return self.right is not None

    def clocks(self):
        return (self.left,) if self.right is None else (self.left, self.right)

    def holds(self, v: Mapping[str, object]) -> bool:
        value = v[self.left] if self.right is None else v[self.left] - v[self.right]
        return _HOLDS[self.op](value, self.bound)

    def __str__(self):
        lhs = self.left if self.right is None else f"{self.left}-{self.right}"
        return f"{lhs}{self.op}{self.bound}"


class Constraint:
    """Conjunction of atoms.  The empty conjunction is ``true``."""

    __slots__ = ("atoms",)

    def __init__(self, atoms: Iterable[Atom] = ()):
        self.atoms = tuple(atoms)

    @property
    def is_simple(self):
        return not any(a.is_difference for a in self.atoms)

    def clocks(self):
        return {c for a in self.atoms for c in a.clocks()}

    def max_constants(self):
        """Largest absolute constant compared against each clock."""
        out = {}
        for a in self.atoms:
            for c in a.clocks():
                out[c] = max(out.get(c, 0), abs(a.bound))
        return out

    def rename(self, mapping: Mapping[str, str]) -> Constraint:
        return Constraint(
            Atom(mapping.get(a.left, a.left),
                 None if a.right is None else mapping.get(a.right, a.right),
                 a.op, a.bound)
            for a in self.atoms
        )

    def __and__(self, other: Constraint) -> Constraint:
        return Constraint(self.atoms + other.atoms)

    def __bool__(self):
        return bool(self.atoms)

    def __eq__(self, other):
        return isinstance(other, Constraint) and self.atoms == other.atoms

    def __hash__(self):
        return hash(self.atoms)

    def __repr__(self):
        return f"Constraint({str(self)!r})"

    def __str__(self):
        if not self.atoms:
            return "true"
        return " & ".join(str(a) for a in self.atoms)


TRUE = Constraint()


def parse_constraint(text: str, line: int | None = None) -> Constraint:
    """Parse ``x<=4 & y>3 & x-y<2``.  ``c==k`` expands to ``c<=k & c>=k``."""
    text = text.strip()
    if text in ("", "true"):
        return TRUE
    atoms = []
    for part in re.split(r"&&?|∧", text):
        m = _ATOM_RE.match(part)
        if not m:
            raise ParseError(f"malformed clock constraint {part.strip()!r}", line)
        left, right, op, k = m.group(1), m.group(2), m.group(3), int(m.group(4))
        if op in ("=", "=="):
            atoms.append(Atom(left, right, "<=", k))
            atoms.append(Atom(left, right, ">=", k))
        else:
            atoms.append(Atom(left, right, op, k))
    return Constraint(atoms)


def satisfies(v: Mapping[str, object], phi: Constraint) -> bool:
    for a in phi.atoms:
        for c in a.clocks():
            if c not in v:
                raise HdtaError(f"unknown clock {c!r}")
    return all(a.holds(v) for a in phi.atoms)


def zero_valuation(clocks: Iterable[str]) -> dict:
    return {c: Fraction(0) for c in clocks}


def valuation_delay(v: Mapping[str, object], d) -> dict:
    if d < 0:
        raise ValueError(f"negative delay {d}")
    return {c: x + d for c, x in v.items()}


def valuation_reset(v: Mapping[str, object], clocks: Iterable[str]) -> dict:
    clocks = set(clocks)
    unknown = clocks - set(v)
    if unknown:
        raise HdtaError(f"unknown clock(s) {sorted(unknown)}")
    return {c: (Fraction(0) if c in clocks else x) for c, x in v.items()}
