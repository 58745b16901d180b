"""Precubical sets and higher-dimensional automata.

Face indices are 1-based: ``face(x, k, 0)`` is the k-th lower face and
``face(x, k, 1)`` the k-th upper face.  Labels are multisets of action names,
stored as sorted tuples (``("a", "a", "b")``).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable

from .errors import StructuralError

MAX_DIM = 16


@dataclass(frozen=True)
class Cube:
    name: str
    dim: int
    lower: tuple = ()
    upper: tuple = ()
    label: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "lower", tuple(self.lower))
        object.__setattr__(self, "upper", tuple(self.upper))
        object.__setattr__(self, "label", tuple(sorted(self.label)))

    def face(self, k: int, nu: int) -> str:
        if not 1 <= k <= self.dim:
            raise IndexError(f"face index {k} out of range for {self.dim}-cube {self.name}")
        return (self.upper if nu else self.lower)[k - 1]


@dataclass(frozen=True)
class Violation:
    cube: str
    rule: str
    detail: str
    indices: tuple = ()

    def __str__(self):
        return f"{self.cube}: {self.rule}: {self.detail}"


class PrecubicalSet:
    """A finite graded set of cubes with face maps.

    Construction checks structure only (arity, dangling references, face
    dimensions, dimension cap); the precubical identity is checked by
    :func:`validate_precubical`.
    """

    def __init__(self, cubes: Iterable[Cube]):
        self.cubes = {}
        for c in cubes:
            if c.name in self.cubes:
                raise StructuralError(f"duplicate cube {c.name!r}")
            self.cubes[c.name] = c
        problems = []
        for c in self.cubes.values():
            if c.dim < 0:
                problems.append(f"cube {c.name!r}: negative dimension")
                continue
            if c.dim > MAX_DIM:
                problems.append(f"cube {c.name!r}: dimension {c.dim} exceeds the cap of {MAX_DIM}")
                continue
            if len(c.lower) != c.dim or len(c.upper) != c.dim:
                problems.append(f"cube {c.name!r}: expected {c.dim} lower and upper faces")
                continue
            for nu, faces in ((0, c.lower), (1, c.upper)):
                for k, f in enumerate(faces, 1):
                    slot = f"{'upper' if nu else 'lower'} face {k}"
                    if f not in self.cubes:
                        problems.append(f"cube {c.name!r}, {slot}: unknown cube {f!r}")
                    elif self.cubes[f].dim != c.dim - 1:
                        problems.append(
                            f"cube {c.name!r}, {slot}: {f!r} has dimension "
                            f"{self.cubes[f].dim}, expected {c.dim - 1}")
        if problems:
            raise StructuralError("; ".join(problems))

    def __getitem__(self, name) -> Cube:
        return self.cubes[name]

    def __contains__(self, name):
        return name in self.cubes

    def __iter__(self):
        return iter(self.cubes.values())

    def __len__(self):
        return len(self.cubes)

    @property
    def grading(self) -> dict:
        out = {}
        for c in self.cubes.values():
            out.setdefault(c.dim, set()).add(c.name)
        return out

    @property
    def dim(self) -> int:
        return max((c.dim for c in self.cubes.values()), default=-1)

    def face(self, name: str, k: int, nu: int) -> str:
        return self.cubes[name].face(k, nu)


def validate_precubical(space: PrecubicalSet) -> list:
    """Every failure of ``d_k^nu d_l^mu x = d_{l-1}^mu d_k^nu x`` for ``k < l``."""
    out = []
    for x in space:
        n = x.dim
        for l in range(2, n + 1):
            for k in range(1, l):
                for nu, mu in product((0, 1), repeat=2):
                    lhs = space.face(x.face(l, mu), k, nu)
                    rhs = space.face(x.face(k, nu), l - 1, mu)
                    if lhs != rhs:
                        out.append(Violation(
                            x.name, "precubical identity",
                            f"d_{k}^{nu} d_{l}^{mu} = {lhs} but d_{l - 1}^{mu} d_{k}^{nu} = {rhs}",
                            (k, l, nu, mu)))
    return out


@dataclass
class Hda:
    space: PrecubicalSet
    initial: str
    finals: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        self.finals = frozenset(self.finals)
        for name, what in [(self.initial, "initial")] + [(f, "final") for f in sorted(self.finals)]:
            if name not in self.space:
                raise StructuralError(f"{what} cube {name!r} does not exist")
            if self.space[name].dim != 0:
                raise StructuralError(f"{what} cube {name!r} is not a 0-cube")


def multiset_minus(a, b) -> Counter:
    return Counter(a) - Counter(b)


def validate_hda_labeling(hda: Hda) -> list:
    space = hda.space
    out = []
    for x in space:
        if len(x.label) != x.dim:
            out.append(Violation(x.name, "L1", f"|label| = {len(x.label)} but dim = {x.dim}"))
        for k in range(1, x.dim + 1):
            lo = space[x.face(k, 0)].label
            hi = space[x.face(k, 1)].label
            if lo != hi:
                out.append(Violation(x.name, "L2",
                                     f"label of lower face {k} {lo} differs from upper face {hi}", (k,)))
            diff = multiset_minus(x.label, lo)
            if sum(diff.values()) != 1:
                out.append(Violation(x.name, "L3",
                                     f"label minus lower face {k} is {sorted(diff.elements())}", (k,)))
    return out


def started_event(space: PrecubicalSet, x: str | Cube, k: int) -> str:
    """The action started when entering ``x`` through its k-th lower face."""
    cube = x if isinstance(x, Cube) else space[x]
    diff = multiset_minus(cube.label, space[cube.face(k, 0)].label)
    if sum(diff.values()) != 1:
        raise ValueError(f"labeling of {cube.name!r} is invalid at index {k}")
    return next(diff.elements())


def terminated_event(space: PrecubicalSet, x: str | Cube, k: int) -> str:
    cube = x if isinstance(x, Cube) else space[x]
    diff = multiset_minus(cube.label, space[cube.face(k, 1)].label)
    if sum(diff.values()) != 1:
        raise ValueError(f"labeling of {cube.name!r} is invalid at index {k}")
    return next(diff.elements())
