from __future__ import annotations

from functools import cached_property
from typing import Iterable, Mapping

from .clocks import TRUE, Constraint
from .errors import ModelError, StructuralError
from .precubical import (Cube, Hda, PrecubicalSet, Violation,
                         validate_hda_labeling, validate_precubical)
from .zones import max_constants


class HdtaModel:
    """An HDA together with an invariant and an exit set on every cube.

    Treated as immutable once built.  Missing ``inv`` entries default to
    ``true`` and missing ``exit`` entries to the empty set.
    """

    def __init__(self, hda: Hda, clocks: Iterable[str],
                 inv: Mapping[str, Constraint] | None = None,
                 exit: Mapping[str, Iterable[str]] | None = None):
        self.hda = hda
        self.clocks = tuple(clocks)
        inv = inv or {}
        exit = exit or {}
        extra = (set(inv) | set(exit)) - set(hda.space.cubes)
        if extra:
            raise StructuralError(f"inv/exit given for unknown cube(s) {sorted(extra)}")
        self.inv = {c: inv.get(c, TRUE) for c in hda.space.cubes}
        self.exit = {c: frozenset(exit.get(c, ())) for c in hda.space.cubes}

    @classmethod
    def build(cls, cubes: Iterable[Cube], initial: str, finals: Iterable[str],
              clocks: Iterable[str], inv=None, exit=None) -> HdtaModel:
        return cls(Hda(PrecubicalSet(cubes), initial, frozenset(finals)), clocks, inv, exit)

    @property
    def space(self) -> PrecubicalSet:
        return self.hda.space

    @property
    def initial(self) -> str:
        return self.hda.initial

    @property
    def finals(self) -> frozenset:
        return self.hda.finals

    @property
    def dim(self) -> int:
        return self.space.dim

    def cube(self, name) -> Cube:
        return self.space[name]

    @cached_property
    def cofaces(self) -> dict:
        """``cofaces[x]`` lists ``(l, k)`` with ``d_k^0 l = x``."""
        out = {name: [] for name in self.space.cubes}
        for c in self.space:
            for k, f in enumerate(c.lower, 1):
                out[f].append((c.name, k))
        return out

    @cached_property
    def max_constants(self) -> dict:
        return max_constants(self.inv.values(), self.clocks)

    @cached_property
    def cmax(self) -> int:
        return max(self.max_constants.values(), default=0)

    def count_by_dim(self) -> dict:
        return {n: len(s) for n, s in sorted(self.space.grading.items())}

    def __repr__(self):
        return (f"HdtaModel({len(self.space)} cubes, dim {self.dim}, "
                f"clocks {list(self.clocks)})")


def validate_model(model: HdtaModel) -> list:
    """All violations: precubical identity, labeling laws, clock usage."""
    out = validate_precubical(model.space)
    out += validate_hda_labeling(model.hda)
    declared = set(model.clocks)
    if len(declared) != len(model.clocks):
        out.append(Violation("-", "clocks", "duplicate clock declaration"))
    for name in model.space.cubes:
        phi = model.inv[name]
        if not phi.is_simple:
            out.append(Violation(name, "invariant", f"difference atom in invariant {phi}"))
        unknown = (phi.clocks() | model.exit[name]) - declared
        if unknown:
            out.append(Violation(name, "clocks", f"undeclared clock(s) {sorted(unknown)}"))
    return out


def check_model(model: HdtaModel) -> HdtaModel:
    problems = validate_model(model)
    if problems:
        raise ModelError(problems)
    return model
