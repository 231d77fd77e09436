"""Data types for a staged tower of k-invariant relations.

Degrees are written relative to a base ``b`` that is itself linear in n.
Every label carries a subscript degree d; its fiber class lives in degree
d - 1 and the class itself in degree d (w) or d + 1 (k).  A term
``coef * Sq^I * source`` of a relation for k(b+e) must satisfy
``|coef| + |I| + d_source = e + 1``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..cohomology import BundleData


class MptError(ValueError):
    pass


@dataclass(frozen=True)
class Linear:
    """coef * n + off."""

    coef: int
    off: int = 0

    def at(self, n: int) -> int:
        return self.coef * n + self.off

    def __str__(self) -> str:
        if self.coef == 0:
            return str(self.off)
        head = f"{self.coef}n"
        if self.off == 0:
            return head
        return f"{head}{self.off:+d}"


@dataclass(frozen=True, order=True)
class Label:
    """``w(b+d)``, ``k(b+d)`` or ``k'(b+d)``."""

    kind: str
    offset: int
    prime: bool = False

    def __str__(self) -> str:
        tick = "'" if self.prime else ""
        off = "" if self.offset == 0 else f"{self.offset:+d}"
        return f"{self.kind}{tick}(b{off})"


_LABEL = re.compile(r"^\s*([wk])(\d*)(\^?\d*)('?)\s*\(\s*b\s*(?:([+-])\s*(\d+))?\s*\)\s*$")


def parse_label(text: str | Label) -> Label:
    """Lenient label reader: ``k(b+4)``, ``k'(b+8)``, ``k2'(b+8)``, ``w(b-4)``.

    A stage digit after ``k`` is accepted and ignored.
    """
    if isinstance(text, Label):
        return text
    m = _LABEL.match(text)
    if not m:
        raise MptError(f"not a label: {text!r}")
    kind, _, _, tick, sign, num = m.groups()
    off = int(num or 0) * (-1 if sign == "-" else 1)
    if kind == "w" and tick:
        raise MptError(f"w-classes are never primed: {text!r}")
    return Label(kind, off, bool(tick))


@dataclass(frozen=True)
class Source:
    label: Label
    stage: int

    def __str__(self) -> str:
        if self.label.kind == "w":
            return str(self.label)
        return f"{self.label}@{self.stage}"


@dataclass(frozen=True)
class Term:
    """coefficient (product of w-classes, by degree) * Steenrod word * source."""

    coef: tuple[int, ...]
    word: tuple[int, ...]
    source: Source

    def degree_offset(self) -> int:
        return sum(self.coef) + sum(self.word) + self.source.label.offset

    def __str__(self) -> str:
        ops = "".join(f"w{c}" for c in self.coef) + "".join(f"Sq{k}" for k in self.word)
        return f"{ops} {self.source}" if ops else str(self.source)


@dataclass(frozen=True)
class Relation:
    terms: tuple[Term, ...]

    @staticmethod
    def from_terms(terms) -> "Relation":
        """Formal F2 sum: pairs of equal terms cancel, first-seen order kept."""
        parity: dict[Term, int] = {}
        for t in terms:
            parity[t] = parity.get(t, 0) ^ 1
        return Relation(tuple(t for t, p in parity.items() if p))

    def sources(self) -> set[Source]:
        return {t.source for t in self.terms}

    def __str__(self) -> str:
        return " + ".join(str(t) for t in self.terms) if self.terms else "0"


@dataclass(frozen=True)
class KInvariant:
    label: Label
    relation: Relation
    notes: tuple[str, ...] = ()


@dataclass(frozen=True)
class WClass:
    label: Label
    notes: tuple[str, ...] = ()


@dataclass(frozen=True)
class Stage:
    index: int
    k_invariants: tuple[KInvariant, ...] = ()
    notes: tuple[str, ...] = ()

    def labels(self) -> list[Label]:
        return [k.label for k in self.k_invariants]

    def get(self, label: str | Label) -> KInvariant:
        lab = parse_label(label)
        for k in self.k_invariants:
            if k.label == lab:
                return k
        raise MptError(f"no k-invariant {lab} in stage {self.index}")


@dataclass(frozen=True)
class MptModel:
    base: Linear
    bundle: Linear
    space: Linear
    classes: tuple[WClass, ...]
    stages: tuple[Stage, ...]
    notes: tuple[str, ...] = ()
    stage0_notes: tuple[str, ...] = ()
    trailer: tuple[str, ...] = field(default=())

    # -- lookup --------------------------------------------------------------

    def stage(self, j: int) -> Stage:
        for st in self.stages:
            if st.index == j:
                return st
        raise MptError(f"no stage {j}")

    def fiber_labels(self, j: int) -> list[Label]:
        """Classes whose fibers vary a stage-j lifting: the stage-(j-1) ones."""
        if j == 1:
            return [w.label for w in self.classes]
        return self.stage(j - 1).labels()

    def has_label(self, j: int, label: Label) -> bool:
        if j == 0:
            return any(w.label == label for w in self.classes)
        try:
            self.stage(j).get(label)
        except MptError:
            return False
        return True

    # -- instantiation -------------------------------------------------------

    def space_dim(self, n: int) -> int:
        return self.space.at(n)

    def bundle_data(self, n: int) -> BundleData:
        return BundleData(self.bundle.at(n), self.space_dim(n))

    def degree(self, label: str | Label, n: int) -> int:
        """Subscript degree of a label at a concrete n."""
        lab = parse_label(label)
        d = self.base.at(n) + lab.offset
        if d <= 0:
            raise MptError(f"{lab} has nonpositive degree {d} at n={n}")
        if d > self.space_dim(n) + 3:
            raise MptError(f"{lab} has degree {d} beyond space dimension + 3 at n={n}")
        return d

    def counts(self) -> tuple[int, list[int]]:
        return len(self.classes), [len(s.k_invariants) for s in self.stages]
