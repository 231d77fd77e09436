"""Indeterminacy computations on a parsed tower, evaluated in H*(P^N).

Varying a stage-j lifting through the fiber class attached to a stage-(j-1)
label of degree d means adding x^{d-1} along that factor.  A stage-j
k-invariant whose relation has terms ``coef * Sq^I * source`` then changes
by the sum of ``coef * Sq^I x^{d-1}`` over the terms with that source.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from itertools import combinations

import numpy as np

from .. import gf2
from ..cohomology import BundleData, CohomologyClass, multiply, sq_word, sw_class
from .model import Label, MptError, MptModel, Relation, parse_label

MAX_ROWS = 20


def coefficient_value(coef: tuple[int, ...], bundle: BundleData) -> CohomologyClass:
    """Product of the Stiefel-Whitney classes named in ``coef``."""
    one = CohomologyClass.one(bundle.base_dim)
    return reduce(multiply, (sw_class(bundle, c) for c in coef), one)


def evaluate_on(
    relation: Relation, source: Label, value: CohomologyClass, bundle: BundleData
) -> CohomologyClass:
    """Sum of coef * word(value) over the terms of ``relation`` with this source."""
    total = CohomologyClass.zero(value.truncation)
    for t in relation.terms:
        if t.source.label == source:
            total = total + coefficient_value(t.coef, bundle) * sq_word(t.word, value)
    return total


def _fiber(model: MptModel, stage: int, label: str | Label) -> Label:
    lab = parse_label(label)
    if lab not in model.fiber_labels(stage):
        raise MptError(f"{lab} is not a stage-{stage - 1} class")
    return lab


def variation_delta(
    model: MptModel, stage: int, fiber_label: str | Label, n: int
) -> dict[Label, CohomologyClass]:
    """Change of every stage-``stage`` k-invariant image when varying through
    the fiber class of ``fiber_label``."""
    src = _fiber(model, stage, fiber_label)
    N = model.space_dim(n)
    bundle = model.bundle_data(n)
    x = CohomologyClass.monomial(model.degree(src, n) - 1, N)
    out = {}
    for k in model.stage(stage).k_invariants:
        model.degree(k.label, n)  # range check
        out[k.label] = evaluate_on(k.relation, src, x, bundle)
    return out


@dataclass(frozen=True)
class VariationMatrix:
    stage: int
    n: int
    rows: tuple[Label, ...]
    cols: tuple[Label, ...]
    fiber_dims: tuple[int, ...]
    entries: np.ndarray

    def flips(self, row: str | Label) -> set[Label]:
        r = self.rows.index(parse_label(row))
        return {self.cols[c] for c in np.flatnonzero(self.entries[r])}

    def nonzero_rows(self) -> list[Label]:
        return [lab for lab, row in zip(self.rows, self.entries) if row.any()]

    def same_as(self, other: "VariationMatrix") -> bool:
        """Equal as labeled F2 matrices (ignores n)."""
        return (
            self.rows == other.rows
            and self.cols == other.cols
            and np.array_equal(self.entries, other.entries)
        )

    def to_dict(self) -> dict:
        return {
            "stage": self.stage,
            "n": self.n,
            "rows": [str(r) for r in self.rows],
            "fiber_dims": list(self.fiber_dims),
            "cols": [str(c) for c in self.cols],
            "entries": self.entries.astype(int).tolist(),
            "flips": {str(r): sorted(str(c) for c in self.flips(r)) for r in self.rows},
        }


def variation_matrix(model: MptModel, stage: int, n: int) -> VariationMatrix:
    """Rows: fiber classes; a column flips when its delta is the monomial in its degree."""
    rows = tuple(model.fiber_labels(stage))
    cols = tuple(model.stage(stage).labels())
    ent = np.zeros((len(rows), len(cols)), dtype=np.uint8)
    for r, lab in enumerate(rows):
        delta = variation_delta(model, stage, lab, n)
        for c, k in enumerate(cols):
            if delta[k].is_monomial(model.degree(k, n)):
                ent[r, c] = 1
    dims = tuple(model.degree(lab, n) - 1 for lab in rows)
    return VariationMatrix(stage, n, rows, cols, dims, ent)


def _labels(M: VariationMatrix, labels) -> list[int]:
    out = []
    for lab in labels:
        lab = parse_label(lab)
        if lab not in M.cols:
            raise MptError(f"{lab} is not a column of the stage-{M.stage} matrix")
        out.append(M.cols.index(lab))
    return out


def check_implication(M: VariationMatrix, antecedent, consequent) -> bool:
    """Every row combination flipping all of ``antecedent`` also flips some
    label in ``consequent``.  Decided by enumerating the row span."""
    ante = _labels(M, antecedent)
    cons = _labels(M, consequent)
    if not ante:
        raise MptError("antecedent must name at least one label")
    rows = len(M.rows)
    if rows > MAX_ROWS:
        raise MptError(f"{rows} rows is too many to enumerate")
    E = M.entries.astype(np.uint8)
    for r in range(1, rows + 1):
        for combo in combinations(range(rows), r):
            v = np.bitwise_xor.reduce(E[list(combo)], axis=0)
            if v[ante].all() and not v[cons].any():
                return False
    return True


def kernel_trivial(M: VariationMatrix) -> bool:
    """No nonzero combination of rows vanishes."""
    return gf2.rank_dense(M.entries) == len(M.rows)


def forced_vanishing(
    model: MptModel, stage: int, relation_label: str | Label, candidate_label: str | Label, n: int
) -> bool:
    """Does the stage-(stage+1) relation force the stage-``stage`` class
    ``candidate`` to pull back to zero?

    The caller is responsible for the other sources of the relation being
    known to vanish.  The candidate's only possible nonzero pullback is
    x^{deg}; the relation forces zero iff its operator is nonzero there.
    """
    rel = model.stage(stage + 1).get(relation_label).relation
    cand = parse_label(candidate_label)
    if not model.has_label(stage, cand):
        raise MptError(f"{cand} is not a stage-{stage} class")
    if not any(t.source.label == cand for t in rel.terms):
        raise MptError(f"relation {parse_label(relation_label)} does not reference {cand}")
    N = model.space_dim(n)
    x = CohomologyClass.monomial(model.degree(cand, n), N)
    return not evaluate_on(rel, cand, x, model.bundle_data(n)).is_zero()


def quaternionic_pullback_check(fiber_degrees, hp_dim: int, shift: int = 1) -> set[int]:
    """Obstruction degrees {d + shift} that meet the cells 4, 8, ..., 4 hp_dim."""
    cells = {4 * j for j in range(1, hp_dim + 1)}
    return {d + shift for d in fiber_degrees} & cells


def delta_through_level1_fiber(
    model: MptModel,
    relation_label: str | Label,
    fiber_dim: int,
    n: int,
    value: CohomologyClass | None = None,
    bundle: BundleData | None = None,
) -> CohomologyClass:
    """Change of a stage-1 k-invariant under a map through the stage-0 fiber
    class in dimension ``fiber_dim``.  ``value`` defaults to x^{fiber_dim};
    ``bundle`` overrides the model's bundle."""
    rel = model.stage(1).get(relation_label).relation
    N = model.space_dim(n)
    matches = [w.label for w in model.classes if model.degree(w.label, n) - 1 == fiber_dim]
    if not matches:
        raise MptError(f"no stage-0 fiber class in dimension {fiber_dim}")
    if value is None:
        value = CohomologyClass.monomial(fiber_dim, N)
    if bundle is None:
        bundle = model.bundle_data(n)
    if bundle.base_dim != N:
        raise MptError("bundle base does not match the space dimension")
    total = CohomologyClass.zero(N)
    for lab in matches:
        total = total + evaluate_on(rel, lab, value, bundle)
    return total


def analysis_report(model: MptModel, n: int) -> dict:
    """All variation matrices of a model at one n, as plain data."""
    mats = [variation_matrix(model, st.index, n) for st in model.stages]
    return {
        "n": n,
        "space_dim": model.space_dim(n),
        "bundle": model.bundle.at(n),
        "matrices": [m.to_dict() for m in mats],
        "kernel_trivial": {str(m.stage): kernel_trivial(m) for m in mats},
    }
