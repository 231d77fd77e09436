"""Finite graded A(1)-modules given by Sq1 and Sq2 action matrices."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import gf2
from ..dyadic import binom_mod2
from .algebra import A1Algebra, a1


class ModuleError(ValueError):
    pass


@dataclass(eq=False)
class A1Module:
    """Graded F2 module with a basis listed in nondecreasing degree.

    Action matrices use the row convention: row ``j`` of ``sq1`` is the
    coordinate vector of ``Sq1 e_j``.
    """

    degrees: np.ndarray
    sq1: np.ndarray
    sq2: np.ndarray
    names: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.degrees = np.asarray(self.degrees, dtype=np.int64)
        n = len(self.degrees)
        self.sq1 = np.asarray(self.sq1, dtype=np.uint8).reshape(n, n) & 1
        self.sq2 = np.asarray(self.sq2, dtype=np.uint8).reshape(n, n) & 1
        if n and np.any(np.diff(self.degrees) < 0):
            raise ModuleError("basis must be sorted by degree")
        if not self.names:
            self.names = [f"e{j}" for j in range(n)]
        self._word_cache: dict[tuple[int, ...], np.ndarray] = {}

    @property
    def dim(self) -> int:
        return len(self.degrees)

    @property
    def lo(self) -> int:
        return int(self.degrees[0]) if self.dim else 0

    @property
    def hi(self) -> int:
        return int(self.degrees[-1]) if self.dim else -1

    def indices_in_degree(self, t: int) -> np.ndarray:
        return np.flatnonzero(self.degrees == t)

    def word_matrix(self, word: tuple[int, ...]) -> np.ndarray:
        """Matrix of a Sq1/Sq2 word; rightmost factor acts first."""
        got = self._word_cache.get(word)
        if got is not None:
            return got
        mat = np.eye(self.dim, dtype=np.uint8)
        for k in reversed(word):
            mat = (mat.astype(np.int64) @ self._generator(k)) % 2
        mat = mat.astype(np.uint8)
        self._word_cache[word] = mat
        return mat

    def _generator(self, k: int) -> np.ndarray:
        if k == 1:
            return self.sq1.astype(np.int64)
        if k == 2:
            return self.sq2.astype(np.int64)
        raise ModuleError(f"A(1) words use Sq1 and Sq2 only, got Sq{k}")

    def validate(self, algebra: A1Algebra | None = None) -> None:
        """Check grading and that every A(1) relation acts as zero."""
        A = algebra or a1()
        for k, mat in ((1, self.sq1), (2, self.sq2)):
            rows, cols = np.nonzero(mat)
            bad = self.degrees[cols] != self.degrees[rows] + k
            if np.any(bad):
                j = int(rows[np.argmax(bad)])
                raise ModuleError(f"Sq{k} on {self.names[j]} does not raise degree by {k}")
        for d, rels in A.relations.items():
            for rel in rels:
                total = np.zeros((self.dim, self.dim), dtype=np.uint8)
                for w in rel:
                    total ^= self.word_matrix(w)
                if total.any():
                    raise ModuleError(f"relation {rel} (degree {d}) acts nontrivially")


def stunted_module(m: int, top: int) -> A1Module:
    """H*(P_m^top) as an A(1)-module: basis x^m..x^top."""
    if m > top:
        raise ModuleError(f"empty stunted module: m={m} > top={top}")
    if m < 0:
        raise ModuleError("m must be nonnegative")
    degs = np.arange(m, top + 1, dtype=np.int64)
    n = len(degs)
    sq1 = np.zeros((n, n), dtype=np.uint8)
    sq2 = np.zeros((n, n), dtype=np.uint8)
    for j, d in enumerate(degs):
        d = int(d)
        if j + 1 < n and binom_mod2(d, 1):
            sq1[j, j + 1] = 1
        if j + 2 < n and binom_mod2(d, 2):
            sq2[j, j + 2] = 1
    return A1Module(degs, sq1, sq2, names=[f"x^{int(d)}" for d in degs])


def free_module(degree: int = 0, algebra: A1Algebra | None = None) -> A1Module:
    """A(1) itself, shifted to start in ``degree``."""
    A = algebra or a1()
    order = np.argsort(A.degrees, kind="stable")
    pos = {int(b): i for i, b in enumerate(order)}
    n = A.dim
    sq1 = np.zeros((n, n), dtype=np.uint8)
    sq2 = np.zeros((n, n), dtype=np.uint8)
    for b in range(n):
        sq1[pos[b], [pos[int(r)] for r in np.flatnonzero(A.mult[A.sq1, b])]] = 1
        sq2[pos[b], [pos[int(r)] for r in np.flatnonzero(A.mult[A.sq2, b])]] = 1
    degs = A.degrees[order] + degree
    return A1Module(degs, sq1, sq2, names=[A.name(int(b)) for b in order])


def trivial_module(degree: int = 0) -> A1Module:
    z = np.zeros((1, 1), dtype=np.uint8)
    return A1Module(np.array([degree]), z, z, names=["1"])


def from_actions(degrees, sq1_pairs, sq2_pairs, names=None) -> A1Module:
    """Build a module from lists of (source, target) index pairs."""
    n = len(degrees)
    s1 = np.zeros((n, n), dtype=np.uint8)
    s2 = np.zeros((n, n), dtype=np.uint8)
    for a, b in sq1_pairs:
        s1[a, b] ^= 1
    for a, b in sq2_pairs:
        s2[a, b] ^= 1
    return A1Module(np.asarray(degrees), s1, s2, names=list(names or []))


def cyclic_quotient(relations, degree: int = 0, algebra: A1Algebra | None = None) -> A1Module:
    """A(1) / A(1){relations}, each relation a coordinate vector in A(1).

    Relations should be homogeneous; the quotient basis is the set of word
    basis elements that are not pivots of the reduced left ideal.
    """
    A = algebra or a1()
    gens = [np.asarray(r, dtype=np.uint8) & 1 for r in relations]
    for g in gens:
        if g.any() and len({int(A.degrees[i]) for i in np.flatnonzero(g)}) != 1:
            raise ModuleError("relations must be homogeneous")
    order = np.argsort(A.degrees, kind="stable")
    # ideal spanned by a_i * g, in degree-sorted coordinates
    rows = []
    for g in gens:
        for i in range(A.dim):
            v = np.zeros(A.dim, dtype=np.int64)
            for b in np.flatnonzero(g):
                v += A.mult[i, b]
            rows.append((v % 2)[order].astype(np.uint8))
    span = gf2.row_space(np.array(rows, dtype=np.uint8)) if rows else np.zeros((0, A.dim), np.uint8)
    pivots = [int(np.flatnonzero(r)[0]) for r in span]
    keep = [c for c in range(A.dim) if c not in pivots]
    pos = {c: k for k, c in enumerate(keep)}

    def reduce(vec):
        v = vec.copy()
        for r, p in zip(span, pivots):
            if v[p]:
                v ^= r
        return v

    n = len(keep)
    sq1 = np.zeros((n, n), dtype=np.uint8)
    sq2 = np.zeros((n, n), dtype=np.uint8)
    for k, c in enumerate(keep):
        b = int(order[c])
        for mat, op in ((sq1, A.sq1), (sq2, A.sq2)):
            img = reduce(A.mult[op, b][order].astype(np.uint8))
            for c2 in np.flatnonzero(img):
                mat[k, pos[int(c2)]] = 1
    degs = A.degrees[order][keep] + degree
    return A1Module(degs, sq1, sq2, names=[A.name(int(order[c])) for c in keep])


def direct_sum(*mods: A1Module) -> A1Module:
    """Direct sum, with the basis re-sorted by degree."""
    if not mods:
        raise ModuleError("direct sum of nothing")
    degs = np.concatenate([m.degrees for m in mods])
    n = len(degs)
    sq1 = np.zeros((n, n), dtype=np.uint8)
    sq2 = np.zeros((n, n), dtype=np.uint8)
    off = 0
    for m in mods:
        sl = slice(off, off + m.dim)
        sq1[sl, sl] = m.sq1
        sq2[sl, sl] = m.sq2
        off += m.dim
    order = np.argsort(degs, kind="stable")
    names = [nm for m in mods for nm in m.names]
    return A1Module(
        degs[order],
        sq1[np.ix_(order, order)],
        sq2[np.ix_(order, order)],
        names=[names[i] for i in order],
    )


def shifted(M: A1Module, k: int) -> A1Module:
    return A1Module(M.degrees + k, M.sq1, M.sq2, names=list(M.names))
