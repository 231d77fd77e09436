"""The mod-2 Steenrod algebra in the admissible basis, and the subalgebra A(1)
generated by Sq1 and Sq2, with its product table derived from Adem relations."""

from __future__ import annotations

from functools import lru_cache
from itertools import product

import numpy as np

from .. import gf2
from ..dyadic import binom_mod2

Monomial = tuple[int, ...]


def is_admissible(mono: Monomial) -> bool:
    return all(mono[i] >= 2 * mono[i + 1] for i in range(len(mono) - 1))


@lru_cache(maxsize=None)
def adem(a: int, b: int) -> frozenset[Monomial]:
    """Sq^a Sq^b for 0 < a < 2b as a sum of admissible pairs."""
    out: set[Monomial] = set()
    for c in range(a // 2 + 1):
        top = b - c - 1
        if top < 0 or a - 2 * c < 0:
            continue
        if binom_mod2(top, a - 2 * c):
            mono = (a + b - c, c) if c else (a + b - c,)
            out ^= {mono}
    return frozenset(out)


@lru_cache(maxsize=None)
def admissible_expansion(word: Monomial) -> frozenset[Monomial]:
    """Reduce an arbitrary composite of squares to admissible form."""
    word = tuple(k for k in word if k != 0)
    for i in range(len(word) - 1):
        a, b = word[i], word[i + 1]
        if a < 2 * b:
            out: set[Monomial] = set()
            for pair in adem(a, b):
                for m in admissible_expansion(word[:i] + pair + word[i + 2 :]):
                    out ^= {m}
            return frozenset(out)
    return frozenset([word])


def multiply(x: frozenset[Monomial], y: frozenset[Monomial]) -> frozenset[Monomial]:
    out: set[Monomial] = set()
    for u in x:
        for v in y:
            out ^= set(admissible_expansion(u + v))
    return frozenset(out)


def words_of_degree(d: int, letters=(1, 2)) -> list[Monomial]:
    """All words in the given letters with total degree ``d``, lexicographic."""
    if d == 0:
        return [()]
    out = []
    for first in letters:
        if first <= d:
            out.extend((first,) + rest for rest in words_of_degree(d - first, letters))
    return sorted(out)


def _coords(elements: list[frozenset[Monomial]]) -> tuple[np.ndarray, list[Monomial]]:
    monos = sorted({m for e in elements for m in e})
    pos = {m: i for i, m in enumerate(monos)}
    mat = np.zeros((len(elements), max(1, len(monos))), dtype=np.uint8)
    for r, e in enumerate(elements):
        for m in e:
            mat[r, pos[m]] = 1
    return mat, monos


class A1Algebra:
    """A(1) with a basis of words in Sq1, Sq2 and derived structure constants.

    ``mult[i, j]`` is the coordinate vector of ``basis[i] * basis[j]``.
    ``relations[d]`` lists the F2-linear relations among all Sq1/Sq2 words of
    degree ``d`` (each relation is a tuple of words summing to zero).
    """

    TOP_DEGREE = 6
    RELATION_DEGREE = 8

    def __init__(self):
        basis: list[Monomial] = []
        expansions: list[frozenset[Monomial]] = []
        self.relations: dict[int, list[tuple[Monomial, ...]]] = {}
        for d in range(self.RELATION_DEGREE + 1):
            words = words_of_degree(d)
            exps = [admissible_expansion(w) for w in words]
            mat, _ = _coords(exps)
            kept = gf2.extend_basis(np.zeros((0, mat.shape[1]), np.uint8), mat)
            if d > self.TOP_DEGREE and kept:
                raise AssertionError(f"A(1) has a nonzero word in degree {d}")
            for i in kept:
                basis.append(words[i])
                expansions.append(exps[i])
            kernel = gf2.left_kernel(mat) if len(words) else np.zeros((0, 0), np.uint8)
            self.relations[d] = [
                tuple(words[j] for j in np.flatnonzero(row)) for row in kernel
            ]
        self.basis: tuple[Monomial, ...] = tuple(basis)
        self.degrees = np.array([sum(w) for w in basis], dtype=np.int64)
        self._expansions = expansions
        self.dim = len(basis)
        if self.dim != 8:
            raise AssertionError(f"A(1) derived with dimension {self.dim}, expected 8")
        poincare = np.bincount(self.degrees, minlength=7).tolist()
        if poincare != [1, 1, 1, 2, 1, 1, 1]:
            raise AssertionError(f"unexpected Poincare series {poincare}")
        self.mult = self._structure_constants()
        self.sq1 = self.basis.index((1,))
        self.sq2 = self.basis.index((2,))
        self.unit = self.basis.index(())

    def coordinates(self, element: frozenset[Monomial]) -> np.ndarray:
        """Coordinates of an admissible-form element in the word basis."""
        degs = {sum(m) for m in element}
        out = np.zeros(self.dim, dtype=np.uint8)
        if not element:
            return out
        if len(degs) != 1:
            raise ValueError("inhomogeneous element")
        (d,) = degs
        idx = [i for i in range(self.dim) if self.degrees[i] == d]
        if not idx:
            raise ValueError(f"element of degree {d} is not in A(1)")
        exps = [self._expansions[i] for i in idx]
        mat, monos = _coords(exps + [element])
        target = mat[-1]
        sub = mat[:-1]
        # solve c @ sub = target by brute force (at most 2 basis elements per degree)
        for bits in product((0, 1), repeat=len(idx)):
            v = np.array(bits, dtype=np.uint8) @ sub % 2
            if np.array_equal(v, target):
                for i, b in zip(idx, bits):
                    out[i] = b
                return out
        raise ValueError("element not in A(1)")

    def _structure_constants(self) -> np.ndarray:
        mult = np.zeros((self.dim, self.dim, self.dim), dtype=np.uint8)
        for i, u in enumerate(self.basis):
            for j, v in enumerate(self.basis):
                prod = admissible_expansion(u + v)
                if self.degrees[i] + self.degrees[j] > self.TOP_DEGREE:
                    if prod:
                        raise AssertionError(f"{u}*{v} nonzero above top degree")
                    continue
                mult[i, j] = self.coordinates(prod)
        return mult

    def word_coordinates(self, word: Monomial) -> np.ndarray:
        return self.coordinates(admissible_expansion(tuple(word)))

    def name(self, i: int) -> str:
        w = self.basis[i]
        return "".join(f"Sq{k}" for k in w) if w else "1"


@lru_cache(maxsize=1)
def a1() -> A1Algebra:
    return A1Algebra()
