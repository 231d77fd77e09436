"""Ext dimensions from the normalized bar complex, as an independent check on
minimal resolutions.

Tor^{A(1)}_{s,t}(F2, M) is the homology of B_s = Abar^{(x)s} (x) M with

    d(a_1|...|a_s|m) = sum_i a_1|..|a_i a_{i+1}|..|m + a_1|..|a_{s-1}|a_s m

and Ext^{s,t}(M, F2) has the same dimension.  Nothing here shares code
with the resolution engine beyond the algebra's product table.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .. import gf2
from .algebra import A1Algebra, a1
from .module import A1Module

log = logging.getLogger(__name__)


class BudgetExceeded(RuntimeError):
    """The bar complex in some bidegree is larger than the configured budget."""


@dataclass
class BarComplex:
    module: A1Module
    algebra: A1Algebra = field(default_factory=a1)
    budget: int = 20000

    def __post_init__(self):
        A = self.algebra
        self._bar = [i for i in range(A.dim) if A.degrees[i] > 0]
        self._bases: dict[tuple[int, int], list[tuple]] = {}
        self._ranks: dict[tuple[int, int], int] = {}
        M = self.module
        self._act = [M.word_matrix(A.basis[i]) for i in range(A.dim)]

    def _compositions(self, s: int, total: int):
        """Ordered tuples of s Abar basis indices with degrees summing to total."""
        degs = self.algebra.degrees
        if s == 0:
            if total == 0:
                yield ()
            return
        if total < s or total > 6 * s:
            return
        for a in self._bar:
            rest = total - int(degs[a])
            if rest >= s - 1:
                for tail in self._compositions(s - 1, rest):
                    yield (a,) + tail

    def size(self, s: int, t: int) -> int:
        """dim B_{s,t} without materializing it."""
        counts = np.zeros(6 * s + 1, dtype=object)
        counts[0] = 1
        per = np.bincount(self.algebra.degrees[self._bar], minlength=7)
        for _ in range(s):
            nxt = np.zeros_like(counts)
            for d in range(len(counts)):
                if counts[d]:
                    for k in range(1, 7):
                        if d + k < len(nxt):
                            nxt[d + k] += counts[d] * int(per[k])
            counts = nxt
        total = 0
        for deg in self.module.degrees:
            u = t - int(deg)
            if 0 <= u < len(counts):
                total += int(counts[u])
        return total

    def basis(self, s: int, t: int) -> list[tuple]:
        key = (s, t)
        got = self._bases.get(key)
        if got is None:
            got = []
            for j, deg in enumerate(self.module.degrees):
                for comp in self._compositions(s, t - int(deg)):
                    got.append(comp + (j,))
            self._bases[key] = got
        return got

    def _boundary(self, elem: tuple) -> list[tuple]:
        """d of one basis tensor, as a list of tensors (duplicates cancel mod 2)."""
        A = self.algebra
        s = len(elem) - 1
        out: list[tuple] = []
        for i in range(s - 1):
            for c in np.flatnonzero(A.mult[elem[i], elem[i + 1]]):
                out.append(elem[:i] + (int(c),) + elem[i + 2 :])
        a, m = elem[s - 1], elem[s]
        for c in np.flatnonzero(self._act[a][m]):
            out.append(elem[: s - 1] + (int(c),))
        return out

    def rank(self, s: int, t: int) -> int:
        """Rank of d_s : B_{s,t} -> B_{s-1,t}."""
        if s == 0:
            return 0
        key = (s, t)
        if key in self._ranks:
            return self._ranks[key]
        rows_n, cols_n = self.size(s, t), self.size(s - 1, t)
        if min(rows_n, cols_n) > self.budget:
            raise BudgetExceeded(f"bar complex at (s={s}, t={t}) is {rows_n} x {cols_n}")
        if rows_n == 0 or cols_n == 0:
            self._ranks[key] = 0
            return 0
        src = self.basis(s, t)
        col = {e: k for k, e in enumerate(self.basis(s - 1, t))}
        # put the smaller side on the rows: rank is transpose invariant
        transpose = rows_n > cols_n
        nr, nc = (cols_n, rows_n) if transpose else (rows_n, cols_n)
        packed = gf2.zeros(nr, nc)
        for r, e in enumerate(src):
            for f in self._boundary(e):
                c = col[f]
                if transpose:
                    gf2.set_bit(packed, c, r)
                else:
                    gf2.set_bit(packed, r, c)
        rk = gf2.rank(packed, nc)
        self._ranks[key] = rk
        return rk

    def dim(self, s: int, t: int) -> int:
        """dim Tor_{s,t} = dim Ext^{s,t}."""
        return self.size(s, t) - self.rank(s, t) - self.rank(s + 1, t)

    def check_d_squared(self, s: int, t: int) -> None:
        for e in self.basis(s, t):
            acc: dict[tuple, int] = {}
            for f in self._boundary(e):
                if len(f) > 1:
                    for g in self._boundary(f):
                        acc[g] = acc.get(g, 0) ^ 1
            if any(acc.values()):
                raise AssertionError(f"bar d^2 != 0 on {e}")


def bar_ext_dims(
    M: A1Module, s_max: int, t_max: int, budget: int = 20000
) -> dict[tuple[int, int], int]:
    """Ext dimensions in every bidegree of the window whose bar pieces fit the
    budget.  Bidegrees that do not fit are left out of the result."""
    B = BarComplex(M, budget=budget)
    out = {}
    for s, t in product(range(s_max + 1), range(M.lo, t_max + 1)):
        try:
            out[(s, t)] = B.dim(s, t)
        except BudgetExceeded:
            log.info("bar oracle skips (s=%d, t=%d)", s, t)
    return out
