"""Minimal free resolutions over A(1), built degree by degree.

An element of the free module C_s in internal degree t is stored as an
8 x G_s array ``B`` with ``B[i, j] = 1`` meaning the summand ``a_i g_j``
(``a_i`` the i-th A(1) basis word, ``g_j`` the j-th generator of C_s).
Generators of C_0 map to vectors of the module itself.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .. import gf2
from .algebra import A1Algebra, a1
from .module import A1Module

log = logging.getLogger(__name__)


class WindowError(RuntimeError):
    """A query falls outside the (s, t) window a resolution was computed over."""


def _pad(arr: np.ndarray, cols: int) -> np.ndarray:
    if arr.shape[1] == cols:
        return arr
    out = np.zeros((arr.shape[0], cols), dtype=np.uint8)
    out[:, : arr.shape[1]] = arr
    return out


@dataclass(eq=False)
class Resolution:
    module: A1Module
    s_max: int
    t_max: int
    algebra: A1Algebra
    gen_degrees: list[list[int]] = field(default_factory=list)
    boundaries: list[list[np.ndarray]] = field(default_factory=list)

    # -- queries -------------------------------------------------------------

    def n_gens(self, s: int) -> int:
        return len(self.gen_degrees[s])

    def dims(self, s: int, t: int) -> int:
        """dim Ext^{s,t}: the number of generators in bidegree (s, t)."""
        if s > self.s_max or t > self.t_max or s < 0:
            raise WindowError(f"(s={s}, t={t}) outside s<={self.s_max}, t<={self.t_max}")
        return sum(1 for d in self.gen_degrees[s] if d == t)

    def generators(self, s: int, t: int) -> list[int]:
        return [j for j, d in enumerate(self.gen_degrees[s]) if d == t]

    def boundary(self, s: int, j: int) -> np.ndarray:
        """d(g_j) for the j-th generator of C_s (padded to the full C_{s-1} width)."""
        b = self.boundaries[s][j]
        if s == 0:
            return b
        return _pad(b, self.n_gens(s - 1))

    # -- linear maps ---------------------------------------------------------

    def _apply(self, s: int, i: int, B: np.ndarray) -> np.ndarray:
        """a_i * (element of C_{s-1} given by B), for s >= 1."""
        return (self.algebra.mult[i].T.astype(np.int64) @ B) % 2

    def _image_of_basis(self, s: int, i: int, j: int, width: int) -> np.ndarray:
        """Flattened d(a_i g_j) for generator j of C_s."""
        if s == 0:
            W = self.module.word_matrix(self.algebra.basis[i])
            return (self.boundaries[0][j].astype(np.int64) @ W % 2).astype(np.uint8)
        B = _pad(self.boundaries[s][j], width)
        return self._apply(s, i, B).astype(np.uint8).reshape(-1)

    def basis_pairs(self, s: int, t: int, ngens: int | None = None) -> list[tuple[int, int]]:
        A = self.algebra
        out = []
        for j, dg in enumerate(self.gen_degrees[s][:ngens]):
            u = t - dg
            if 0 <= u <= A.TOP_DEGREE:
                for i in np.flatnonzero(A.degrees == u):
                    out.append((int(i), j))
        return out

    def differential_matrix(self, s: int, t: int) -> tuple[np.ndarray, list[tuple[int, int]]]:
        """Rows: d(a_i g_j) over the full current basis of C_{s,t}."""
        pairs = self.basis_pairs(s, t)
        width = self.module.dim if s == 0 else self.algebra.dim * self.n_gens(s - 1)
        prev = 0 if s == 0 else self.n_gens(s - 1)
        mat = np.zeros((len(pairs), width), dtype=np.uint8)
        for r, (i, j) in enumerate(pairs):
            mat[r] = self._image_of_basis(s, i, j, prev)
        return mat, pairs

    # -- verification --------------------------------------------------------

    def check_d_squared(self) -> None:
        """d(d(g)) = 0 for every generator in filtration >= 1."""
        for s in range(1, self.s_max + 1):
            for j in range(self.n_gens(s)):
                B = self.boundary(s, j)
                if s == 1:
                    total = np.zeros(self.module.dim, dtype=np.int64)
                    for i, l in zip(*np.nonzero(B)):
                        W = self.module.word_matrix(self.algebra.basis[i])
                        total += self.boundaries[0][l].astype(np.int64) @ W
                else:
                    total = np.zeros((self.algebra.dim, self.n_gens(s - 2)), dtype=np.int64)
                    for i, l in zip(*np.nonzero(B)):
                        total += self._apply(s - 1, int(i), self.boundary(s - 1, int(l)))
                if np.any(total % 2):
                    raise AssertionError(f"d^2 != 0 on generator {j} of C_{s}")

    def check_minimal(self) -> None:
        """No boundary has a unit coefficient (F2 (x)_A d = 0)."""
        u = self.algebra.unit
        for s in range(1, self.s_max + 1):
            for j in range(self.n_gens(s)):
                if self.boundaries[s][j][u].any():
                    raise AssertionError(f"non-minimal boundary on generator {j} of C_{s}")

    def check_exact(self) -> None:
        """Image of d_{s+1} equals kernel of d_s in every degree, and d_0 is onto."""
        M = self.module
        for t in range(M.lo, self.t_max + 1):
            mat0, _ = self.differential_matrix(0, t)
            if gf2.rank_dense(mat0) != len(M.indices_in_degree(t)):
                raise AssertionError(f"augmentation not onto in degree {t}")
            for s in range(0, self.s_max):
                d_s, _ = self.differential_matrix(s, t)
                ker = d_s.shape[0] - gf2.rank_dense(d_s)
                d_next, _ = self.differential_matrix(s + 1, t)
                img = gf2.rank_dense(d_next)
                if img != ker:
                    raise AssertionError(f"not exact at (s={s}, t={t}): ker {ker}, im {img}")

    def verify(self) -> None:
        self.check_minimal()
        self.check_d_squared()
        self.check_exact()


def minimal_resolution(
    M: A1Module, s_max: int, t_max: int, algebra: A1Algebra | None = None
) -> Resolution:
    """Minimal free A(1)-resolution of ``M`` through filtration ``s_max`` and
    internal degree ``t_max``."""
    if s_max < 0:
        raise WindowError("s_max must be nonnegative")
    if M.dim == 0:
        raise WindowError("cannot resolve the zero module")
    if t_max < M.lo:
        raise WindowError(f"t_max={t_max} is below the bottom degree {M.lo} of the module")
    A = algebra or a1()
    R = Resolution(
        M, s_max, t_max, A,
        gen_degrees=[[] for _ in range(s_max + 1)],
        boundaries=[[] for _ in range(s_max + 1)],
    )
    for t in range(M.lo, t_max + 1):
        # kernel of d_{s-1} in degree t, as 8 x G arrays (s = 0: the module itself)
        ker_prev: list[np.ndarray] = []
        idx = M.indices_in_degree(t)
        for k in idx:
            v = np.zeros(M.dim, dtype=np.uint8)
            v[k] = 1
            ker_prev.append(v)
        for s in range(s_max + 1):
            prev_width = M.dim if s == 0 else A.dim * R.n_gens(s - 1)
            prev_g = 0 if s == 0 else R.n_gens(s - 1)
            pairs = R.basis_pairs(s, t)
            if not pairs and not ker_prev:
                continue
            D = np.zeros((len(pairs), prev_width), dtype=np.uint8)
            for r, (i, j) in enumerate(pairs):
                D[r] = R._image_of_basis(s, i, j, prev_g)
            if s == 0:
                flat = [c for c in ker_prev]
            else:
                flat = [_pad(c, prev_g).reshape(-1) for c in ker_prev]
            cands = np.array(flat, dtype=np.uint8).reshape(-1, prev_width)
            for c in gf2.extend_basis(D, cands):
                R.gen_degrees[s].append(t)
                if s == 0:
                    R.boundaries[0].append(cands[c].copy())
                else:
                    R.boundaries[s].append(cands[c].reshape(A.dim, prev_g).copy())
            # kernel of d_s in degree t (new generators add nothing to it)
            ker_prev = []
            if pairs:
                K = gf2.left_kernel(D)
                g_now = R.n_gens(s)
                for row in K:
                    arr = np.zeros((A.dim, g_now), dtype=np.uint8)
                    for r in np.flatnonzero(row):
                        i, j = pairs[r]
                        arr[i, j] = 1
                    ker_prev.append(arr)
    log.debug(
        "resolved module [%d,%d] to s=%d t=%d: gens per s %s",
        M.lo, M.hi, s_max, t_max, [len(g) for g in R.gen_degrees],
    )
    return R
