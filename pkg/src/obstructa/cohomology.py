"""H*(P^N; F2) = F2[x]/(x^{N+1}), Steenrod squares on it, and Stiefel-Whitney
classes of multiples of the Hopf line bundle."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .dyadic import binom_mod2


class TruncationMismatch(ValueError):
    pass


@dataclass(frozen=True)
class CohomologyClass:
    """A sum of monomials x^d in H*(P^truncation); addition is symmetric difference."""

    truncation: int
    degrees: frozenset[int] = frozenset()

    def __post_init__(self):
        if self.truncation < 0:
            raise ValueError("truncation must be nonnegative")
        bad = [d for d in self.degrees if d < 0 or d > self.truncation]
        if bad:
            raise ValueError(f"degrees {sorted(bad)} outside 0..{self.truncation}")

    @classmethod
    def monomial(cls, d: int, truncation: int) -> "CohomologyClass":
        """x^d, or zero when d exceeds the truncation."""
        if d < 0:
            raise ValueError("negative degree")
        return cls(truncation, frozenset([d]) if d <= truncation else frozenset())

    @classmethod
    def zero(cls, truncation: int) -> "CohomologyClass":
        return cls(truncation)

    @classmethod
    def one(cls, truncation: int) -> "CohomologyClass":
        return cls.monomial(0, truncation)

    def is_zero(self) -> bool:
        return not self.degrees

    def is_monomial(self, d: int | None = None) -> bool:
        if len(self.degrees) != 1:
            return False
        return d is None or d in self.degrees

    def _check(self, other: "CohomologyClass") -> None:
        if self.truncation != other.truncation:
            raise TruncationMismatch(f"P^{self.truncation} vs P^{other.truncation}")

    def __add__(self, other: "CohomologyClass") -> "CohomologyClass":
        self._check(other)
        return CohomologyClass(self.truncation, self.degrees ^ other.degrees)

    __sub__ = __add__

    def __mul__(self, other: "CohomologyClass") -> "CohomologyClass":
        return multiply(self, other)

    def __iter__(self):
        return iter(sorted(self.degrees))

    def __str__(self) -> str:
        if not self.degrees:
            return "0"
        parts = []
        for d in sorted(self.degrees):
            parts.append("1" if d == 0 else ("x" if d == 1 else f"x^{d}"))
        return " + ".join(parts)


@dataclass(frozen=True)
class SteenrodWord:
    """Sq^{k1} Sq^{k2} ... Sq^{kr}, applied right to left."""

    factors: tuple[int, ...] = ()

    def __post_init__(self):
        if any((not isinstance(k, int)) or k < 1 for k in self.factors):
            raise ValueError(f"Steenrod word factors must be >= 1: {self.factors}")

    @property
    def degree(self) -> int:
        return sum(self.factors)

    def __str__(self) -> str:
        return " ".join(f"Sq{k}" for k in self.factors) if self.factors else "1"


@dataclass(frozen=True)
class BundleData:
    """The bundle ``multiple`` * xi over P^``base_dim``."""

    multiple: int
    base_dim: int


def sq(k: int, c: CohomologyClass) -> CohomologyClass:
    """Sq^k x^j = C(j, k) x^{j+k}, extended linearly; monomials past N drop."""
    if k < 0:
        raise ValueError("negative square")
    out: set[int] = set()
    for j in c.degrees:
        if binom_mod2(j, k) and j + k <= c.truncation:
            out ^= {j + k}
    return CohomologyClass(c.truncation, frozenset(out))


def sq_word(w: SteenrodWord | Iterable[int], c: CohomologyClass) -> CohomologyClass:
    factors = w.factors if isinstance(w, SteenrodWord) else tuple(w)
    for k in reversed(factors):
        c = sq(k, c)
        if c.is_zero():
            break
    return c


def multiply(a: CohomologyClass, b: CohomologyClass) -> CohomologyClass:
    a._check(b)
    out: set[int] = set()
    for i in a.degrees:
        for j in b.degrees:
            if i + j <= a.truncation:
                out ^= {i + j}
    return CohomologyClass(a.truncation, frozenset(out))


def sw_class(b: BundleData, i: int) -> CohomologyClass:
    """w_i(p xi) = C(p, i) x^i, read off from (1 + x)^p."""
    if i < 0:
        raise ValueError("negative class index")
    if binom_mod2(b.multiple, i):
        return CohomologyClass.monomial(i, b.base_dim)
    return CohomologyClass.zero(b.base_dim)


def total_sw(b: BundleData) -> CohomologyClass:
    return CohomologyClass(
        b.base_dim,
        frozenset(i for i in range(b.base_dim + 1) if binom_mod2(b.multiple, i)),
    )
