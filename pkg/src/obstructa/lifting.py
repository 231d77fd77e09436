"""The bo-level lifting test for multiples of the quaternionic Hopf bundle.

pH over HP^k lifts to B^o(m) exactly when m >= 2k and, for every i <= k,
nu C(p, i) >= nu |ko_{4i-1}(P_m)|.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

from .dyadic import nu_binom
from .ext_a1.chart import ko_order


@dataclass(frozen=True)
class LiftQuery:
    p: int
    k: int
    m: int


@dataclass(frozen=True)
class Failure:
    i: int
    nu_binom: int
    ko_order: int


@dataclass(frozen=True)
class LiftVerdict:
    query: LiftQuery
    lifts: bool
    dimension_ok: bool
    failures: tuple[Failure, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.lifts != (self.dimension_ok and not self.failures):
            raise AssertionError("incoherent lift verdict")

    def to_dict(self) -> dict:
        return {
            "p": self.query.p,
            "k": self.query.k,
            "m": self.query.m,
            "lifts": self.lifts,
            "dimension_ok": self.dimension_ok,
            "failures": [asdict(f) for f in self.failures],
        }


def bo_lift_decision(q: LiftQuery) -> LiftVerdict:
    """Check every index 1..k and collect all failures."""
    if q.k < 1:
        raise ValueError("k must be at least 1")
    if q.p < 0 or q.m < 0:
        raise ValueError("p and m must be nonnegative")
    dimension_ok = q.m >= 2 * q.k
    failures = []
    for i in range(1, q.k + 1):
        # C(p, i) = 0 for i > p: infinite valuation, never a failure
        if i > q.p:
            continue
        need = ko_order(i, q.m)
        have = nu_binom(q.p, i)
        if have < need:
            failures.append(Failure(i, have, need))
    return LiftVerdict(q, dimension_ok and not failures, dimension_ok, tuple(failures))
