"""Adams charts read off a minimal resolution, and the ko-order query."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .module import stunted_module
from .resolution import Resolution, WindowError, minimal_resolution


class TowerError(ValueError):
    """The requested stem carries an h0-tower (an integer summand)."""


@dataclass
class ExtChart:
    """Dots at (stem, filtration) with multiplicity, plus h0/h1 lines.

    A line is ``(stem, s, i, j)``: dot ``i`` at (stem, s) to dot ``j`` at
    (stem, s+1) for h0, or at (stem+1, s+1) for h1.  Dots within one
    bidegree are indexed in resolution order.
    """

    dots: dict[tuple[int, int], int] = field(default_factory=dict)
    h0: list[tuple[int, int, int, int]] = field(default_factory=list)
    h1: list[tuple[int, int, int, int]] = field(default_factory=list)
    towers: list[int] = field(default_factory=list)
    s_max: int = 0
    stem_max: int = 0

    def stem_dots(self, stem: int) -> list[int]:
        """Filtrations of the dots in ``stem`` (repeated by multiplicity)."""
        out = []
        for (st, s), mult in sorted(self.dots.items()):
            if st == stem:
                out.extend([s] * mult)
        return out

    def count(self, stem: int) -> int:
        return len(self.stem_dots(stem))

    def stems(self) -> list[int]:
        return sorted({st for st, _ in self.dots})

    def restrict(self, lo: int, hi: int) -> "ExtChart":
        keep = lambda st: lo <= st <= hi  # noqa: E731
        return ExtChart(
            {k: v for k, v in self.dots.items() if keep(k[0])},
            [l for l in self.h0 if keep(l[0])],
            [l for l in self.h1 if keep(l[0]) and keep(l[0] + 1)],
            [t for t in self.towers if keep(t)],
            self.s_max,
            min(self.stem_max, hi),
        )

    def to_dict(self) -> dict:
        return {
            "dots": [[st, s, m] for (st, s), m in sorted(self.dots.items())],
            "h0": [list(l) for l in sorted(self.h0)],
            "h1": [list(l) for l in sorted(self.h1)],
            "towers": sorted(self.towers),
            "s_max": self.s_max,
            "stem_max": self.stem_max,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: dict) -> "ExtChart":
        return cls(
            {(int(st), int(s)): int(m) for st, s, m in d["dots"]},
            [tuple(int(x) for x in l) for l in d.get("h0", [])],
            [tuple(int(x) for x in l) for l in d.get("h1", [])],
            [int(t) for t in d.get("towers", [])],
            int(d.get("s_max", 0)),
            int(d.get("stem_max", 0)),
        )

    @classmethod
    def from_json(cls, text: str) -> "ExtChart":
        return cls.from_dict(json.loads(text))


def ext_chart(R: Resolution, stem_max: int | None = None, truncated: bool = False) -> ExtChart:
    """Chart of a resolution.

    ``stem_max`` bounds the stems reported as reliable; by default it is the
    largest stem whose full column (filtrations 0..s_max) was computed.  When
    the module is a finite truncation of an infinite one (``truncated``), stems
    from its top class on are not reliable either.
    """
    reliable = R.t_max - R.s_max
    if truncated:
        reliable = min(reliable, R.module.hi - 1)
    if stem_max is None:
        stem_max = reliable
    elif stem_max > reliable:
        raise WindowError(f"stem {stem_max} beyond reliable window (<= {reliable})")
    A = R.algebra
    dots: Counter = Counter()
    # position of each generator within its bidegree
    local: list[dict[int, int]] = []
    for s in range(R.s_max + 1):
        seen: Counter = Counter()
        pos = {}
        for j, t in enumerate(R.gen_degrees[s]):
            pos[j] = seen[t]
            seen[t] += 1
            if t - s <= stem_max:
                dots[(t - s, s)] += 1
        local.append(pos)
    h0, h1 = [], []
    for s in range(1, R.s_max + 1):
        for j, t in enumerate(R.gen_degrees[s]):
            B = R.boundary(s, j)
            for coef_row, lines, shift in ((A.sq1, h0, 0), (A.sq2, h1, 1)):
                for l in np.flatnonzero(B[coef_row]):
                    src_t = R.gen_degrees[s - 1][l]
                    src_stem = src_t - (s - 1)
                    if src_stem <= stem_max and src_stem + shift <= stem_max:
                        lines.append((src_stem, s - 1, local[s - 1][l], local[s][j]))
    # a tower: the top filtration is reached by an h0 line
    towers = sorted({l[0] for l in h0 if l[1] == R.s_max - 1})
    return ExtChart(dict(dots), sorted(h0), sorted(h1), towers, R.s_max, stem_max)


def window_policy(stem: int, m: int) -> tuple[int, int]:
    """(s_max, top) for answering a query in ``stem`` about P_m."""
    s_max = max(8, stem - m + 2)
    top = stem + 6 * s_max + 8
    return s_max, top


@lru_cache(maxsize=None)
def _resolve_stunted(m: int, top: int, s_max: int) -> Resolution:
    return minimal_resolution(stunted_module(m, top), s_max, top)


def stunted_chart(m: int, stem: int, extra_top: int = 0) -> ExtChart:
    """Chart of ko_*(P_m) through ``stem`` using the truncation policy."""
    s_max, top = window_policy(stem, m)
    top += extra_top
    R = _resolve_stunted(m, top, s_max)
    return ext_chart(R, stem_max=stem, truncated=True)


@lru_cache(maxsize=None)
def ko_order(i: int, m: int, extra_top: int = 0) -> int:
    """nu(|ko_{4i-1}(P_m)|) as the dot count in stem 4i-1.

    Assumes the Adams spectral sequence for ko ^ P_m collapses and that
    extensions are all carried by h0-towers.  Stems below the bottom cell
    give 0.
    """
    if i < 1 or m < 0:
        raise ValueError("need i >= 1 and m >= 0")
    stem = 4 * i - 1
    if stem < m:
        return 0
    chart = stunted_chart(m, stem, extra_top)
    if stem > chart.stem_max:
        raise WindowError(f"stem {stem} outside reliable window {chart.stem_max}")
    if stem in chart.towers:
        raise TowerError(f"ko_{stem}(P_{m}) has an integer summand")
    return chart.count(stem)
