"""Transcribed input data: relation tables, printed charts and the axiom
registry.  ``OBSTRUCTA_FIXTURES`` points at a replacement directory."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .ext_a1.chart import ExtChart, ko_order, stunted_chart
from .mpt.model import MptModel
from .mpt.parser import parse_relations

QUATERNIONIC = "spin_quaternionic.rel"
STIEFEL = "spin_stiefel.rel"


def fixture_dir() -> Path:
    env = os.environ.get("OBSTRUCTA_FIXTURES")
    if env:
        return Path(env)
    return Path(str(resources.files("obstructa") / "data"))


def read_text(name: str) -> str:
    path = fixture_dir() / name
    if not path.exists():
        raise FileNotFoundError(f"fixture {name} not found in {fixture_dir()}")
    return path.read_text()


def load_model(name: str) -> MptModel:
    return _load_model(str(fixture_dir()), name)


@lru_cache(maxsize=None)
def _load_model(directory: str, name: str) -> MptModel:
    return parse_relations((Path(directory) / name).read_text())


def load_charts() -> dict:
    return json.loads(read_text("charts.json"))


def load_axioms() -> dict:
    return json.loads(read_text("axioms.json"))


def panel(name: str, kind: str = "ko") -> dict:
    for p in load_charts()[kind]:
        if p["name"] == name:
            return p
    raise KeyError(name)


def panel_chart(p: dict, n: int) -> ExtChart:
    """A transcribed panel as an ExtChart with absolute stems at ``n``."""
    shift = p["base"] * n
    return ExtChart(
        {(st + shift, s): m for st, s, m in p["dots"]},
        [(a + shift, s, i, j) for a, s, i, j in p.get("h0", [])],
        [(a + shift, s, i, j) for a, s, i, j in p.get("h1", [])],
        [t + shift for t in p.get("towers", [])],
        p["s_visible"],
        p["window"][1] + shift,
    )


def computed_panel(p: dict, n: int) -> ExtChart:
    """The engine's chart for the same module, clipped to the panel's view."""
    shift = p["base"] * n
    lo, hi = p["window"][0] + shift, p["window"][1] + shift
    ch = stunted_chart(shift + p["m"], hi).restrict(lo, hi)
    sv = p["s_visible"]
    return ExtChart(
        {k: v for k, v in ch.dots.items() if k[1] <= sv},
        [l for l in ch.h0 if l[1] + 1 <= sv],
        [l for l in ch.h1 if l[1] + 1 <= sv],
        ch.towers,
        sv,
        hi,
    )


@dataclass
class Check:
    name: str
    ok: bool | None  # None: nothing to recompute
    detail: str = ""

    def line(self) -> str:
        tag = {True: "ok", False: "MISMATCH", None: "data"}[self.ok]
        return f"{tag:8s} {self.name}" + (f"  {self.detail}" if self.detail else "")


def compare_panel(p: dict, n: int) -> Check:
    want, got = panel_chart(p, n), computed_panel(p, n)
    diffs = []
    for key in sorted(set(want.dots) | set(got.dots)):
        a, b = want.dots.get(key, 0), got.dots.get(key, 0)
        if a != b:
            diffs.append(f"dots at {key}: printed {a}, computed {b}")
    if sorted(want.towers) != sorted(got.towers):
        diffs.append(f"towers: printed {want.towers}, computed {got.towers}")
    for kind in ("h0", "h1"):
        if sorted(getattr(want, kind)) != sorted(getattr(got, kind)):
            diffs.append(f"{kind} lines differ")
    return Check(f"{p['name']} at n={n}", not diffs, "; ".join(diffs))


def verify_fixtures(ns=(3, 5)) -> list[Check]:
    """Recompute everything the engine can recompute and compare."""
    out: list[Check] = []
    charts = load_charts()
    for n in ns:
        for p in charts["ko"]:
            if p["base"] == 16:
                out.append(compare_panel(p, n))
    for n in (7, 11):
        for p in charts["ko"]:
            if p["base"] == 8:
                out.append(compare_panel(p, n))
    table = charts["ko_table"]
    for n in ns:
        for row, cols in table["rows"].items():
            i = 4 * n + int(row.split("+")[1])
            for moff, want in cols.items():
                m = table["base"] * n + int(moff)
                got = ko_order(i, m)
                out.append(Check(f"nu ko_{4 * i - 1}(P_{m})", got == want, f"{got} vs {want}"))
    st = charts["ko_stiefel"]
    for n in (7, 11):
        m = st["base"] * n + st["m"]
        for soff, want in st["values"].items():
            stem = st["base"] * n + int(soff)
            got = ko_order((stem + 1) // 4, m)
            out.append(Check(f"nu ko_{stem}(P_{m})", got == want, f"{got} vs {want}"))
    for name, counts in ((QUATERNIONIC, (3, [7, 6, 2, 1])), (STIEFEL, (1, [3, 3, 1]))):
        got = load_model(name).counts()
        out.append(Check(f"{name} parses", got == counts, f"classes/stages {got}"))
    for p in charts["homotopy"]:
        out.append(Check(p["name"], None, "transcribed only; no engine for full-algebra Ext"))
    return out
