"""Nonimmersion and embedding reproductions as replayable chains of checked steps.

Each ``derive_*`` function recomputes every verdict it relies on, compares it
with the value the argument needs, and raises :class:`DerivationError` on the
first disagreement.  Records serialize deterministically.
"""

from __future__ import annotations

import json
import threading
from collections import Counter
from dataclasses import dataclass, field
from typing import Any

from .cohomology import BundleData, sw_class
from .dyadic import alpha, nu_binom
from .ext_a1.chart import ko_order, stunted_chart
from .fixtures import QUATERNIONIC, STIEFEL, load_axioms, load_charts, load_model
from .lifting import LiftQuery, bo_lift_decision
from .mpt.analysis import (
    check_implication,
    delta_through_level1_fiber,
    forced_vanishing,
    kernel_trivial,
    quaternionic_pullback_check,
    variation_matrix,
)
from .mpt.model import parse_label

KINDS = (
    "immersion",
    "no-immersion",
    "embedding",
    "section-count",
    "lifting",
    "no-lifting",
    "stable-class",
)


class DerivationError(RuntimeError):
    pass


@dataclass(frozen=True)
class Statement:
    kind: str
    params: tuple[tuple[str, Any], ...]
    status: str = "derived"
    justification: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown statement kind {self.kind!r}")
        if self.status not in ("axiom", "derived", "refuted"):
            raise ValueError(f"unknown status {self.status!r}")
        if self.status == "derived" and not self.justification:
            raise ValueError("derived statements need a justification")

    @staticmethod
    def make(kind: str, status: str = "derived", justification=(), **params) -> "Statement":
        return Statement(kind, tuple(sorted(params.items())), status, tuple(justification))

    def get(self, key: str) -> Any:
        return dict(self.params)[key]

    def text(self) -> str:
        p = dict(self.params)
        if self.kind == "embedding":
            where = "S" if p.get("sphere") else "R"
            return f"P^{p['space']} embeds in {where}^{p['ambient']}"
        if self.kind == "immersion":
            return f"P^{p['space']} immerses in R^{p['ambient']}"
        if self.kind == "no-immersion":
            return f"P^{p['space']} does not immerse in R^{p['ambient']}"
        if self.kind in ("lifting", "no-lifting"):
            verb = "lifts to" if self.kind == "lifting" else "does not lift to"
            if p["target"].startswith("BO("):
                verb = "factors through" if self.kind == "lifting" else "does not factor through"
            return f"{p['bundle']} over {p['base']} {verb} {p['target']}"
        if self.kind == "section-count":
            return f"{p['bundle']} has at least {p['sections']} linearly independent sections"
        return f"{p['bundle']} is stably {p['stable_class']} (rank {p['rank']})"

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "params": dict(self.params),
            "status": self.status,
            "justification": list(self.justification),
            "text": self.text(),
        }


class Ledger:
    """Append-only list of statements; lookups read a snapshot."""

    def __init__(self):
        self._items: list[Statement] = []
        self._lock = threading.Lock()

    def add(self, st: Statement) -> Statement:
        with self._lock:
            self._items.append(st)
        return st

    def snapshot(self) -> tuple[Statement, ...]:
        with self._lock:
            return tuple(self._items)

    def find(self, kind: str, **params) -> Statement | None:
        for st in self.snapshot():
            if st.kind == kind and all(st.get(k) == v for k, v in params.items()):
                return st
        return None


@dataclass
class Step:
    rule: str
    inputs: dict
    verdict: Any
    uses: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {"rule": self.rule, "inputs": self.inputs, "verdict": self.verdict,
                "uses": list(self.uses)}


@dataclass
class DerivationRecord:
    name: str
    params: dict
    conclusion: Statement | None = None
    steps: list[Step] = field(default_factory=list)
    assumptions: list[str] = field(default_factory=list)
    statements: list[Statement] = field(default_factory=list)

    def step(self, rule: str, inputs: dict, verdict, expect=None, uses=()) -> Any:
        """Record one computation; with ``expect`` it must match."""
        self.steps.append(Step(rule, inputs, _plain(verdict), tuple(uses)))
        if expect is not None and _plain(verdict) != _plain(expect):
            raise DerivationError(
                f"{self.name}: step {rule} {inputs} gave {verdict!r}, argument needs {expect!r}"
            )
        return verdict

    def assume(self, *names: str) -> None:
        for nm in names:
            if nm not in self.assumptions:
                self.assumptions.append(nm)

    def note(self, st: Statement) -> Statement:
        self.statements.append(st)
        return st

    def check_provenance(self) -> None:
        for s in self.steps:
            for u in s.uses:
                if u not in self.assumptions:
                    raise DerivationError(f"step {s.rule} uses {u} without listing it")

    def to_dict(self) -> dict:
        return {
            "derivation": self.name,
            "params": self.params,
            "assumptions": list(self.assumptions),
            "steps": [s.to_dict() for s in self.steps],
            "statements": [s.to_dict() for s in self.statements],
            "conclusion": self.conclusion.to_dict() if self.conclusion else None,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1) + "\n"

    def transcript(self) -> str:
        lines = [f"{self.name} ({', '.join(f'{k}={v}' for k, v in sorted(self.params.items()))})"]
        lines.append("assumptions: " + (", ".join(self.assumptions) or "none"))
        for i, s in enumerate(self.steps, 1):
            args = ", ".join(f"{k}={_short(v)}" for k, v in s.inputs.items())
            lines.append(f"{i:3d}. {s.rule}({args}) -> {_short(s.verdict)}")
        for st in self.statements:
            lines.append(f"   => {st.text()}")
        if self.conclusion:
            lines.append(self.conclusion.text())
        return "\n".join(lines) + "\n"


def _plain(v):
    if isinstance(v, (set, frozenset)):
        return sorted(_plain(x) for x in v)
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    return v


def _short(v) -> str:
    return json.dumps(v, sort_keys=True, separators=(",", ":"))


# ---------------------------------------------------------------------------
# decision rules


def sanderson_reduce(n: int, k: int) -> Statement:
    """Immersion of P^n in R^{n+k} is equivalent to this lifting."""
    return Statement.make(
        "lifting", justification=("sanderson",),
        bundle=f"({n + k + 1})xi", base=f"P^{n}", target=f"BO({k})",
        multiple=n + k + 1, space=n, codim=k,
    )


def normal_twist_identity(p: int, q: int, ledger: Ledger) -> Statement:
    """nu (x) xi_q is stably (p+1) xi_q for an embedding P^q in R^p."""
    if ledger.find("embedding", space=q, ambient=p) is None:
        raise DerivationError(f"no embedding P^{q} in R^{p} in the ledger")
    return ledger.add(Statement.make(
        "stable-class", justification=("mahowald", f"embedding P^{q} in R^{p}"),
        bundle=f"nu(x)xi_{q}", base=f"P^{q}", stable_class=f"{p + 1}xi_{q}",
        multiple=p + 1, rank=p - q,
    ))


def mahowald_step(embed: Statement, sections: int, sphere_embed, ledger: Ledger) -> Statement:
    """From P^q in R^p, s sections of nu (x) xi_q and P^{s-1} in S^{m-1},
    conclude P^{s+q} in R^{p+m}."""
    if embed.kind != "embedding" or embed.get("sphere"):
        raise DerivationError("first premise must be a euclidean embedding")
    q, p = embed.get("space"), embed.get("ambient")
    if sections == 0:
        if sphere_embed not in (None, (-1, -1)):
            raise DerivationError("no sections: sphere data must be trivial")
        return ledger.add(Statement.make(
            "embedding", justification=("mahowald",), space=q, ambient=p, sphere=False))
    a, b = sphere_embed
    if a != sections - 1:
        raise DerivationError(f"need P^{sections - 1} in a sphere, got P^{a}")
    if ledger.find("embedding", space=a, ambient=b, sphere=True) is None:
        raise DerivationError(f"missing premise: P^{a} embeds in S^{b}")
    sec = [
        s for s in ledger.snapshot()
        if s.kind == "section-count" and s.get("bundle") == f"nu(x)xi_{q}"
        and s.get("sections") >= sections
    ]
    if not sec:
        raise DerivationError(f"missing premise: nu(x)xi_{q} has {sections} sections")
    m = b + 1
    return ledger.add(Statement.make(
        "embedding", justification=("mahowald", sec[0].text(), f"P^{a} embeds in S^{b}"),
        space=sections + q, ambient=p + m, sphere=False,
    ))


def haefliger_ok(ambient: int, manifold: int) -> bool:
    """Smoothing condition in the form 2 * ambient >= 3 * manifold."""
    return 2 * ambient >= 3 * manifold


def _axiom(name: str, n: int) -> Statement:
    ax = load_axioms()["axioms"][name]
    c1, o1 = ax["space"]
    c2, o2 = ax["ambient"]
    sphere = name == "circle-embedding"
    return Statement.make(
        "embedding", status="axiom", justification=(name,),
        space=c1 * n + o1, ambient=c2 * n + o2, sphere=sphere,
    )


def _trivial_fiber_degrees(pi_name: str, ko_m: int, n: int, max_s: int = 1) -> list[int]:
    """Stems where the transcribed homotopy chart has more dots in filtration
    <= max_s than the computed ko chart: elements mapping trivially."""
    charts = load_charts()
    p = next(c for c in charts["homotopy"] if c["name"] == pi_name)
    shift = p["base"] * n
    lo, hi = p["window"][0] + shift, p["window"][1] + shift
    ko = stunted_chart(ko_m, hi)
    pi_count: Counter = Counter()
    for st, s, m in p["dots"]:
        if s <= max_s:
            pi_count[st + shift] += m
    out = []
    for stem in range(lo, hi + 1):
        k = sum(1 for s in ko.stem_dots(stem) if s <= max_s)
        if pi_count[stem] > k:
            out.append(stem)
    return out


def _flip_sets(model, stage: int, n: int) -> dict[str, list[str]]:
    M = variation_matrix(model, stage, n)
    return {str(r): sorted(str(c) for c in M.flips(r)) for r in M.nonzero_rows()}


# ---------------------------------------------------------------------------
# reproductions


def derive_nonimmersion_2(n: int) -> DerivationRecord:
    """P^{16n+10} does not immerse in R^{32n+11} when alpha(n) = 2."""
    if alpha(n) != 2:
        raise DerivationError(f"needs alpha(n) = 2, got alpha({n}) = {alpha(n)}")
    rec = DerivationRecord("nonimmersion", {"n": n})
    ledger = Ledger()
    b, p = 16 * n, 8 * n + 3
    rec.assume("ass-collapse", "bo-lifting", "sanderson", "relation-tables", "ext-surjective")

    for i in (4 * n + 1, 4 * n + 2):
        rec.step("nu_binom", {"m": p, "k": i}, nu_binom(p, i), expect=2)
    table = load_charts()["ko_table"]
    rec.assume("charts.json")
    for row, cols in table["rows"].items():
        i = 4 * n + int(row.split("+")[1])
        for moff, want in cols.items():
            rec.step("ko_order", {"i": i, "m": b + int(moff)}, ko_order(i, b + int(moff)),
                     expect=want, uses=("ass-collapse", "charts.json"))

    pattern = [(4 * n + 1, b + 1, False), (4 * n + 1, b + 2, True),
               (4 * n + 2, b + 5, False), (4 * n + 2, b + 6, True)]
    for k, m, want in pattern:
        v = bo_lift_decision(LiftQuery(p, k, m))
        rec.step("bo_lift", {"p": p, "k": k, "m": m}, v.to_dict(),
                 uses=("bo-lifting",))
        if v.lifts != want:
            raise DerivationError(f"bo_lift({p},{k},{m}) gave {v.lifts}, argument needs {want}")
        rec.note(Statement.make(
            "lifting" if v.lifts else "no-lifting", justification=("bo-lifting",),
            bundle=f"{p}H", base=f"HP^{k}", target=f"B^o({m})"))

    # the two failures sit in k-invariants of degree 4i
    flipped = sorted({4 * f.i for k, m, _ in pattern
                      for f in bo_lift_decision(LiftQuery(p, k, m)).failures})
    rec.step("obstructed_degrees", {}, flipped, expect=[b + 4, b + 8])

    rec.assume("pi(P_16n+1)")
    fiber = _trivial_fiber_degrees("pi(P_16n+1)", b + 1, n)
    rec.step("trivially_mapping_stems", {"chart": "pi(P_16n+1)", "max_s": 1}, fiber,
             expect=[b + 4, b + 6, b + 8], uses=("pi(P_16n+1)", "ext-surjective"))
    rec.step("quaternionic_pullback_check", {"fiber_degrees": fiber, "hp_dim": 4 * n + 2},
             quaternionic_pullback_check(fiber, 4 * n + 2), expect=[])
    rec.note(Statement.make(
        "lifting", justification=("bo_lift", "quaternionic_pullback_check", "ext-surjective"),
        bundle=f"{p}H", base=f"HP^{4 * n + 2}", target="E_2",
        nontrivial="k(b+4), k(b+8)"))

    model = load_model(QUATERNIONIC)
    rec.assume(QUATERNIONIC)
    rec.step("bundle_multiple", {"model": QUATERNIONIC}, model.bundle.at(n), expect=4 * p)
    bd = model.bundle_data(n)
    rec.step("sw_class", {"p": bd.multiple, "i": 4, "N": bd.base_dim},
             str(sw_class(bd, 4)), expect=f"x^4", uses=(QUATERNIONIC,))
    rec.step("sw_class", {"p": bd.multiple, "i": 8, "N": bd.base_dim},
             str(sw_class(bd, 8)), expect=f"x^8", uses=(QUATERNIONIC,))
    M2 = variation_matrix(model, 2, n)
    rec.step("variation_matrix", {"stage": 2}, _flip_sets(model, 2, n), uses=(QUATERNIONIC,))
    ante = ["k(b+4)", "k(b+8)"]
    cons = ["k(b+10)", "k'(b+10)"]
    rec.step("check_implication", {"antecedent": ante, "consequent": cons},
             check_implication(M2, ante, cons), expect=True, uses=(QUATERNIONIC,))
    M1 = variation_matrix(model, 1, n)
    rec.step("variation_matrix", {"stage": 1}, _flip_sets(model, 1, n), uses=(QUATERNIONIC,))
    rec.step("kernel_trivial", {"stage": 1}, kernel_trivial(M1), expect=True,
             uses=(QUATERNIONIC,))
    N = 16 * n + 10
    rec.note(Statement.make(
        "no-lifting", justification=("check_implication", "kernel_trivial"),
        bundle=f"({4 * p})xi", base=f"P^{N}", target=f"BSp~({b + 1})"))

    red = sanderson_reduce(N, b + 1)
    rec.step("sanderson_reduce", {"n": N, "k": b + 1}, red.text(), uses=("sanderson",))
    if red.get("multiple") != 4 * p:
        raise DerivationError("reduction bundle does not match the tower's bundle")
    rec.note(Statement.make("no-lifting", justification=("sanderson",),
                            bundle=red.get("bundle"), base=f"P^{N}", target=f"BO({b + 1})"))
    rec.conclusion = ledger.add(Statement.make(
        "no-immersion", justification=("sanderson", "no-lifting"),
        space=N, ambient=N + b + 1))
    rec.check_provenance()
    return rec


def derive_stable_lift(n: int) -> DerivationRecord:
    """16n xi over P^{8n+2} lifts to BSp~(8n-5) when alpha(n) > 2."""
    if alpha(n) <= 2:
        raise DerivationError(f"needs alpha(n) > 2, got alpha({n}) = {alpha(n)}")
    rec = DerivationRecord("stable-lift", {"n": n})
    _stable_lift_steps(rec, n)
    rec.conclusion = rec.statements[-1]
    rec.check_provenance()
    return rec


def _stable_lift_steps(rec: DerivationRecord, n: int) -> None:
    m = 8 * n - 5
    p = 4 * n
    rec.assume("ass-collapse", "bo-lifting", "ext-surjective", "charts.json")
    rec.step("nu_binom", {"m": p, "k": 2 * n - 1}, nu_binom(p, 2 * n - 1) > 2, expect=True)
    rec.step("nu_binom", {"m": p, "k": 2 * n}, nu_binom(p, 2 * n), expect=alpha(n))
    st = load_charts()["ko_stiefel"]
    for soff, want in st["values"].items():
        stem = 8 * n + int(soff)
        rec.step("ko_order", {"i": (stem + 1) // 4, "m": m}, ko_order((stem + 1) // 4, m),
                 expect=want, uses=("ass-collapse", "charts.json"))
    rec.assume("pi(P_8n-5)")
    fiber = _trivial_fiber_degrees("pi(P_8n-5)", m, n, max_s=99)
    rec.step("trivially_mapping_stems", {"chart": "pi(P_8n-5)"}, fiber,
             uses=("pi(P_8n-5)", "ext-surjective"))
    if any(d % 4 == 3 and d <= 8 * n + 2 for d in fiber):
        raise DerivationError("fiber has homotopy in a degree 3 mod 4")
    rec.step("quaternionic_pullback_check", {"fiber_degrees": fiber, "hp_dim": 2 * n},
             quaternionic_pullback_check(fiber, 2 * n), expect=[])
    if alpha(n) > 3:
        v = bo_lift_decision(LiftQuery(p, 2 * n, m))
        rec.step("bo_lift", {"p": p, "k": 2 * n, "m": m}, v.to_dict(), uses=("bo-lifting",))
        if not v.lifts:
            raise DerivationError(f"bo_lift({p},{2 * n},{m}) fails for alpha(n) > 3")
    else:
        rec.assume("sq1-top-stage")
        for k, mm, want in ((2 * n, m + 2, True), (2 * n - 1, m, True), (2 * n, m, False)):
            v = bo_lift_decision(LiftQuery(p, k, mm))
            rec.step("bo_lift", {"p": p, "k": k, "m": mm}, v.to_dict(), uses=("bo-lifting",))
            if v.lifts != want:
                raise DerivationError(f"bo_lift({p},{k},{mm}) gave {v.lifts}, needs {want}")
        rec.note(Statement.make(
            "lifting", justification=("bo_lift", "quaternionic_pullback_check"),
            bundle=f"{p}H", base=f"HP^{2 * n}", target="E_3"))
        rec.step("top_stage_variation", {"k-invariant": f"k^3_{8 * n}", "through": f"K_{8 * n - 1}"},
                 "variable", uses=("sq1-top-stage",))
    rec.note(Statement.make(
        "lifting", justification=("bo-lifting", "quaternionic_pullback_check"),
        bundle=f"{16 * n}xi", base=f"P^{8 * n + 2}", target=f"BSp~({m})"))


def derive_embedding(n: int) -> DerivationRecord:
    """P^{8n+4} embeds smoothly in R^{16n+1} when alpha(n) > 2."""
    if alpha(n) <= 2:
        raise DerivationError(f"needs alpha(n) > 2, got alpha({n}) = {alpha(n)}")
    rec = DerivationRecord("embedding", {"n": n})
    ledger = Ledger()
    q, p = 8 * n + 2, 16 * n - 1
    rec.assume("thomas-embedding", "circle-embedding", "mahowald", "haefliger")
    th = ledger.add(_axiom("thomas-embedding", n))
    rec.step("axiom", {"name": "thomas-embedding"}, th.text(), uses=("thomas-embedding",))
    circ = ledger.add(_axiom("circle-embedding", n))
    rec.step("axiom", {"name": "circle-embedding"}, circ.text(), uses=("circle-embedding",))
    tw = normal_twist_identity(p, q, ledger)
    rec.step("normal_twist_identity", {"p": p, "q": q}, tw.text(), uses=("mahowald",))
    rec.step("stable_multiple", {}, tw.get("multiple"), expect=16 * n)
    rec.step("rank", {}, tw.get("rank"), expect=8 * n - 3)

    _stable_lift_steps(rec, n)

    model = load_model(STIEFEL)
    rec.assume(STIEFEL, "relation-tables")
    bd = BundleData(16 * n, q)
    rec.step("bundle_multiple", {"model": STIEFEL}, model.bundle.at(n), expect=16 * n)
    for i in (8 * n - 4, 4, 8):
        rec.step("sw_class", {"p": bd.multiple, "i": i, "N": q}, str(sw_class(bd, i)),
                 expect="0")
    want = [
        {"w(b-4)": ["k(b-3)"]},
        {"k(b-2)": ["k(b-2)"], "k(b-1)": ["k(b+2)"]},
        {"k(b-1)": ["k(b)"]},
    ]
    flippable: dict[int, set[str]] = {}
    for j, w in zip((1, 2, 3), want):
        got = _flip_sets(model, j, n)
        rec.step("variation_matrix", {"stage": j}, got, expect=w, uses=(STIEFEL,))
        flippable[j] = {c for cs in got.values() for c in cs}
    forced = {1: set(), 2: set(), 3: set()}
    for j, rel, cand in ((1, "k(b-1)", "k(b-2)"), (2, "k(b)", "k(b-1)")):
        rec.step("forced_vanishing", {"stage": j, "relation": rel, "candidate": cand},
                 forced_vanishing(model, j, rel, cand, n), expect=True, uses=(STIEFEL,))
        forced[j].add(str(parse_label(cand)))
    d = delta_through_level1_fiber(model, "k(b-1)", 8 * n - 5, n)
    rec.step("delta_through_level1_fiber", {"relation": "k(b-1)", "fiber_dim": 8 * n - 5},
             str(d), expect="0", uses=(STIEFEL,))
    forced[1].add("k(b-1)")
    for st in model.stages:
        left = {str(k) for k in st.labels()} - flippable[st.index] - forced[st.index]
        rec.step("all_k_invariants_handled", {"stage": st.index}, sorted(left), expect=[])
    rec.note(Statement.make(
        "lifting", justification=("variation_matrix", "forced_vanishing", "delta"),
        bundle="theta", base=f"P^{q}", target=f"BSpin({8 * n - 5})"))
    ledger.add(rec.note(Statement.make(
        "section-count", justification=("lifting to BSpin(8n-5)",),
        bundle=f"nu(x)xi_{q}", sections=2)))

    emb = mahowald_step(th, 2, (1, 1), ledger)
    rec.step("mahowald_step", {"sections": 2, "sphere": [1, 1]}, emb.text(), uses=("mahowald",))
    ok = haefliger_ok(emb.get("ambient"), emb.get("space"))
    rec.step("haefliger_ok", {"ambient": emb.get("ambient"), "manifold": emb.get("space")},
             ok, expect=True, uses=("haefliger",))
    rec.conclusion = ledger.add(Statement.make(
        "embedding", justification=("mahowald", "haefliger"),
        space=emb.get("space"), ambient=emb.get("ambient"), sphere=False, smooth=True))
    rec.check_provenance()
    return rec


DERIVATIONS = {
    "nonimmersion": derive_nonimmersion_2,
    "stable-lift": derive_stable_lift,
    "embedding": derive_embedding,
}


def replay(record: DerivationRecord) -> DerivationRecord:
    """Re-run a record from scratch and insist on an identical result."""
    again = DERIVATIONS[record.name](**record.params)
    if again.to_json() != record.to_json():
        raise DerivationError(f"replay of {record.name} {record.params} diverged")
    return again
