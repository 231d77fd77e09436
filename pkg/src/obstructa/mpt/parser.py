"""Line-oriented relation files.

    # comment
    base 16n
    bundle 32n+12
    space 16n+10
    stage 0
    w(b+2)
    stage 1
    k(b+3) = Sq2 w(b+2)
    k'(b+9) = (Sq8+w8) w(b+2)
      + w4Sq2 w(b+4)
    stage 2
    k(b+4) = Sq2 k(b+3)@1 + Sq1 k(b+4)@1

Lines whose first non-blank character is ``+`` continue the previous
relation.  Comments attach to the next item (trailing comments on a line
attach to that line's item) and are printed back as comment lines.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .model import (
    KInvariant,
    Label,
    Linear,
    MptError,
    MptModel,
    Relation,
    Source,
    Stage,
    Term,
    WClass,
    parse_label,
)


class MptParseError(MptError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class MptSyntaxError(MptParseError):
    pass


class DegreeImbalance(MptParseError):
    pass


class DanglingSource(MptParseError):
    pass


_LINEAR = re.compile(r"^(?:(\d+)\s*n)?\s*(?:([+-])?\s*(\d+))?$")
_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<src>[wk]'?\s*\(\s*b\s*(?:[+-]\s*\d+)?\s*\)(?:\s*@\s*\d+)?)"
    r"|Sq(?P<sq>\d+)"
    r"|w(?P<coef>\d+)"
    r"|(?P<punct>[()+])"
    r")"
)
_COEFS = {4, 8}


def parse_linear(text: str, lineno: int = 0) -> Linear:
    m = _LINEAR.match(text.replace(" ", ""))
    if not m or not text.strip() or (m.group(1) is None and m.group(3) is None):
        raise MptSyntaxError(lineno, f"expected <c>n+<off>, got {text!r}")
    coef = int(m.group(1) or 0)
    off = int(m.group(3) or 0) * (-1 if m.group(2) == "-" else 1)
    return Linear(coef, off)


def _tokenize(text: str, lineno: int) -> list[tuple[str, object]]:
    out = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise MptSyntaxError(lineno, f"unexpected text {text[pos:].strip()!r}")
        pos = m.end()
        if m.group("src"):
            raw = m.group("src").replace(" ", "")
            lab_text, _, stage = raw.partition("@")
            try:
                lab = parse_label(lab_text)
            except MptError as exc:
                raise MptSyntaxError(lineno, str(exc)) from None
            if lab.kind == "k" and not stage:
                raise MptSyntaxError(lineno, f"k-invariant source {raw!r} needs @<stage>")
            if lab.kind == "w" and stage:
                raise MptSyntaxError(lineno, f"w-class source {raw!r} takes no stage")
            out.append(("src", Source(lab, int(stage) if stage else 0)))
        elif m.group("sq"):
            k = int(m.group("sq"))
            if k < 1:
                raise MptSyntaxError(lineno, "Sq0 is not allowed")
            out.append(("sq", k))
        elif m.group("coef"):
            c = int(m.group("coef"))
            if c not in _COEFS:
                raise MptSyntaxError(lineno, f"coefficient w{c} not supported (w4, w8)")
            out.append(("coef", c))
        else:
            out.append(("p", m.group("punct")))
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return out


class _ExprParser:
    """sum := prod ('+' prod)* ; prod := atom+ ; atom := Sq | w4 | w8 | source | '(' sum ')'.

    Values are lists of monomials (tuples of tokens); products distribute.
    """

    def __init__(self, tokens, lineno):
        self.toks = tokens
        self.i = 0
        self.lineno = lineno

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def parse(self):
        val = self.sum()
        if self.peek() is not None:
            raise MptSyntaxError(self.lineno, f"unexpected {self.peek()[1]!r}")
        return val

    def sum(self):
        out = list(self.prod())
        while self.peek() == ("p", "+"):
            self.i += 1
            out.extend(self.prod())
        return out

    def prod(self):
        acc = [()]
        got = False
        while True:
            tok = self.peek()
            if tok is None or tok == ("p", "+") or tok == ("p", ")"):
                break
            if tok == ("p", "("):
                self.i += 1
                inner = self.sum()
                if self.peek() != ("p", ")"):
                    raise MptSyntaxError(self.lineno, "unbalanced parenthesis")
                self.i += 1
            else:
                self.i += 1
                inner = [(tok,)]
            acc = [a + b for a in acc for b in inner]
            got = True
        if not got:
            raise MptSyntaxError(self.lineno, "empty term")
        return acc


def _monomial_to_term(mono, lineno) -> Term:
    coef, word = [], []
    src = None
    for kind, val in mono:
        if src is not None:
            raise MptSyntaxError(lineno, "source class must end its term")
        if kind == "coef":
            if word:
                raise MptSyntaxError(
                    lineno, f"coefficient w{val} after a Steenrod operation"
                )
            coef.append(val)
        elif kind == "sq":
            word.append(val)
        elif kind == "src":
            src = val
    if src is None:
        raise MptSyntaxError(lineno, "term without a source class")
    return Term(tuple(sorted(coef)), tuple(word), src)


def parse_relation(text: str, lineno: int = 0) -> Relation:
    if text.strip() == "0":
        return Relation(())
    mono = _ExprParser(_tokenize(text, lineno), lineno).parse()
    return Relation.from_terms(_monomial_to_term(m, lineno) for m in mono)


@dataclass
class _Pending:
    lineno: int
    label: Label
    rhs: str
    notes: list[str] = field(default_factory=list)


def _split_comment(line: str) -> tuple[str, str | None]:
    body, hash_, rest = line.partition("#")
    return body.rstrip(), (rest.strip() if hash_ else None)


def parse_relations(text: str) -> MptModel:
    """Parse and validate a relation file."""
    headers: dict[str, Linear] = {}
    notes: list[str] = []
    pending_notes: list[str] = []
    classes: list[WClass] = []
    stage0_notes: list[str] = []
    stages: list[dict] = []
    current: int | None = None
    last: _Pending | None = None

    def flush():
        nonlocal last
        if last is None:
            return
        rel = parse_relation(last.rhs, last.lineno)
        stages[-1]["ks"].append((last.lineno, KInvariant(last.label, rel, tuple(last.notes))))
        last = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        body, comment = _split_comment(raw)
        stripped = body.strip()
        if not stripped:
            if comment is not None:
                pending_notes.append(comment)
            continue
        if stripped.startswith("+"):
            if last is None:
                raise MptSyntaxError(lineno, "continuation line without a relation")
            last.rhs += " " + stripped
            if comment is not None:
                last.notes.append(comment)
            continue
        flush()
        words = stripped.split(None, 1)
        key = words[0]
        if key in ("base", "bundle", "space"):
            if current is not None:
                raise MptSyntaxError(lineno, f"header {key!r} after stage blocks")
            if key in headers:
                raise MptSyntaxError(lineno, f"duplicate header {key!r}")
            if len(words) < 2:
                raise MptSyntaxError(lineno, f"header {key!r} needs a value")
            headers[key] = parse_linear(words[1], lineno)
            notes.extend(pending_notes + ([comment] if comment else []))
            pending_notes = []
            continue
        if key == "stage":
            try:
                j = int(words[1])
            except (IndexError, ValueError):
                raise MptSyntaxError(lineno, "stage needs an integer index") from None
            expected = 0 if current is None else current + 1
            if j != expected:
                raise MptSyntaxError(lineno, f"expected stage {expected}, got {j}")
            current = j
            here = pending_notes + ([comment] if comment else [])
            pending_notes = []
            if j == 0:
                stage0_notes.extend(here)
            else:
                stages.append({"index": j, "ks": [], "notes": tuple(here), "lineno": lineno})
            continue
        if current is None:
            raise MptSyntaxError(lineno, "class line before any stage block")
        here = pending_notes + ([comment] if comment else [])
        pending_notes = []
        if current == 0:
            try:
                lab = parse_label(stripped)
            except MptError:
                raise MptSyntaxError(lineno, f"expected w(b+d), got {stripped!r}") from None
            if lab.kind != "w":
                raise MptSyntaxError(lineno, "stage 0 holds w-classes only")
            if any(w.label == lab for w in classes):
                raise MptSyntaxError(lineno, f"duplicate class {lab}")
            classes.append(WClass(lab, tuple(here)))
            continue
        lhs, eq, rhs = stripped.partition("=")
        if not eq:
            raise MptSyntaxError(lineno, f"expected 'k(b+d) = ...', got {stripped!r}")
        try:
            lab = parse_label(lhs)
        except MptError:
            raise MptSyntaxError(lineno, f"bad k-invariant label {lhs.strip()!r}") from None
        if lab.kind != "k" or re.search(r"k\s*\d", lhs):
            raise MptSyntaxError(lineno, f"bad k-invariant label {lhs.strip()!r}")
        last = _Pending(lineno, lab, rhs, here)
    flush()
    trailer = tuple(pending_notes)

    for key in ("base", "bundle", "space"):
        if key not in headers:
            raise MptSyntaxError(0, f"missing header {key!r}")
    if not classes:
        raise MptSyntaxError(0, "no stage-0 classes")

    built: list[Stage] = []
    known = {0: {w.label for w in classes}}
    for st in stages:
        j = st["index"]
        labels: set[Label] = set()
        ks = []
        for lineno, k in st["ks"]:
            if k.label in labels:
                raise MptSyntaxError(lineno, f"duplicate k-invariant {k.label} in stage {j}")
            labels.add(k.label)
            for t in k.relation.terms:
                src = t.source
                ok = src.label in known[0] if src.label.kind == "w" else (
                    src.stage == j - 1 and src.label in known.get(j - 1, set())
                )
                if not ok:
                    raise DanglingSource(
                        lineno, f"{k.label} references {src}, not a stage-{j - 1} class"
                    )
                if t.degree_offset() != k.label.offset + 1:
                    raise DegreeImbalance(
                        lineno, f"term {t} has degree b{t.degree_offset():+d}, "
                        f"{k.label} needs b{k.label.offset + 1:+d}"
                    )
            ks.append(k)
        known[j] = labels
        built.append(Stage(j, tuple(ks), st["notes"]))
    return MptModel(
        headers["base"], headers["bundle"], headers["space"],
        tuple(classes), tuple(built), tuple(notes), tuple(stage0_notes), trailer,
    )


def format_model(model: MptModel) -> str:
    """Normalized text; parse(format(m)) == m."""
    out: list[str] = []

    def emit_notes(ns):
        out.extend(f"# {n}" if n else "#" for n in ns)

    emit_notes(model.notes)
    out.append(f"base {model.base}")
    out.append(f"bundle {model.bundle}")
    out.append(f"space {model.space}")
    emit_notes(model.stage0_notes)
    out.append("stage 0")
    for w in model.classes:
        emit_notes(w.notes)
        out.append(str(w.label))
    for st in model.stages:
        emit_notes(st.notes)
        out.append(f"stage {st.index}")
        for k in st.k_invariants:
            emit_notes(k.notes)
            out.append(f"{k.label} = {k.relation}")
    emit_notes(model.trailer)
    return "\n".join(out) + "\n"
