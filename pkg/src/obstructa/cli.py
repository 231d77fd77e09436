"""Command-line front end.

Exit codes: 0 success, 1 computation error, 2 usage error, 3 verdict differs
from ``--expect``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .cohomology import BundleData, CohomologyClass, sq_word, sw_class
from .dyadic import nu_binom
from .ext_a1.chart import stunted_chart
from .lifting import LiftQuery, bo_lift_decision
from .mpt.model import MptError, MptModel
from .mpt.parser import format_model, parse_linear, parse_relations

EXIT_OK, EXIT_ERROR, EXIT_USAGE, EXIT_MISMATCH = 0, 1, 2, 3

MODEL_ALIASES = {
    "quaternionic": "spin_quaternionic.rel",
    "stiefel": "spin_stiefel.rel",
}


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# chart rendering


def render_text(chart: dict) -> str:
    """Grid with stems across and filtration up.

    ``o`` is a dot (a digit for a multiplicity above one), ``^`` marks a tower
    at the top row, ``|`` an h0 line and ``/`` an h1 line.
    """
    dots = {(st, s): m for st, s, m in chart["dots"]}
    if not dots:
        return "(empty chart)\n"
    stems = [st for st, _ in dots]
    lo, hi = min(stems), max(stems)
    towers = set(chart.get("towers", []))
    top = max(s for _, s in dots)
    if towers:
        top = max(top, chart.get("s_max", 0))
    h0 = {(l[0], l[1]) for l in chart.get("h0", [])}
    h1 = {(l[0], l[1]) for l in chart.get("h1", [])}
    width = 3

    def cell(st, s):
        m = dots.get((st, s), 0)
        if s == top and st in towers:
            return "^"
        if m == 0:
            return "."
        return "o" if m == 1 else str(m)

    lines = []
    for s in range(top, -1, -1):
        row = "".join(cell(st, s).center(width) for st in range(lo, hi + 1))
        lines.append(f"{s:3d} {row.rstrip()}")
        if s > 0:
            conn = [" "] * ((hi - lo + 1) * width + 1)
            for st in range(lo, hi + 1):
                c = (st - lo) * width + 1
                if (st, s - 1) in h0:
                    conn[c] = "|"
                if (st, s - 1) in h1:
                    conn[c + 2] = "/"
            lines.append(("    " + "".join(conn)).rstrip())
    axis = "".join(f"{st:^{width}d}"[-width:] for st in range(lo, hi + 1))
    lines.append("    " + axis.rstrip())
    return "\n".join(lines) + "\n"


def render_svg(chart: dict, title: str = "") -> str:
    """Standalone SVG in the same convention as :func:`render_text`."""
    dots = {(st, s): m for st, s, m in chart["dots"]}
    stems = [st for st, _ in dots] or [0]
    lo, hi = min(stems), max(stems)
    top = max([chart.get("s_max", 0)] + [s for _, s in dots])
    u, pad = 40, 40
    W = (hi - lo + 1) * u + 2 * pad
    H = (top + 1) * u + 2 * pad

    def pos(st, s, i=0, mult=1):
        x = pad + (st - lo + 0.5) * u + (i - (mult - 1) / 2) * 8
        y = H - pad - (s + 0.5) * u
        return round(x, 1), round(y, 1)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}" font-family="monospace" font-size="11">',
        f'<rect width="{W}" height="{H}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{pad}" y="16">{_esc(title)}</text>')
    for st in range(lo, hi + 1):
        x, _ = pos(st, 0)
        out.append(f'<text x="{x}" y="{H - pad + 16}" text-anchor="middle">{st}</text>')
    for s in range(top + 1):
        _, y = pos(lo, s)
        out.append(f'<text x="{pad - 16}" y="{y + 4}" text-anchor="end">{s}</text>')
    for kind, dst in (("h0", 0), ("h1", 1)):
        for st, s, i, j in chart.get(kind, []):
            x1, y1 = pos(st, s, i, dots.get((st, s), 1))
            x2, y2 = pos(st + dst, s + 1, j, dots.get((st + dst, s + 1), 1))
            out.append(f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="black"/>')
    for (st, s), m in sorted(dots.items()):
        for i in range(m):
            x, y = pos(st, s, i, m)
            out.append(f'<circle cx="{x}" cy="{y}" r="3" fill="black"/>')
    for st in chart.get("towers", []):
        x, y = pos(st, top)
        out.append(f'<line x1="{x}" y1="{y}" x2="{x}" y2="{y - u / 2}" stroke="black"/>')
        out.append(
            f'<polygon points="{x - 4},{y - u / 2 + 6} {x + 4},{y - u / 2 + 6} '
            f'{x},{y - u / 2 - 2}" fill="black"/>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


# ---------------------------------------------------------------------------
# helpers


def _value(text: str, n: int | None) -> int:
    """An integer or an expression like ``16n+2``."""
    try:
        return int(text)
    except ValueError:
        pass
    try:
        lin = parse_linear(text)
    except MptError:
        raise UsageError(f"not an integer or <c>n+<off>: {text!r}") from None
    if lin.coef and n is None:
        raise UsageError(f"{text!r} needs --n")
    return lin.at(n or 0)


def _need_n(args) -> int:
    if args.n is None:
        raise UsageError("this command needs --n")
    return args.n


def _load(spec: str) -> MptModel:
    from .fixtures import load_model

    if spec in MODEL_ALIASES:
        return load_model(MODEL_ALIASES[spec])
    path = Path(spec)
    if path.exists():
        return parse_relations(path.read_text())
    try:
        return load_model(spec)
    except FileNotFoundError:
        raise UsageError(f"no relation file {spec!r}") from None


def _emit(fmt: str, verdict, data=None, text: str | None = None) -> tuple[str, str]:
    if fmt == "json":
        return str(verdict), json.dumps(data if data is not None else verdict, sort_keys=True) + "\n"
    return str(verdict), (text if text is not None else f"{verdict}\n")


def _verdict(v) -> str:
    if isinstance(v, bool):
        return "yes" if v else "no"
    return str(v)


# ---------------------------------------------------------------------------
# subcommands; each returns (verdict, rendered output)


def cmd_nu_binom(a):
    m, k = _value(a.m, a.n), _value(a.k, a.n)
    v = nu_binom(m, k)
    return _emit(a.format, v, {"m": m, "k": k, "nu": v})


def cmd_sq_eval(a):
    N = _value(a.N, a.n)
    word = [int(x) for x in a.word.split(",") if x]
    cls = sq_word(word, CohomologyClass.monomial(_value(a.deg, a.n), N))
    return _emit(a.format, cls, {"word": word, "N": N, "degrees": sorted(cls.degrees)})


def cmd_sw(a):
    b = BundleData(_value(a.p, a.n), _value(a.N, a.n))
    cls = sw_class(b, _value(a.i, a.n))
    return _emit(a.format, cls, {"p": b.multiple, "N": b.base_dim, "degrees": sorted(cls.degrees)})


def cmd_ko_order(a):
    from .ext_a1.chart import ko_order

    i, m = _value(a.i, a.n), _value(a.m, a.n)
    v = ko_order(i, m)
    return _emit(a.format, v, {"i": i, "m": m, "nu": v})


def cmd_ext_chart(a):
    m, stem = _value(a.m, a.n), _value(a.stem, a.n)
    ch = stunted_chart(m, stem)
    lo = _value(a.lo, a.n) if a.lo is not None else m
    d = ch.restrict(lo, stem).to_dict()
    if a.format == "json":
        return "chart", json.dumps(d, sort_keys=True, separators=(",", ":")) + "\n"
    if a.format == "svg":
        return "chart", render_svg(d, f"Ext_A(1)(P_{m}) through stem {stem}")
    return "chart", render_text(d)


def cmd_bo_lift(a):
    q = LiftQuery(_value(a.p, a.n), _value(a.k, a.n), _value(a.m, a.n))
    v = bo_lift_decision(q)
    text = f"{_verdict(v.lifts)}\n" + "".join(
        f"  fails at i={f.i}: nu C(p,i)={f.nu_binom} < {f.ko_order}\n" for f in v.failures
    )
    if not v.dimension_ok:
        text += "  m < 2k\n"
    return _emit(a.format, _verdict(v.lifts), v.to_dict(), text)


def cmd_mpt(a):
    from .mpt import analysis as an

    model = _load(a.model)
    if a.action == "parse":
        counts = model.counts()
        return _emit(a.format, "ok", {"classes": counts[0], "stages": counts[1]},
                     format_model(model))
    n = _need_n(a)
    if a.action == "vary":
        delta = an.variation_delta(model, a.stage, a.fiber, n)
        data = {str(k): sorted(v.degrees) for k, v in delta.items()}
        text = "".join(f"{k}: {v}\n" for k, v in delta.items())
        return _emit(a.format, "ok", data, text)
    M = an.variation_matrix(model, a.stage, n)
    if a.action == "matrix":
        text = "".join(
            f"{r} (dim {d}): {{{', '.join(sorted(str(c) for c in M.flips(r)))}}}\n"
            for r, d in zip(M.rows, M.fiber_dims)
        )
        return _emit(a.format, "ok", M.to_dict(), text)
    if a.action == "implies":
        v = an.check_implication(M, a.ante, a.cons)
    elif a.action == "kernel":
        v = an.kernel_trivial(M)
    else:
        if not (a.relation and a.candidate):
            raise UsageError("forced needs --relation and --candidate")
        v = an.forced_vanishing(model, a.stage, a.relation, a.candidate, n)
    v = "true" if v else "false"
    return _emit(a.format, v)


def cmd_reproduce(a):
    from . import derivations as dv

    fn = {"thm1.1-2": dv.derive_nonimmersion_2, "thm1.2": dv.derive_embedding,
          "lemma3.5": dv.derive_stable_lift}[a.which]
    rec = fn(_need_n(a))
    verdict = rec.conclusion.text()
    if a.format == "json":
        return verdict, rec.to_json()
    return verdict, rec.transcript()


def cmd_fixtures(a):
    from .fixtures import verify_fixtures

    checks = verify_fixtures()
    bad = [c for c in checks if c.ok is False]
    text = "".join(c.line() + "\n" for c in checks)
    text += f"{len(checks) - len(bad)}/{len(checks)} checks without mismatch\n"
    verdict = "ok" if not bad else "mismatch"
    data = [{"name": c.name, "ok": c.ok, "detail": c.detail} for c in checks]
    return _emit(a.format, verdict, data, text)


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, help="instantiate expressions in n")
    common.add_argument("--format", choices=("text", "json", "svg"), default="text")
    common.add_argument("--expect", help="exit 3 unless the verdict equals this")

    p = argparse.ArgumentParser(prog="obstructa", parents=[common])
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("nu-binom", parents=[common], help="2-adic valuation of C(m, k)")
    s.add_argument("m")
    s.add_argument("k")
    s.set_defaults(fn=cmd_nu_binom)

    s = sub.add_parser("sq-eval", parents=[common], help="Steenrod word on x^deg in P^N")
    s.add_argument("word", help="comma separated, applied right to left: 2,1 is Sq2 Sq1")
    s.add_argument("deg")
    s.add_argument("--N", required=True)
    s.set_defaults(fn=cmd_sq_eval)

    s = sub.add_parser("sw", parents=[common], help="w_i of p xi over P^N")
    s.add_argument("--p", required=True)
    s.add_argument("--i", required=True)
    s.add_argument("--N", required=True)
    s.set_defaults(fn=cmd_sw)

    s = sub.add_parser("ko-order", parents=[common], help="nu |ko_{4i-1}(P_m)|")
    s.add_argument("--i", required=True)
    s.add_argument("--m", required=True)
    s.set_defaults(fn=cmd_ko_order)

    s = sub.add_parser("ext-chart", parents=[common], help="Ext chart of P_m")
    s.add_argument("--m", required=True)
    s.add_argument("--stem", required=True)
    s.add_argument("--lo", help="first stem shown (default m)")
    s.set_defaults(fn=cmd_ext_chart)

    s = sub.add_parser("bo-lift", parents=[common], help="does pH over HP^k lift to B^o(m)")
    s.add_argument("--p", required=True)
    s.add_argument("--k", required=True)
    s.add_argument("--m", required=True)
    s.set_defaults(fn=cmd_bo_lift)

    s = sub.add_parser("mpt", parents=[common], help="tower indeterminacy")
    s.add_argument("action", choices=("parse", "vary", "matrix", "implies", "kernel", "forced"))
    s.add_argument("model", help="relation file, or 'quaternionic' / 'stiefel'")
    s.add_argument("--stage", type=int, default=1)
    s.add_argument("--fiber")
    s.add_argument("--ante", nargs="+", default=[])
    s.add_argument("--cons", nargs="+", default=[])
    s.add_argument("--relation")
    s.add_argument("--candidate")
    s.set_defaults(fn=cmd_mpt)

    s = sub.add_parser("reproduce", parents=[common], help="run a derivation")
    s.add_argument("which", choices=("thm1.1-2", "thm1.2", "lemma3.5"))
    s.set_defaults(fn=cmd_reproduce)

    s = sub.add_parser("fixtures", parents=[common], help="check bundled data")
    s.add_argument("action", choices=("verify",))
    s.set_defaults(fn=cmd_fixtures)
    return p


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if args.cmd == "mpt" and args.action == "vary" and not args.fiber:
        err.write("obstructa: mpt vary needs --fiber\n")
        return EXIT_USAGE
    try:
        verdict, text = args.fn(args)
    except UsageError as exc:
        err.write(f"obstructa: {exc}\n")
        return EXIT_USAGE
    except (ValueError, RuntimeError) as exc:
        err.write(f"obstructa: {exc}\n")
        return EXIT_ERROR
    out.write(text)
    if args.expect is not None and args.expect.strip() != str(verdict).strip():
        err.write(f"obstructa: verdict {verdict!r} differs from expected {args.expect!r}\n")
        return EXIT_MISMATCH
    if args.cmd == "fixtures" and verdict != "ok":
        return EXIT_MISMATCH
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
