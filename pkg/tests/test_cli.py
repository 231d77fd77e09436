import io
import json
import subprocess
import sys
from pathlib import Path
from xml.etree import ElementTree

import pytest

from obstructa.cli import EXIT_ERROR, EXIT_MISMATCH, EXIT_OK, EXIT_USAGE, render_text, run
from obstructa.ext_a1.chart import ExtChart

GOLDEN = Path(__file__).parent / "golden"


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def test_nu_binom():
    assert call("nu-binom", "27", "13") == (EXIT_OK, "2\n", "")
    assert call("nu-binom", "8n+3", "4n+1", "--n", "5")[1] == "2\n"


def test_ko_order():
    assert call("ko-order", "--i", "13", "--m", "49")[:2] == (EXIT_OK, "3\n")
    assert call("ko-order", "--i", "4n+2", "--m", "16n+6", "--n", "3")[1] == "2\n"


def test_expect_mismatch_exit_code():
    code, _, err = call("ko-order", "--i", "13", "--m", "49", "--expect", "4")
    assert code == EXIT_MISMATCH and "differs" in err
    assert call("ko-order", "--i", "13", "--m", "49", "--expect", "3")[0] == EXIT_OK


def test_usage_errors():
    assert call("--bogus")[0] == EXIT_USAGE
    assert call("ko-order", "--i", "13")[0] == EXIT_USAGE
    assert call("nu-binom", "16n", "3")[0] == EXIT_USAGE  # needs --n
    assert call("mpt", "vary", "quaternionic", "--n", "3")[0] == EXIT_USAGE
    assert call("reproduce", "thm1.2")[0] == EXIT_USAGE


def test_computation_errors():
    assert call("nu-binom", "3", "5")[0] == EXIT_ERROR
    assert call("reproduce", "thm1.2", "--n", "3")[0] == EXIT_ERROR


def test_sq_and_sw():
    assert call("sq-eval", "2,3", "51", "--N", "58")[1] == "x^56\n"
    assert call("sw", "--p", "108", "--i", "4", "--N", "58")[1] == "x^4\n"
    assert call("sw", "--p", "112", "--i", "4", "--N", "58")[1] == "0\n"


def test_bo_lift():
    code, out, _ = call("bo-lift", "--p", "27", "--k", "13", "--m", "49", "--expect", "no")
    assert code == EXIT_OK and "i=13" in out
    code, out, _ = call("bo-lift", "--p", "27", "--k", "13", "--m", "50", "--format", "json")
    assert json.loads(out)["lifts"] is True


def test_mpt_commands():
    code, out, _ = call("mpt", "matrix", "quaternionic", "--stage", "2", "--n", "3")
    assert "k(b+3) (dim 50): {k'(b+8), k(b+4)}" in out
    args = ["mpt", "implies", "quaternionic", "--stage", "2", "--n", "3",
            "--ante", "k(b+4)", "k(b+8)", "--cons", "k(b+10)", "k'(b+10)"]
    assert call(*args)[1] == "true\n"
    assert call("mpt", "kernel", "quaternionic", "--stage", "1", "--n", "5")[1] == "true\n"
    assert call("mpt", "forced", "stiefel", "--stage", "1", "--relation", "k(b-1)",
                "--candidate", "k(b-2)", "--n", "7")[1] == "true\n"
    out = call("mpt", "vary", "quaternionic", "--stage", "2", "--fiber", "k(b+3)", "--n", "3")[1]
    assert "k'(b+8): x^56" in out


def test_mpt_parse_file(tmp_path):
    f = tmp_path / "t.rel"
    f.write_text("base 8n\nbundle 16n\nspace 8n+2\nstage 0\nw(b-4)\nstage 1\nk(b-3) = Sq2 w(b-4)\n")
    code, out, _ = call("mpt", "parse", str(f))
    assert code == EXIT_OK and "k(b-3) = Sq2 w(b-4)" in out
    f.write_text("base 8n\nbundle 16n\nspace 8n+2\nstage 0\nw(b-4)\nstage 1\nk(b-3) = Sq1 w(b-4)\n")
    code, _, err = call("mpt", "parse", str(f))
    assert code == EXIT_ERROR and "line 7" in err


def test_reproduce():
    code, out, _ = call("reproduce", "thm1.2", "--n", "7")
    assert code == EXIT_OK
    assert out.rstrip().endswith("P^60 embeds in R^113")
    code, out, _ = call("reproduce", "thm1.1-2", "--n", "3", "--expect",
                        "P^58 does not immerse in R^107")
    assert code == EXIT_OK
    a = call("reproduce", "lemma3.5", "--n", "7", "--format", "json")[1]
    b = call("reproduce", "lemma3.5", "--n", "7", "--format", "json")[1]
    assert a == b and json.loads(a)["derivation"] == "stable-lift"


def test_chart_text_golden():
    assert call("ext-chart", "--m", "49", "--stem", "57")[1] == \
        (GOLDEN / "chart_P49_57.txt").read_text()


def test_chart_json_golden_and_round_trip():
    out = call("ext-chart", "--m", "49", "--stem", "57", "--format", "json")[1]
    assert out == (GOLDEN / "chart_P49_57.json").read_text()
    d = json.loads(out)
    assert json.dumps(ExtChart.from_dict(d).to_dict(), sort_keys=True, separators=(",", ":")) \
        == out.strip()


def test_text_renderer_is_pure():
    d = json.loads((GOLDEN / "chart_P49_57.json").read_text())
    assert render_text(d) == render_text(json.loads(json.dumps(d)))
    assert render_text(d) == (GOLDEN / "chart_P49_57.txt").read_text()
    assert render_text({"dots": []}) == "(empty chart)\n"


def test_svg_is_self_contained():
    out = call("ext-chart", "--m", "50", "--stem", "57", "--format", "svg")[1]
    root = ElementTree.fromstring(out)
    assert root.tag.endswith("svg")
    assert "href" not in out and "url(" not in out
    assert out.count("<circle") > 10 and "<polygon" in out  # dots and tower arrows


def test_fixtures_verify():
    code, out, _ = call("fixtures", "verify")
    assert code == EXIT_OK
    assert "MISMATCH" not in out


def test_fixtures_override_env(tmp_path):
    import shutil

    from obstructa.fixtures import fixture_dir

    for f in fixture_dir().iterdir():
        shutil.copy(f, tmp_path / f.name)
    charts = json.loads((tmp_path / "charts.json").read_text())
    charts["ko_table"]["rows"]["4n+1"]["1"] = 4
    (tmp_path / "charts.json").write_text(json.dumps(charts))
    env = {"OBSTRUCTA_FIXTURES": str(tmp_path)}
    import os

    proc = subprocess.run([sys.executable, "-m", "obstructa.cli", "fixtures", "verify"],
                          env={**os.environ, **env}, capture_output=True, text=True)
    assert proc.returncode == EXIT_MISMATCH
    assert "MISMATCH" in proc.stdout


@pytest.mark.parametrize("argv", [["nu-binom", "27", "13", "--n", "3"], ["sw", "--p", "4n",
                                  "--i", "4", "--N", "58", "--n", "7"]])
def test_every_subcommand_takes_n(argv):
    assert call(*argv)[0] == EXIT_OK
