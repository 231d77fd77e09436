import json

import pytest

from obstructa import fixtures
from obstructa.fixtures import (
    compare_panel,
    load_axioms,
    load_charts,
    panel,
    panel_chart,
    verify_fixtures,
)


def test_verify_all_ok():
    checks = verify_fixtures()
    assert not [c.line() for c in checks if c.ok is False]
    assert any(c.ok is None for c in checks)  # homotopy charts are data only


@pytest.mark.parametrize("name", ["ko(P_16n+1)", "ko(P_16n+2)", "ko(P_16n+5)", "ko(P_16n+6)"])
@pytest.mark.parametrize("n", [3, 5, 6])
def test_panels_match_across_n(name, n):
    assert compare_panel(panel(name), n).ok


def test_panel_chart_shift():
    p = panel("ko(P_16n+1)")
    ch = panel_chart(p, 3)
    assert min(st for st, _ in ch.dots) == 49


def test_axioms_shape():
    ax = load_axioms()
    assert {"thomas-embedding", "circle-embedding"} <= set(ax["axioms"])
    assert ax["axioms"]["thomas-embedding"]["space"] == [8, 2]


def test_homotopy_charts_present():
    names = {c["name"] for c in load_charts()["homotopy"]}
    assert {"pi(P_16n+1)", "pi(P_8n-5)"} <= names


def test_detects_a_corrupted_panel(tmp_path, monkeypatch):
    for f in fixtures.fixture_dir().iterdir():
        (tmp_path / f.name).write_bytes(f.read_bytes())
    data = json.loads((tmp_path / "charts.json").read_text())
    data["ko"][0]["dots"].append([5, 0, 1])
    (tmp_path / "charts.json").write_text(json.dumps(data))
    monkeypatch.setenv("OBSTRUCTA_FIXTURES", str(tmp_path))
    assert compare_panel(panel(data["ko"][0]["name"]), 3).ok is False


def test_unknown_panel():
    with pytest.raises(KeyError):
        panel("ko(P_0)")
