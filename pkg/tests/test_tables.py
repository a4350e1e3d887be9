import json

import pytest

from discrete_radon.tables import emit_table, read_table, render_table


def test_empty_rows_header_only(tmp_path):
    path = tmp_path / "t.csv"
    emit_table([], str(path), "csv", ["a", "b"])
    assert path.read_text() == "a,b\n"
    assert read_table(str(path)) == []


def test_round_trip_csv_and_json(tmp_path):
    rows = [{"x": 0.1, "n": 3, "ok": True, "v": [1, 2]}, {"x": 1 / 3, "n": -1, "ok": False, "v": []}]
    p = tmp_path / "t.csv"
    emit_table(rows, str(p), "csv", ["x", "n", "ok", "v"])
    back = read_table(str(p))
    assert [float(r["x"]) for r in back] == [0.1, 1 / 3]
    assert [json.loads(r["v"]) for r in back] == [[1, 2], []]
    pj = tmp_path / "t.json"
    emit_table(rows, str(pj), "json")
    assert read_table(str(pj)) == rows


def test_column_order_and_precision():
    text = render_table([{"b": 2, "a": 0.1}], "csv", ["a", "b"])
    assert text.splitlines() == ["a,b", "0.10000000000000001,2"]


def test_complex_cells():
    text = render_table([{"z": 1 - 2j}], "json")
    assert json.loads(text)["rows"][0]["z"] == [1.0, -2.0]


def test_bad_format():
    with pytest.raises(ValueError):
        render_table([], "xml")
