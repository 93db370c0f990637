import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bec_ratchet.tables import (RunManifest, append_rows, count_data_rows,
                                emit_table, read_table)


def test_roundtrip_preserves_floats(tmp_path):
    rows = [(0.1, 1.0 / 3.0, True), (np.pi, -2.5e-17, False)]
    path = emit_table(rows, ["a", "b", "flag"], tmp_path / "t.csv")
    schema, back = read_table(path)
    assert schema == ["a", "b", "flag"]
    assert [(float(r[0]), float(r[1])) for r in back] == \
        [(a, b) for a, b, _ in rows]
    assert [r[2] for r in back] == ["true", "false"]


@given(st.lists(st.floats(allow_nan=False), min_size=1, max_size=20))
@settings(max_examples=50, deadline=None)
def test_seventeen_digits_roundtrip_any_float(xs):
    path = "/tmp/_tables_prop.csv"
    emit_table([(x,) for x in xs], ["x"], path)
    _, back = read_table(path)
    assert [float(r[0]) for r in back] == xs


def test_empty_table_has_header_only(tmp_path):
    path = emit_table([], ["x", "y"], tmp_path / "e.csv")
    assert path.read_text() == "x,y\n"
    assert count_data_rows(path) == 0


def test_row_width_mismatch(tmp_path):
    with pytest.raises(ValueError):
        emit_table([(1.0, 2.0)], ["only"], tmp_path / "w.csv")


def test_append_and_count(tmp_path):
    path = tmp_path / "a.csv"
    assert count_data_rows(path) == 0
    n = append_rows([(1.0,), (2.0,)], ["x"], path)
    assert n == 2
    assert count_data_rows(path) == 2
    append_rows([(3.0,)], ["x"], path)
    assert count_data_rows(path) == 3
    schema, rows = read_table(path)
    assert schema == ["x"]
    assert [float(r[0]) for r in rows] == [1.0, 2.0, 3.0]
    # header was written exactly once
    assert path.read_text().count("x\n") == 1


def test_line_endings_are_unix(tmp_path):
    path = emit_table([(1.5,)], ["x"], tmp_path / "n.csv")
    raw = path.read_bytes()
    assert b"\r" not in raw
    assert raw.endswith(b"\n")


def test_quoting_of_embedded_commas(tmp_path):
    path = emit_table([("a,b", 1.0)], ["name", "x"], tmp_path / "q.csv")
    schema, rows = read_table(path)
    assert rows == [["a,b", "1"]]


def test_unwritable_destination():
    with pytest.raises(OSError):
        emit_table([(1.0,)], ["x"], "/nonexistent_dir_xyz/t.csv")


def test_manifest_layout(tmp_path):
    man = RunManifest(command="demo", config_hash="ab12", outputs=["t.csv"],
                      wall_time=1.25, versions="numpy 2.0")
    path = man.write(tmp_path / "manifest.json")
    text = path.read_text()
    assert text.endswith("\n")
    data = json.loads(text)
    assert data == {"command": "demo", "config_hash": "ab12",
                    "outputs": ["t.csv"], "wall_time": 1.25,
                    "versions": "numpy 2.0"}
    assert list(data) == sorted(data)
