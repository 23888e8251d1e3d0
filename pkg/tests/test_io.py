import json
import os

import numpy as np
import pytest

from timecloak.io import (
    atomic_write_bytes,
    atomic_write_text,
    field_to_csv,
    read_field_binary,
    trace_to_csv,
    write_field_binary,
    write_json,
    write_trace_csv,
)
from timecloak.wavesolver import (
    BoundarySignal,
    Grid,
    boundary_trace,
    solve_physical,
    suggest_dt,
)


def make_trace():
    h = 2.0 / 64
    grid = Grid.build(1, 1.0, 65, -1.0, 0.5, suggest_dt(h, 1.0, 1.0, 1, 0.9), 0.9)
    sig = BoundarySignal(shape="ricker", t_on=-0.9, t_off=-0.35, amplitude=1.0,
                         faces=("x_min",))
    return boundary_trace(solve_physical(grid, 1.0, sig))


# ---------------------------------------------------------------------------
# atomic writes
# ---------------------------------------------------------------------------


def test_atomic_write_bytes(tmp_path):
    p = tmp_path / "sub" / "blob.bin"
    atomic_write_bytes(p, b"\x00\x01payload")
    assert p.read_bytes() == b"\x00\x01payload"
    atomic_write_bytes(p, b"second")
    assert p.read_bytes() == b"second"
    # no temp droppings left behind
    assert sorted(os.listdir(tmp_path / "sub")) == ["blob.bin"]


def test_atomic_write_text(tmp_path):
    p = tmp_path / "a.txt"
    atomic_write_text(p, "héllo\n")
    assert p.read_text(encoding="utf-8") == "héllo\n"


def test_write_json_is_canonical(tmp_path):
    p = tmp_path / "r.json"
    write_json(p, {"b": 1.5, "a": [1, 2]})
    text = p.read_text()
    assert text.endswith("\n")
    assert text.index('"a"') < text.index('"b"')  # sorted keys
    assert json.loads(text) == {"a": [1, 2], "b": 1.5}


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------


def test_trace_csv_layout(tmp_path):
    tr = make_trace()
    csv = trace_to_csv(tr)
    lines = csv.strip().split("\n")
    header = lines[0].split(",")
    assert header[0] == "time"
    assert header[1].startswith("x_max:dirichlet[")  # faces sort alphabetically
    assert len(lines) == 1 + len(tr.times)
    # repr floats round-trip exactly
    row = lines[5].split(",")
    assert float(row[0]) == tr.times[4]
    p = tmp_path / "trace.csv"
    write_trace_csv(p, tr)
    assert p.read_text() == csv


def test_trace_csv_deterministic():
    tr = make_trace()
    assert trace_to_csv(tr) == trace_to_csv(make_trace())


def test_field_csv():
    times = np.array([0.0, 0.1])
    vals = np.arange(8.0).reshape(2, 2, 2)
    csv = field_to_csv(vals, times)
    lines = csv.strip().split("\n")
    assert lines[0] == "time,u[0],u[1],u[2],u[3]"
    assert lines[1] == "0.0,0.0,1.0,2.0,3.0"
    assert lines[2] == "0.1,4.0,5.0,6.0,7.0"


# ---------------------------------------------------------------------------
# binary dumps
# ---------------------------------------------------------------------------


def test_field_binary_roundtrip(tmp_path):
    rng = np.random.default_rng(3)
    vals = rng.standard_normal((4, 5, 6))
    vals[0, 0, 0] = np.nan
    p = tmp_path / "f.tclk"
    write_field_binary(p, vals)
    back, mask = read_field_binary(p)
    assert mask is None
    assert back.shape == vals.shape
    assert np.array_equal(back, vals, equal_nan=True)
    assert back.tobytes() == vals.tobytes()  # bit-exact payload


def test_field_binary_roundtrip_with_mask(tmp_path):
    rng = np.random.default_rng(4)
    vals = rng.standard_normal((3, 7))
    mask = rng.random((3, 7)) < 0.3
    p = tmp_path / "m.tclk"
    write_field_binary(p, vals, mask)
    back, bmask = read_field_binary(p)
    assert np.array_equal(back, vals)
    assert bmask.dtype == bool
    assert np.array_equal(bmask, mask)


def test_field_binary_header(tmp_path):
    p = tmp_path / "h.tclk"
    write_field_binary(p, np.zeros((2, 3)))
    raw = p.read_bytes()
    assert raw[:4] == b"TCLK"
    assert len(raw) == 16 + 4 * 2 + 8 * 6


def test_field_binary_bad_magic(tmp_path):
    p = tmp_path / "bad.tclk"
    p.write_bytes(b"NOPE" + b"\x00" * 32)
    with pytest.raises(ValueError):
        read_field_binary(p)


def test_field_binary_bad_version(tmp_path):
    p = tmp_path / "v.tclk"
    write_field_binary(p, np.zeros((2, 2)))
    raw = bytearray(p.read_bytes())
    raw[4] = 9
    p.write_bytes(bytes(raw))
    with pytest.raises(ValueError):
        read_field_binary(p)
