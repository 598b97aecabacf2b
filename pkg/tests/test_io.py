import json
import math

import numpy as np
import pytest

from walkforge import io
from walkforge.lattice import (
    CoinSchedule,
    ComplexWaveField,
    FormatError,
    JumpSchedule,
)
from walkforge.targets import uniform_target


def test_csv_round_trip(tmp_path):
    rho = uniform_target(6)
    path = tmp_path / "rho.csv"
    io.write_field_csv(rho, path)
    back = io.read_probability_csv(path)
    for t in range(7):
        assert (back.slices[t] == rho.slices[t]).all()


def test_json_round_trip_bit_for_bit(tmp_path):
    rho = uniform_target(9)
    path = tmp_path / "rho.json"
    io.write_field_json(rho, path)
    back = io.read_probability_json(path)
    for t in range(10):
        assert (back.slices[t] == rho.slices[t]).all()


def test_csv_reader_rejects_parity_violation(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("t,n,value\n0,0,1.0\n2,1,0.5\n")
    with pytest.raises(FormatError, match="row 3.*parity"):
        io.read_probability_csv(path)


def test_csv_reader_rejects_cone_violation(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("t,n,value\n0,0,1.0\n1,3,0.5\n")
    with pytest.raises(FormatError, match="row 3.*light cone"):
        io.read_probability_csv(path)


def test_csv_reader_rejects_duplicates(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("t,n,value\n0,0,1.0\n0,0,1.0\n")
    with pytest.raises(FormatError, match="duplicate"):
        io.read_probability_csv(path)


def test_csv_reader_rejects_denormalised_slice(tmp_path):
    path = tmp_path / "bad.csv"
    rows = ["t,n,value", "0,0,1.0", "1,-1,0.5", "1,1,0.5",
            "2,-2,0.25", "2,0,0.5", "2,2,0.25",
            "3,-3,0.25", "3,-1,0.25"]
    path.write_text("\n".join(rows) + "\n")
    with pytest.raises(FormatError, match="slice t=3"):
        io.read_probability_csv(path)


def test_json_reader_rejects_slice_shape(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"horizon": 1, "slices": [[1.0], [1.0]]}))
    with pytest.raises(FormatError, match="slice t=1"):
        io.read_probability_json(path)


def test_schedule_round_trip_with_nulls(tmp_path):
    angles = [np.array([math.pi / 4]),
              np.array([math.nan, 1.0])]
    sched = CoinSchedule(angles)
    path = tmp_path / "coins.json"
    io.write_schedule_json(sched, path)
    doc = json.loads(path.read_text())
    assert doc["kind"] == "coin"
    assert {"t": 1, "n": -1, "value": None} in doc["entries"]
    back = io.read_schedule_json(path)
    assert isinstance(back, CoinSchedule)
    assert not back.is_defined(-1, 1)
    assert back.value(1, 1) == 1.0


def test_jump_schedule_kind_dispatch(tmp_path):
    sched = JumpSchedule([np.array([0.5])])
    path = tmp_path / "jumps.json"
    io.write_schedule_json(sched, path)
    assert isinstance(io.read_schedule_json(path), JumpSchedule)


def test_schedule_reader_rejects_off_support_entry(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({
        "horizon": 1, "kind": "jump",
        "entries": [{"t": 0, "n": 1, "value": 0.5}]}))
    with pytest.raises(FormatError, match="light cone"):
        io.read_schedule_json(path)


def test_complex_wavefield_json_round_trip(tmp_path):
    plus = [np.array([1 / math.sqrt(2)]), np.array([0.0, 0.5 + 0.5j])]
    minus = [np.array([1j / math.sqrt(2)]), np.array([math.sqrt(0.5), 0.0])]
    w = ComplexWaveField(plus, minus)
    path = tmp_path / "field.json"
    io.write_wavefield_json(w, path)
    back = io.read_wavefield_json(path)
    assert isinstance(back, ComplexWaveField)
    assert back.plus(1, 1) == 0.5 + 0.5j
