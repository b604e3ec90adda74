import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gravkerr.config import (
    ConfigError,
    load_config,
    load_preset,
    parse_config,
    parse_quantity,
    preset_names,
)
from gravkerr.constants import JULIAN_YEAR
from gravkerr.output import format_float, to_json, write_csv, write_json


def test_units():
    assert parse_quantity("10 km", "length") == 1e4
    assert parse_quantity("2um", "length") == pytest.approx(2e-6, rel=1e-15)
    assert parse_quantity("1 yr", "time") == JULIAN_YEAR
    assert parse_quantity("125 MW", "power") == 1.25e8
    assert parse_quantity("45 deg", "angle") == pytest.approx(math.pi / 4)
    assert parse_quantity("25 MW/cm2", "intensity") == 2.5e11
    assert parse_quantity("450", "float") == 450.0


@pytest.mark.parametrize("text,kind", [("10", "length"), ("10 furlong", "length"), ("abc m", "length"),
                                       ("3 m", "float"), ("2.5", "int")])
def test_unit_errors(text, kind):
    with pytest.raises(ValueError):
        parse_quantity(text, kind)


def test_unknown_key_reports_line():
    text = "[geometry]\narm_length = 10 km\n\nseperation = 10 cm\n"
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.line == 4
    assert info.value.field == "[geometry] seperation"
    assert "line 4" in str(info.value)


def test_unknown_section_reports_line():
    with pytest.raises(ConfigError) as info:
        parse_config("# header\n[paperwork]\nx = 1\n")
    assert info.value.line == 2


def test_missing_unit_reports_field():
    with pytest.raises(ConfigError) as info:
        parse_config("[scenario]\ntotal_time = 1\n")
    assert info.value.line == 2 and "unit" in str(info.value)


def test_bad_choice_and_list():
    with pytest.raises(ConfigError):
        parse_config("[state]\nkind = cat\n")
    with pytest.raises(ConfigError):
        parse_config("[state]\nr = 0.5, , 1.0\n")
    assert parse_config("[state]\nr = 0.5, 1.0\n").get("state", "r") == [0.5, 1.0]


def test_default_section_rejected():
    with pytest.raises(ConfigError):
        parse_config("[DEFAULT]\nx = 1\n")


def test_inline_comments_and_require():
    cfg = parse_config("[geometry]\nfinesse = 450  # ring\n")
    assert cfg.require("geometry", "finesse") == 450.0
    assert cfg.has("geometry") and not cfg.has("state")
    with pytest.raises(ConfigError):
        cfg.require("geometry", "wavelength")


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "nope.ini")


def test_presets_parse():
    names = preset_names()
    assert {"ce-450", "ce-1000", "sqvac", "coherent", "vacuum", "tmsv-mz", "thg", "cumulants"} <= set(names)
    for name in names:
        load_preset(name)
    with pytest.raises(ConfigError):
        load_preset("nope")


def test_format_float():
    assert format_float(0.1, 17) == "0.10000000000000001"
    assert format_float(1.25e8, 9) == "125000000"
    assert format_float(math.inf, 9) == "inf"
    assert format_float(-math.inf, 9) == "-inf"
    assert format_float(math.nan, 9) == "nan"
    assert format_float(-0.0, 9) == "0"


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_json_float_round_trip(x):
    assert float(json.loads(to_json(x))) == x


def test_json_structure():
    payload = {"b": [1, 2.5, True, None], "a": {"bound": math.inf}, "arr": np.array([[1.0, 2.0]]),
               "s": 'quote " and \\ and\nnewline', "n": np.float64(3.0)}
    text = to_json(payload)
    back = json.loads(text)
    assert list(back) == ["b", "a", "arr", "s", "n"]
    assert back["a"]["bound"] == "inf"
    assert back["arr"] == [1.0, 2.0]
    assert back["s"] == payload["s"]
    with pytest.raises(TypeError):
        to_json(object())


def test_writers(tmp_path):
    p = write_json(tmp_path / "x" / "r.json", {"v": 1.0})
    assert p.read_text() == '{\n  "v": 1\n}\n'
    c = write_csv(tmp_path / "t.csv", ["a", "b"], [(1, 0.1), ("x,y", True)])
    assert c.read_text() == 'a,b\n1,0.1\n"x,y",true\n'
    with pytest.raises(ValueError):
        write_csv(tmp_path / "bad.csv", ["a"], [(1, 2)])
