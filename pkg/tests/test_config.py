import io
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toeplitz_growth.config import (ScanConfig, config_from_dict, emit_csv, fmt_float, load_config, read_csv,
                                    symbol_from_json, symbol_to_json)
from toeplitz_growth.errors import ConfigError

from strategies import laurent

FULL = {"margin": 1e-3, "band": 1e-8, "intersection_tol": 1e-6, "cusp_tol": 1e-6}


def test_defaults():
    cfg = ScanConfig()
    assert cfg.section_schedule == (100, 200, 400)
    assert cfg.fft_size == 1024 and cfg.seed == 0


def test_missing_tolerance_warns(capsys):
    cfg = config_from_dict({"margin": 1e-3})
    err = capsys.readouterr().err
    for key in ("band", "intersection_tol", "cusp_tol"):
        assert f"'{key}' missing" in err
    assert "'margin' missing" not in err
    assert cfg.band == 1e-8


def test_complete_config_is_silent(capsys, tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps({**FULL, "section_schedule": [50, 100, 200]}))
    cfg = load_config(p)
    assert capsys.readouterr().err == ""
    assert cfg.section_schedule == (50, 100, 200)


@pytest.mark.parametrize("bad, key", [
    ({"band": 0.5}, "band"),
    ({"fft_size": 100}, "fft_size"),
    ({"unknown": 1}, "unknown"),
    ({"section_schedule": [200, 100]}, "section_schedule"),
])
def test_bad_config_names_key(bad, key):
    with pytest.raises(ConfigError, match=key):
        config_from_dict({**FULL, **bad})


def test_bad_json_file(tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text("{not json")
    with pytest.raises(ConfigError, match="not valid JSON"):
        load_config(p)


@pytest.mark.parametrize("coeffs, key", [
    ({"x1": [1, 0], "1": [1, 0]}, "x1"),
    ({"1.5": [1, 0]}, "1.5"),
    ({"-1": [1], "1": [1, 0]}, "coeffs/-1"),
])
def test_malformed_symbol_names_key(coeffs, key):
    with pytest.raises(ConfigError, match=key.replace(".", r"\.")):
        symbol_from_json({"coeffs": coeffs})


def test_duplicate_and_constant_symbols():
    with pytest.raises(ConfigError, match="twice"):
        symbol_from_json({"coeffs": {"01": [1, 0], "1": [1, 0]}})
    with pytest.raises(ConfigError, match="non-constant"):
        symbol_from_json({"coeffs": {"0": [1, 0]}})


@settings(max_examples=40, deadline=None)
@given(laurent())
def test_symbol_json_round_trip(b):
    c = symbol_from_json(json.loads(json.dumps(symbol_to_json(b))))
    assert (c.m, c.k) == (b.m, b.k)
    assert c.to_dict() == b.to_dict()


@given(st.floats(allow_nan=False))
def test_fmt_float_round_trip(x):
    assert float(fmt_float(x)) == x


def test_csv_round_trip_bit_exact(tmp_path):
    rng = np.random.default_rng(1)
    recs = [{"a": x, "b": y} for x, y in rng.standard_normal((50, 2)) * 10.0 ** rng.integers(-300, 300, (50, 2))]
    p = tmp_path / "out.csv"
    emit_csv(recs, p, ("a", "b"))
    back = read_csv(p)
    assert [(r["a"], r["b"]) for r in back] == [(r["a"], r["b"]) for r in recs]


def test_csv_cells_and_column_order():
    buf = io.StringIO()
    emit_csv([{"z": True, "y": None, "x": 3, "w": "tag"}], buf, ("x", "y", "z", "w"))
    assert buf.getvalue() == "x,y,z,w\n3,nan,1,tag\n"
