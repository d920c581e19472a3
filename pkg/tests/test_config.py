import json
import math

import pytest
from hypothesis import given, strategies as st

from leo_outage.config import (
    PRESETS,
    apply_overrides,
    db_to_linear,
    linear_to_db,
    load_config,
    parse_angle,
    parse_density,
    parse_gain,
    parse_length,
    parse_power,
    preset,
    to_pairs,
)
from leo_outage.errors import ConfigParseError, ConfigValidationError, ValidationError


def test_vsat_preset_values():
    c = preset("vsat-table1")
    assert c.f_c == 20e9
    assert c.bandwidth == 100e6
    assert linear_to_db(c.g_t_ml) == pytest.approx(38.5, abs=1e-12)
    assert linear_to_db(c.eirp_density * 1e6) == pytest.approx(4.0, abs=1e-12)
    assert linear_to_db(c.g_r_max) == pytest.approx(39.7, abs=1e-12)


def test_handheld_preset_values():
    c = preset("handheld-table1")
    assert c.f_c == 2e9
    assert c.bandwidth == 10e6
    assert linear_to_db(c.g_t_ml) == pytest.approx(30.0, abs=1e-12)
    assert linear_to_db(c.eirp_density * 1e6) == pytest.approx(34.0, abs=1e-12)
    assert c.g_r == pytest.approx(1.0)


def test_power_from_eirp_density():
    c = preset("vsat-table1")
    assert c.power == pytest.approx(c.eirp_density * c.bandwidth / c.g_t_ml, rel=1e-15)
    c2 = c.with_(tx_power=c.power)
    assert c2.eirp_density is None
    assert c2.link == c.link


def test_unknown_preset():
    with pytest.raises(ConfigValidationError):
        preset("nope")


@pytest.mark.parametrize(
    "text, expect",
    [("600km", 600e3), ("1200 km", 1.2e6), ("7e5m", 7e5)],
)
def test_parse_length(text, expect):
    assert parse_length(text) == pytest.approx(expect)


@pytest.mark.parametrize("text", ["600", "600 miles", "km"])
def test_parse_length_rejects(text):
    with pytest.raises(ConfigValidationError):
        parse_length(text)


def test_parse_angle_units():
    assert parse_angle("90deg") == pytest.approx(math.pi / 2)
    assert parse_angle("0.5rad") == 0.5
    with pytest.raises(ConfigValidationError):
        parse_angle("10")


def test_parse_gain_and_power():
    assert parse_gain("-3dB") == pytest.approx(db_to_linear(-3))
    assert parse_gain("38.5dBi") == pytest.approx(db_to_linear(38.5))
    assert parse_gain("0.5") == 0.5
    assert parse_power("30dBm") == pytest.approx(1.0)
    assert parse_density("4dBW/MHz") == pytest.approx(db_to_linear(4) * 1e-6)
    assert parse_density("-174dBm/Hz") == pytest.approx(db_to_linear(-174) * 1e-3)
    with pytest.raises(ConfigValidationError):
        parse_density("4dBW")


@given(st.floats(-60, 60))
def test_db_round_trip(db):
    assert linear_to_db(db_to_linear(db)) == pytest.approx(db, abs=1e-12)


def test_load_flat_file(tmp_path):
    p = tmp_path / "c.cfg"
    p.write_text(
        "# scenario\n"
        "preset = handheld-table1\n"
        "constellation.S = 50   # satellites\n"
        "constellation.a = 1200km\n"
        "fading = ils\n"
        "theta_min = 20deg\n",
        encoding="utf-8",
    )
    c = load_config(p)
    assert c.terminal == "handheld"
    assert c.S == 50
    assert c.a == 1.2e6
    assert c.fading_name == "ils"
    assert c.theta_min == pytest.approx(math.radians(20))


def test_zero_satellites_rejected(tmp_path):
    p = tmp_path / "c.cfg"
    p.write_text("constellation.S = 0\n", encoding="utf-8")
    with pytest.raises(ConfigValidationError) as exc:
        load_config(p)
    assert exc.value.key == "constellation.S"


@pytest.mark.parametrize(
    "body, line",
    [("constellation.S = 10\nbroken line\n", 2), ("a = 1\n\na = 2\n", 3), ("x =\n", 1)],
)
def test_parse_errors_carry_line(tmp_path, body, line):
    p = tmp_path / "c.cfg"
    p.write_text(body, encoding="utf-8")
    with pytest.raises(ConfigParseError) as exc:
        load_config(p)
    assert exc.value.line == line


def test_unknown_key_rejected():
    with pytest.raises(ConfigValidationError) as exc:
        apply_overrides(PRESETS["vsat-table1"], {"constellation.Q": "1"})
    assert exc.value.key == "constellation.Q"


@pytest.mark.parametrize(
    "pairs",
    [
        {"link.rain_g": "3dB"},
        {"band.alpha": "1.5"},
        {"antennas.g_t_sl": "40dBi"},
        {"model": "fancy"},
        {"fading": "rayleigh"},
        {"fading.m": "-1"},
    ],
)
def test_invalid_values_rejected(pairs):
    with pytest.raises(ValidationError):
        apply_overrides(PRESETS["vsat-table1"], pairs)


def test_explicit_fading_parameters():
    c = apply_overrides(PRESETS["vsat-table1"], {"fading.b": "0.2", "fading.m": "3", "fading.omega": "0.5"})
    assert (c.fading.b, c.fading.m, c.fading.omega) == (0.2, 3.0, 0.5)
    assert c.fading_name is None


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_pairs_round_trip(name):
    c = PRESETS[name].with_(S=37, fading="ils", rain_g=db_to_linear(-3), omega_e_deg=1.0)
    assert apply_overrides(PRESETS["vsat-table1"], to_pairs(c)).link == c.link
    back = apply_overrides(PRESETS["vsat-table1"], to_pairs(c))
    assert to_pairs(back) == to_pairs(c)


def test_json_config_file(tmp_path):
    c = PRESETS["handheld-table1"].with_(S=12)
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"config": to_pairs(c), "rows": []}), encoding="utf-8")
    assert to_pairs(load_config(p)) == to_pairs(c)


def test_tx_power_variant(tmp_path):
    p = tmp_path / "c.cfg"
    p.write_text("link.tx_power = 10W\n", encoding="utf-8")
    c = load_config(p)
    assert c.power == 10.0
    assert c.eirp_density is None
