"""Scenario configuration, unit parsing, presets and the flat config-file format.

Config files are UTF-8 text with one ``key = value`` pair per line, dotted
section keys and ``#`` comments::

    preset = vsat-table1
    constellation.S = 100
    constellation.a = 600km
    antennas.omega_e = 1deg
    link.rain_g = -3dB
    fading = as

Lengths and angles must carry a unit suffix; gains accept ``dB``/``dBi``
or a bare linear number. JSON files holding a flat object of the same
keys (or ``{"config": {...}}``) are accepted as well.
"""
from __future__ import annotations

import dataclasses
import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

from .channel import FADING_PRESETS, LinkBudget, ShadowedRicianParams, vsat_rx_gain
from .distributions import Model
from .errors import ConfigParseError, ConfigValidationError, DomainError
from .geometry import EARTH_RADIUS, EarthGeometry, surface_areas


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(lin: float) -> float:
    return 10.0 * math.log10(lin)


@dataclass(frozen=True)
class SystemConfig:
    """Full scenario description in SI units (radians for angles, except
    the VSAT pointing error which is kept in degrees like its gain mask)."""

    terminal: str = "vsat"
    S: int = 100
    a: float = 600e3
    r_e: float = EARTH_RADIUS
    f_c: float = 20e9
    bandwidth: float = 100e6
    alpha: float = 2.0
    noise_density: float = db_to_linear(-174.0) * 1e-3
    g_t_ml: float = db_to_linear(38.5)
    g_t_sl: float = db_to_linear(28.5)
    omega_th: float = math.radians(20.0)
    g_r_max: float = db_to_linear(39.7)
    omega_e_deg: float = 0.0
    eirp_density: float | None = db_to_linear(4.0) * 1e-6
    tx_power: float | None = None
    rain_g: float = 1.0
    fading: ShadowedRicianParams = field(default_factory=lambda: FADING_PRESETS["as"])
    fading_name: str | None = "as"
    theta_min: float = math.radians(10.0)
    model: Model = Model.EXACT

    def __post_init__(self):
        validate(self)

    @property
    def geo(self) -> EarthGeometry:
        return EarthGeometry(a=self.a, r_e=self.r_e)

    @property
    def power(self) -> float:
        if self.tx_power is not None:
            return self.tx_power
        return self.eirp_density * self.bandwidth / self.g_t_ml

    @property
    def g_r(self) -> float:
        if self.terminal == "vsat":
            return vsat_rx_gain(self.omega_e_deg, self.g_r_max)
        return self.g_r_max

    @property
    def link(self) -> LinkBudget:
        return LinkBudget(
            tx_power=self.power,
            f_c=self.f_c,
            bandwidth=self.bandwidth,
            noise_density=self.noise_density,
            g_t_ml=self.g_t_ml,
            g_t_sl=self.g_t_sl,
            g_r=self.g_r,
            rain_gain=self.rain_g,
            alpha=self.alpha,
        )

    def derived(self, theta_min: float | None = None):
        th = self.theta_min if theta_min is None else theta_min
        return surface_areas(th, self.omega_th, self.geo)

    def with_(self, **changes) -> "SystemConfig":
        if "fading" in changes and isinstance(changes["fading"], str):
            name = changes["fading"]
            changes["fading"] = fading_preset(name)
            changes.setdefault("fading_name", name)
        elif "fading" in changes:
            changes.setdefault("fading_name", None)
        if "model" in changes:
            changes["model"] = Model.coerce(changes["model"])
        if "tx_power" in changes and changes["tx_power"] is not None:
            changes.setdefault("eirp_density", None)
        if "eirp_density" in changes and changes["eirp_density"] is not None:
            changes.setdefault("tx_power", None)
        return dataclasses.replace(self, **changes)


def validate(cfg: SystemConfig) -> None:
    def need(cond, key, msg):
        if not cond:
            raise ConfigValidationError(key, msg)

    need(cfg.terminal in ("vsat", "handheld"), "terminal", "must be 'vsat' or 'handheld'")
    need(isinstance(cfg.S, int) and cfg.S >= 1, "constellation.S", f"need S >= 1, got {cfg.S!r}")
    need(cfg.a > 0, "constellation.a", "need a > 0")
    need(cfg.r_e > 0, "geometry.r_e", "need r_e > 0")
    need(cfg.f_c > 0, "band.f_c", "need f_c > 0")
    need(cfg.bandwidth > 0, "band.W", "need W > 0")
    need(cfg.alpha >= 2, "band.alpha", "need alpha >= 2")
    need(cfg.noise_density > 0, "band.N0", "need N0 > 0")
    need(cfg.g_t_sl > 0, "antennas.g_t_sl", "need g_t_sl > 0")
    need(cfg.g_t_ml >= cfg.g_t_sl, "antennas.g_t_ml", "need g_t_ml >= g_t_sl")
    need(cfg.omega_th >= 0, "antennas.omega_th", "need omega_th >= 0")
    need(cfg.g_r_max > 0, "antennas.g_r_max", "need g_r_max > 0")
    need(0 <= cfg.omega_e_deg < 180, "antennas.omega_e", "need 0 <= omega_e < 180 deg")
    need(
        (cfg.eirp_density is None) != (cfg.tx_power is None),
        "link.eirp_density",
        "exactly one of link.eirp_density / link.tx_power must be given",
    )
    if cfg.eirp_density is not None:
        need(cfg.eirp_density > 0, "link.eirp_density", "need eirp_density > 0")
    if cfg.tx_power is not None:
        need(cfg.tx_power > 0, "link.tx_power", "need tx_power > 0")
    need(0 < cfg.rain_g <= 1, "link.rain_g", "need 0 < g <= 1 (0 dB or less)")
    need(0 <= cfg.theta_min <= math.pi / 2, "theta_min", "need 0 <= theta_min <= 90 deg")
    need(isinstance(cfg.fading, ShadowedRicianParams), "fading", "not a fading parameter set")


def fading_preset(name: str) -> ShadowedRicianParams:
    try:
        return FADING_PRESETS[name.lower()]
    except KeyError:
        raise ConfigValidationError("fading", f"unknown preset {name!r}; choose from {sorted(FADING_PRESETS)}") from None


PRESETS: dict[str, SystemConfig] = {
    "vsat-table1": SystemConfig(),
    "handheld-table1": SystemConfig(
        terminal="handheld",
        f_c=2e9,
        bandwidth=10e6,
        g_t_ml=db_to_linear(30.0),
        g_t_sl=db_to_linear(20.0),
        g_r_max=db_to_linear(0.0),
        eirp_density=db_to_linear(34.0) * 1e-6,
    ),
}


def preset(name: str) -> SystemConfig:
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigValidationError("preset", f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


# ---------------------------------------------------------------- unit parsing

_NUM = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_QTY = re.compile(rf"^\s*({_NUM})\s*([A-Za-z/]*)\s*$")

_LENGTH = {"m": 1.0, "km": 1e3}
_ANGLE = {"deg": math.pi / 180, "rad": 1.0}
_FREQ = {"hz": 1.0, "khz": 1e3, "mhz": 1e6, "ghz": 1e9}


def _split(text: str, key: str) -> tuple[float, str]:
    m = _QTY.match(str(text))
    if not m:
        raise ConfigValidationError(key, f"cannot parse quantity {text!r}")
    return float(m.group(1)), m.group(2)


def parse_length(text, key="length") -> float:
    value, unit = _split(text, key)
    if unit.lower() not in _LENGTH:
        raise ConfigValidationError(key, f"length {text!r} needs a unit suffix (m or km)")
    return value * _LENGTH[unit.lower()]


def parse_angle(text, key="angle") -> float:
    """Angle in radians; requires a ``deg`` or ``rad`` suffix."""
    value, unit = _split(text, key)
    if unit.lower() not in _ANGLE:
        raise ConfigValidationError(key, f"angle {text!r} needs a unit suffix (deg or rad)")
    return value * _ANGLE[unit.lower()]


def parse_angle_deg(text, key="angle") -> float:
    """Angle in degrees, without a round trip through radians for ``deg`` input."""
    value, unit = _split(text, key)
    if unit.lower() == "deg":
        return value
    return math.degrees(parse_angle(text, key))


def parse_frequency(text, key="frequency") -> float:
    value, unit = _split(text, key)
    if unit.lower() not in _FREQ:
        raise ConfigValidationError(key, f"frequency {text!r} needs a unit (Hz, kHz, MHz, GHz)")
    return value * _FREQ[unit.lower()]


def parse_gain(text, key="gain") -> float:
    """Linear gain from ``'38.5dBi'``, ``'-3dB'`` or a bare linear number."""
    value, unit = _split(text, key)
    u = unit.lower()
    if u in ("db", "dbi"):
        return db_to_linear(value)
    if u in ("", "lin"):
        return value
    raise ConfigValidationError(key, f"gain {text!r}: unit must be dB, dBi or none")


def parse_power(text, key="power") -> float:
    value, unit = _split(text, key)
    u = unit.lower()
    if u == "w":
        return value
    if u == "dbw":
        return db_to_linear(value)
    if u == "dbm":
        return db_to_linear(value) * 1e-3
    raise ConfigValidationError(key, f"power {text!r}: unit must be W, dBW or dBm")


def parse_density(text, key="density") -> float:
    """Power spectral density in W/Hz from e.g. ``'4dBW/MHz'`` or ``'-174dBm/Hz'``."""
    value, unit = _split(text, key)
    if "/" not in unit:
        raise ConfigValidationError(key, f"density {text!r} needs a unit like dBW/MHz or W/Hz")
    num, den = unit.split("/", 1)
    if den.lower() not in _FREQ:
        raise ConfigValidationError(key, f"density {text!r}: bad frequency unit {den!r}")
    watts = parse_power(f"{value}{num}", key)
    return watts / _FREQ[den.lower()]


def _parse_int(text, key) -> int:
    try:
        f = float(str(text))
    except ValueError:
        raise ConfigValidationError(key, f"expected an integer, got {text!r}") from None
    if f != int(f):
        raise ConfigValidationError(key, f"expected an integer, got {text!r}")
    return int(f)


def _parse_float(text, key) -> float:
    try:
        return float(str(text))
    except ValueError:
        raise ConfigValidationError(key, f"expected a number, got {text!r}") from None


# config key -> (SystemConfig field, parser)
KEYS = {
    "terminal": ("terminal", lambda v, k: str(v).strip().lower()),
    "constellation.S": ("S", _parse_int),
    "constellation.a": ("a", parse_length),
    "geometry.r_e": ("r_e", parse_length),
    "band.f_c": ("f_c", parse_frequency),
    "band.W": ("bandwidth", parse_frequency),
    "band.alpha": ("alpha", _parse_float),
    "band.N0": ("noise_density", parse_density),
    "antennas.g_t_ml": ("g_t_ml", parse_gain),
    "antennas.g_t_sl": ("g_t_sl", parse_gain),
    "antennas.omega_th": ("omega_th", parse_angle),
    "antennas.g_r_max": ("g_r_max", parse_gain),
    "antennas.omega_e": ("omega_e_deg", lambda v, k: parse_angle_deg(v, k)),
    "link.eirp_density": ("eirp_density", parse_density),
    "link.tx_power": ("tx_power", parse_power),
    "link.rain_g": ("rain_g", parse_gain),
    "fading": ("fading", lambda v, k: str(v).strip().lower()),
    "fading.b": ("fading.b", _parse_float),
    "fading.m": ("fading.m", _parse_float),
    "fading.omega": ("fading.omega", _parse_float),
    "theta_min": ("theta_min", parse_angle),
    "model": ("model", lambda v, k: str(v).strip().lower()),
}


def apply_overrides(base: SystemConfig, pairs: dict[str, object]) -> SystemConfig:
    """Apply flat dotted key/value pairs (strings in config-file syntax)."""
    changes: dict[str, object] = {}
    fading_parts: dict[str, float] = {}
    for key, raw in pairs.items():
        if key == "preset":
            continue
        if key not in KEYS:
            raise ConfigValidationError(key, "unknown key")
        fld, parser = KEYS[key]
        value = parser(raw, key)
        if fld.startswith("fading."):
            fading_parts[fld.split(".", 1)[1]] = value
        else:
            changes[fld] = value
    if "model" in changes:
        try:
            changes["model"] = Model.coerce(changes["model"])
        except DomainError as exc:
            raise ConfigValidationError("model", str(exc)) from None
    if "fading" in changes:
        changes["fading_name"] = changes["fading"]
        changes["fading"] = fading_preset(changes["fading"])
    if fading_parts:
        cur = changes.get("fading", base.fading)
        try:
            changes["fading"] = ShadowedRicianParams(
                b=fading_parts.get("b", cur.b),
                m=fading_parts.get("m", cur.m),
                omega=fading_parts.get("omega", cur.omega),
            )
        except DomainError as exc:
            raise ConfigValidationError("fading", str(exc)) from None
        changes["fading_name"] = None
    if "tx_power" in changes and "eirp_density" not in changes:
        changes["eirp_density"] = None
    elif "eirp_density" in changes and "tx_power" not in changes:
        changes["tx_power"] = None
    return dataclasses.replace(base, **changes)


def parse_config_text(text: str) -> dict[str, str]:
    pairs: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigParseError(f"expected 'key = value', got {line.strip()!r}", lineno)
        key, value = (s.strip() for s in body.split("=", 1))
        if not key or not value:
            raise ConfigParseError(f"empty key or value in {line.strip()!r}", lineno)
        if key in pairs:
            raise ConfigParseError(f"duplicate key {key!r}", lineno)
        pairs[key] = value
    return pairs


def load_config(path, base: SystemConfig | None = None) -> SystemConfig:
    """Read a config file (flat key = value, or JSON) into a validated SystemConfig."""
    text = Path(path).read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigParseError(str(exc.msg), exc.lineno) from None
        pairs = {k: str(v) for k, v in doc.get("config", doc).items()}
    else:
        pairs = parse_config_text(text)
    if base is None:
        base = preset(pairs["preset"]) if "preset" in pairs else PRESETS["vsat-table1"]
    elif "preset" in pairs:
        base = preset(pairs["preset"])
    return apply_overrides(base, pairs)


def _fmt(x: float) -> str:
    return repr(float(x))


def to_pairs(cfg: SystemConfig) -> dict[str, str]:
    """Flat key/value view of a config that ``apply_overrides`` reproduces exactly."""
    out = {
        "terminal": cfg.terminal,
        "constellation.S": str(cfg.S),
        "constellation.a": f"{_fmt(cfg.a)}m",
        "geometry.r_e": f"{_fmt(cfg.r_e)}m",
        "band.f_c": f"{_fmt(cfg.f_c)}Hz",
        "band.W": f"{_fmt(cfg.bandwidth)}Hz",
        "band.alpha": _fmt(cfg.alpha),
        "band.N0": f"{_fmt(cfg.noise_density)}W/Hz",
        "antennas.g_t_ml": _fmt(cfg.g_t_ml),
        "antennas.g_t_sl": _fmt(cfg.g_t_sl),
        "antennas.omega_th": f"{_fmt(cfg.omega_th)}rad",
        "antennas.g_r_max": _fmt(cfg.g_r_max),
        "antennas.omega_e": f"{_fmt(cfg.omega_e_deg)}deg",
        "link.rain_g": _fmt(cfg.rain_g),
        "fading.b": _fmt(cfg.fading.b),
        "fading.m": _fmt(cfg.fading.m),
        "fading.omega": _fmt(cfg.fading.omega),
        "theta_min": f"{_fmt(cfg.theta_min)}rad",
        "model": cfg.model.value,
    }
    if cfg.tx_power is not None:
        out["link.tx_power"] = f"{_fmt(cfg.tx_power)}W"
    else:
        out["link.eirp_density"] = f"{_fmt(cfg.eirp_density)}W/Hz"
    return out
