"""Declarative run configuration: INI sections, unit-suffixed values, strict keys.

Every key is declared in :data:`SCHEMA` with a value kind.  Physical kinds
require a unit suffix (``arm_length = 10 km``); lists are comma separated.
Unknown sections or keys fail before any computation starts, with the
offending line number.
"""
from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .constants import JULIAN_YEAR


class ConfigError(ValueError):
    def __init__(self, message, line=None, field=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(field)
        super().__init__(f"{': '.join(where)}: {message}" if where else message)
        self.line = line
        self.field = field


UNITS = {
    "length": {"m": 1.0, "km": 1e3, "cm": 1e-2, "mm": 1e-3, "um": 1e-6, "nm": 1e-9},
    "time": {"s": 1.0, "ms": 1e-3, "us": 1e-6, "min": 60.0, "h": 3600.0, "d": 86400.0, "yr": JULIAN_YEAR},
    "power": {"W": 1.0, "mW": 1e-3, "kW": 1e3, "MW": 1e6, "GW": 1e9},
    "angle": {"rad": 1.0, "mrad": 1e-3, "deg": math.pi / 180},
    "intensity": {"W/m2": 1.0, "W/cm2": 1e4, "kW/cm2": 1e7, "MW/cm2": 1e10},
}

# section -> key -> kind; "list:<kind>" for comma separated values
SCHEMA = {
    "run": {"out": "str", "tolerance": "float", "convention": "choice:half,unhalved", "jobs": "int",
            "seed": "int"},
    "geometry": {"arm_length": "length", "separation": "length", "finesse": "float", "wavelength": "length",
                 "beam_width": "length"},
    "scenario": {"label": "str", "total_time": "time", "pump_power": "power", "circulating_power": "power",
                 "mediator_spin": "int", "time_sweep": "list:time"},
    "coupling": {"mediator_spin": "int", "mode": "choice:asymptotic,exact",
                 "configuration": "choice:counter-propagating,co-propagating,standing-wave",
                 "grid_ratios": "list:float"},
    "state": {"kind": "choice:vacuum,coherent,squeezed-vacuum,tmsv", "r": "list:float",
              "alpha": "list:float", "mean_photons": "list:float", "phase": "angle", "dim": "int",
              "shots": "float"},
    "mz": {"chi_q": "float", "chi_c_sym": "float", "chi_c_asym": "float", "step": "float",
           "ratio_mean_photons": "list:float"},
    "thg": {"pumps": "list:choice:coherent,squeezed-vacuum", "mean_photons": "list:float",
            "dim_harmonic": "int", "population_chi": "list:float", "population_mean_photons": "float"},
    "cumulants": {"theta": "angle", "chi_q": "list:float", "chi_c": "float"},
    "quoted": {"circulating_power": "power", "pump_power": "power", "intensity": "intensity",
               "fisher_ratio": "float", "thg_exponent": "float", "coherent_exponent": "float",
               "coherent_nuisance_exponent": "float", "sqvac_nuisance_exponent": "float"},
}

_NUMBER = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(\S*)\s*$")


def parse_quantity(text: str, kind: str):
    """Parse one value of ``kind``; physical kinds return SI floats."""
    if kind == "str":
        if not text:
            raise ValueError("empty string")
        return text
    if kind.startswith("choice:"):
        options = kind[len("choice:"):].split(",")
        if text not in options:
            raise ValueError(f"expected one of {options}, got {text!r}")
        return text
    if kind == "int":
        try:
            return int(text)
        except ValueError:
            raise ValueError(f"expected an integer, got {text!r}") from None
    m = _NUMBER.match(text)
    if not m:
        raise ValueError(f"cannot parse number from {text!r}")
    value, unit = float(m.group(1)), m.group(2)
    if kind == "float":
        if unit:
            raise ValueError(f"dimensionless value takes no unit, got {unit!r}")
        return value
    table = UNITS[kind]
    if not unit:
        raise ValueError(f"{kind} needs an explicit unit ({', '.join(table)})")
    if unit not in table:
        raise ValueError(f"unknown {kind} unit {unit!r}; expected one of {', '.join(table)}")
    return value * table[unit]


def _parse_value(text, kind):
    if kind.startswith("list:"):
        inner = kind[len("list:"):]
        items = [t.strip() for t in text.split(",")]
        if not items or any(not t for t in items):
            raise ValueError("empty list entry")
        return [parse_quantity(t, inner) for t in items]
    return parse_quantity(text.strip(), kind)


def _line_index(text):
    # configparser forgets positions; recover them for diagnostics
    index, section = {}, None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] in "#;":
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            index.setdefault((section, None), lineno)
        elif "=" in line and section is not None:
            index[(section, line.split("=", 1)[0].strip().lower())] = lineno
    return index


@dataclass
class RunConfig:
    sections: dict
    source: str = "<string>"

    def section(self, name: str) -> dict:
        return self.sections.get(name, {})

    def get(self, section: str, key: str, default=None):
        return self.sections.get(section, {}).get(key, default)

    def require(self, section: str, key: str):
        try:
            return self.sections[section][key]
        except KeyError:
            raise ConfigError("required key missing", field=f"[{section}] {key}") from None

    def has(self, section: str, key: str | None = None) -> bool:
        if key is None:
            return section in self.sections
        return key in self.sections.get(section, {})


def parse_config(text: str, source: str = "<string>") -> RunConfig:
    lines = _line_index(text)
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(str(exc).splitlines()[0], line=getattr(exc, "lineno", None)) from None
    if parser.defaults():
        raise ConfigError("a [DEFAULT] section is not allowed", line=lines.get(("DEFAULT", None)))
    sections = {}
    for name in parser.sections():
        if name not in SCHEMA:
            raise ConfigError(f"unknown section [{name}]; known: {', '.join(SCHEMA)}", line=lines.get((name, None)))
        values = {}
        for key, raw in parser.items(name):
            line = lines.get((name, key))
            if key not in SCHEMA[name]:
                raise ConfigError(f"unknown key; allowed in [{name}]: {', '.join(SCHEMA[name])}",
                                  line=line, field=f"[{name}] {key}")
            try:
                values[key] = _parse_value(raw, SCHEMA[name][key])
            except ValueError as exc:
                raise ConfigError(str(exc), line=line, field=f"[{name}] {key}") from None
        sections[name] = values
    return RunConfig(sections, source)


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", field=str(path)) from None
    return parse_config(text, str(path))


def preset_names() -> list[str]:
    root = resources.files("gravkerr") / "presets"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".ini"))


def load_preset(name: str) -> RunConfig:
    resource = resources.files("gravkerr") / "presets" / f"{name}.ini"
    if not resource.is_file():
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(preset_names())}")
    return parse_config(resource.read_text(encoding="utf-8"), f"preset:{name}")
