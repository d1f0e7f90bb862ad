"""Scenario configuration: INI-style ``key = value`` file with four sections.

    [geometry]   source, ris, destination, dest_box_x, dest_box_y, dest_box_z,
                 dest_locations
    [rf]         carrier_hz, tx_power_dbm, noise_dbm, bandwidth_hz
    [ris]        M, M_H, d_r, M_sweep
    [experiment] designs, targets, coverage_target, samples, seed,
                 random_redraw, quad_nodes, quad_rtol

Vectors and lists are comma separated. ``M_H = auto`` and ``d_r = lambda/4``
select the panel defaults. Every key is optional.
"""

from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .channel import Geometry, wavelength
from .phase_design import DESIGNS, SnrContext
from .specfun import QuadratureSpec

Vec3 = tuple[float, float, float]


class ConfigError(ValueError):
    pass


def _default_targets() -> tuple[float, ...]:
    return tuple(float(x) for x in np.arange(1, 81) * 0.5)


@dataclass(frozen=True)
class ScenarioConfig:
    source: Vec3 = (0.0, 0.0, 0.0)
    ris: Vec3 = (27.0, 25.0, 25.0)
    destination: Vec3 = (180.0, 15.0, 15.0)
    dest_box_x: tuple[float, float] = (30.0, 200.0)
    dest_box_y: tuple[float, float] = (-30.0, 30.0)
    dest_box_z: tuple[float, float] = (1.5, 15.0)
    dest_locations: int = 100

    carrier_hz: float = 1.8e9
    tx_power_dbm: float = 10.0 * math.log10(20.0)  # 20 mW
    noise_dbm: float = -94.0
    bandwidth_hz: float = 10e6

    M: int = 100
    M_H: int | None = None
    d_r: float | None = None
    M_sweep: tuple[int, ...] = (16, 36, 64, 100, 144, 196, 256)

    designs: tuple[str, ...] = DESIGNS
    targets: tuple[float, ...] = field(default_factory=_default_targets)
    coverage_target: float = 4.0
    samples: int = 100_000
    seed: int = 2022
    random_redraw: bool = True
    quad_nodes: int = 32
    quad_rtol: float = 1e-10

    def __post_init__(self):
        checks = [
            ("M", self.M >= 1),
            ("M_H", self.M_H is None or self.M_H >= 1),
            ("d_r", self.d_r is None or self.d_r > 0),
            ("carrier_hz", self.carrier_hz > 0),
            ("bandwidth_hz", self.bandwidth_hz > 0),
            ("samples", self.samples >= 1),
            ("seed", 0 <= self.seed < 2**64),
            ("dest_locations", self.dest_locations >= 1),
            ("M_sweep", len(self.M_sweep) > 0 and all(m >= 1 for m in self.M_sweep)),
            ("targets", all(x >= 0 for x in self.targets)),
            ("coverage_target", self.coverage_target >= 0),
            ("designs", len(self.designs) > 0 and all(d in DESIGNS for d in self.designs)),
        ]
        for name in ("dest_box_x", "dest_box_y", "dest_box_z"):
            lo, hi = getattr(self, name)
            checks.append((name, lo <= hi))
        for key, ok in checks:
            if not ok:
                raise ConfigError(f"invalid value for {key}: {getattr(self, key)!r}")
        if self.M_H is not None:
            for m in (self.M, *self.M_sweep):
                if m % self.M_H:
                    raise ConfigError(f"invalid value for M_H: {self.M_H} does not divide M={m}")
        try:
            QuadratureSpec(self.quad_nodes, self.quad_rtol)
        except ValueError as exc:
            raise ConfigError(f"invalid quadrature settings (quad_nodes/quad_rtol): {exc}") from None

    @property
    def nu(self) -> float:
        return SnrContext.from_dbm(self.tx_power_dbm, self.noise_dbm).nu

    @property
    def wavelength(self) -> float:
        return wavelength(self.carrier_hz)

    @property
    def quad(self) -> QuadratureSpec:
        return QuadratureSpec(self.quad_nodes, self.quad_rtol)

    def geometry(self, M: int | None = None, destination=None) -> Geometry:
        return Geometry.build(
            self.source,
            self.ris,
            self.destination if destination is None else destination,
            self.M if M is None else M,
            carrier_hz=self.carrier_hz,
            ris_rows=self.M_H,
            element_spacing=self.d_r,
        )

    def with_overrides(self, **kw) -> "ScenarioConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw) if kw else self


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _vec(n: int):
    def conv(text: str):
        vals = _floats(text)
        if len(vals) != n:
            raise ValueError(f"expected {n} comma-separated numbers")
        return tuple(vals)

    return conv


def _int(text: str) -> int:
    return int(text.strip(), 0)


def _ints(text: str) -> tuple[int, ...]:
    return tuple(_int(t) for t in text.split(",") if t.strip())


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError("expected true/false")


def _rows(text: str):
    return None if text.strip().lower() == "auto" else _int(text)


def _spacing(text: str):
    t = text.strip().lower().replace(" ", "")
    return None if t in ("lambda/4", "auto") else float(t)


def _designs(text: str) -> tuple[str, ...]:
    return tuple(t.strip() for t in text.split(",") if t.strip())


# section -> {file key: (field name, converter)}
_SCHEMA = {
    "geometry": {
        "source": ("source", _vec(3)),
        "ris": ("ris", _vec(3)),
        "destination": ("destination", _vec(3)),
        "dest_box_x": ("dest_box_x", _vec(2)),
        "dest_box_y": ("dest_box_y", _vec(2)),
        "dest_box_z": ("dest_box_z", _vec(2)),
        "dest_locations": ("dest_locations", _int),
    },
    "rf": {
        "carrier_hz": ("carrier_hz", float),
        "tx_power_dbm": ("tx_power_dbm", float),
        "noise_dbm": ("noise_dbm", float),
        "bandwidth_hz": ("bandwidth_hz", float),
    },
    "ris": {
        "m": ("M", _int),
        "m_h": ("M_H", _rows),
        "d_r": ("d_r", _spacing),
        "m_sweep": ("M_sweep", _ints),
    },
    "experiment": {
        "designs": ("designs", _designs),
        "targets": ("targets", lambda t: tuple(_floats(t))),
        "coverage_target": ("coverage_target", float),
        "samples": ("samples", _int),
        "seed": ("seed", _int),
        "random_redraw": ("random_redraw", _bool),
        "quad_nodes": ("quad_nodes", _int),
        "quad_rtol": ("quad_rtol", float),
    },
}


def _key_line(text: str, section: str, key: str) -> int | None:
    current = None
    for i, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        m = re.match(r"^\[(.+)\]$", s)
        if m:
            current = m.group(1).strip().lower()
        elif current == section and re.match(rf"^{re.escape(key)}\s*[=:]", s, re.IGNORECASE):
            return i
    return None


def parse_config(text: str) -> ScenarioConfig:
    parser = configparser.ConfigParser(interpolation=None, strict=True, inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text)
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError(f"line {exc.lineno}: key outside of a [section]") from None
    except configparser.ParsingError as exc:
        lineno, line = exc.errors[0]
        raise ConfigError(f"line {lineno}: cannot parse {line.strip()!r}") from None
    except configparser.DuplicateOptionError as exc:
        raise ConfigError(f"line {exc.lineno}: duplicate key {exc.option!r} in [{exc.section}]") from None
    except configparser.DuplicateSectionError as exc:
        raise ConfigError(f"line {exc.lineno}: duplicate section [{exc.section}]") from None

    values: dict = {}
    for section in parser.sections():
        sec = section.strip().lower()
        if sec not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        for key, raw in parser.items(section):
            if key not in _SCHEMA[sec]:
                line = _key_line(text, sec, key)
                where = f"line {line}: " if line else ""
                raise ConfigError(f"{where}unknown key {key!r} in [{section}]")
            name, conv = _SCHEMA[sec][key]
            try:
                values[name] = conv(raw)
            except ValueError as exc:
                line = _key_line(text, sec, key)
                where = f"line {line}: " if line else ""
                raise ConfigError(f"{where}[{section}] {key}: bad value {raw!r} ({exc})") from None

    # a bare M also fixes the sweep unless M_sweep is given
    if "M" in values and "M_sweep" not in values:
        values["M_sweep"] = (values["M"],)
    known = {f.name for f in fields(ScenarioConfig)}
    assert set(values) <= known
    return ScenarioConfig(**values)


def load_config(path) -> ScenarioConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
