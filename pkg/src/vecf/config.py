"""Run configuration: one INI-style file, schema-checked, with flag overrides.

Every numeric key is range-checked at load time and unknown keys are
rejected by name.  Defaults encode the causal regime a1 = 4, a2 = 4.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass

from .constitutive import TransportModel

__all__ = ["ConfigError", "RunConfig", "load_config", "SCHEMA"]


class ConfigError(Exception):
    """Invalid configuration; message names the offending key."""


def _float_range(lo=None, hi=None, lo_open=False):
    def check(v):
        x = float(v)
        if lo is not None and (x <= lo if lo_open else x < lo):
            raise ValueError(f"must be {'>' if lo_open else '>='} {lo}")
        if hi is not None and x > hi:
            raise ValueError(f"must be <= {hi}")
        return x
    return check


def _int_range(lo=None, hi=None):
    def check(v):
        x = int(v)
        if lo is not None and x < lo:
            raise ValueError(f"must be >= {lo}")
        if hi is not None and x > hi:
            raise ValueError(f"must be <= {hi}")
        return x
    return check


def _choice(*opts):
    def check(v):
        if v not in opts:
            raise ValueError(f"must be one of {opts}")
        return v
    return check


def _int_list(v):
    vals = [int(s) for s in str(v).replace(",", " ").split()]
    if not vals:
        raise ValueError("must be a non-empty list of integers")
    return vals


def _float_list(v):
    vals = [float(s) for s in str(v).replace(",", " ").split()]
    if not vals:
        raise ValueError("must be a non-empty list of numbers")
    return vals


SCHEMA = {
    "transport": {
        "a1": (_float_range(), 4.0),
        "a2": (_float_range(), 4.0),
        "eta_form": (_choice("constant", "power"), "power"),
        "eta0": (_float_range(lo=0.0, lo_open=True), 1.0),
        "p_exp": (_float_range(), 0.75),
    },
    "scan": {
        "a2_list": (_float_list, [4.0, 5.0, 6.0, 8.0, 10.0]),
        "u_max": (_float_range(lo=0.0), 10.0),
        "u_steps": (_int_range(lo=2), 33),
        "theta_steps": (_int_range(lo=8), 720),
        "a1_min": (_float_range(), 1.0),
        "a1_max": (_float_range(), 6.0),
        "a1_steps": (_int_range(lo=1), 11),
        "a2_min": (_float_range(), 1.0),
        "a2_max": (_float_range(), 12.0),
        "a2_steps": (_int_range(lo=1), 12),
    },
    "solver": {
        "n_cells": (_int_range(lo=16), 512),
        "length": (_float_range(lo=0.0, lo_open=True), 2.0),
        "cfl": (_float_range(lo=0.0, hi=1.0, lo_open=True), 0.25),
        "t_end": (_float_range(lo=0.0, lo_open=True), 0.5),
        "ic": (_choice("constant", "gaussian-eps-pulse", "shear-pulse"),
               "gaussian-eps-pulse"),
        "ic_amplitude": (_float_range(), 0.05),
        "ic_width": (_float_range(lo=0.0, lo_open=True), 0.1),
        "ic_center": (_float_range(), 1.0),
        "eps0": (_float_range(lo=0.0, lo_open=True), 1.0),
        "filter_strength": (_float_range(lo=0.0), 1.0),
        "output_every": (_int_range(lo=0), 0),
    },
    "verification": {
        "samples": (_int_range(lo=1), 10000),
        "seed": (_int_range(), 7),
    },
    "dod": {
        "probe_t": (_float_range(lo=0.0, lo_open=True), 0.35),
        "probe_x": (_float_range(), 0.5),
        "amplitude": (_float_range(), 0.02),
        "radius": (_float_range(lo=0.0, lo_open=True), 0.14),
        "margin": (_float_range(lo=0.0), 0.10),
        "probe_window": (_float_range(lo=0.0), 0.05),
        "bump_power": (_int_range(lo=1), 4),
        "resolutions": (_int_list, [128, 256, 512, 1024]),
    },
    "convergence": {
        "resolutions": (_int_list, [256, 512, 1024]),
    },
    "oracle": {
        "resolutions": (_int_list, [64, 128, 256, 512]),
        "t0": (_float_range(), 0.37),
    },
    "speeds": {
        "sound_a2": (_float_range(lo=4.0), 6.0),
        "shear_a2": (_float_range(lo=4.0), 4.0),
        "n_cells": (_int_range(lo=64), 1024),
    },
    "output": {
        "dir": (str, "out"),
    },
}


@dataclass
class RunConfig:
    values: dict

    def __getitem__(self, section: str) -> dict:
        return self.values[section]

    def transport_model(self) -> TransportModel:
        t = self.values["transport"]
        return TransportModel(a1=t["a1"], a2=t["a2"], eta_form=t["eta_form"],
                              eta0=t["eta0"], p_exp=t["p_exp"])


def _defaults() -> dict:
    return {sec: {k: spec[1] for k, spec in keys.items()}
            for sec, keys in SCHEMA.items()}


def load_config(path: str | None = None, overrides=()) -> RunConfig:
    """Load defaults, then the file, then `section.key=value` overrides."""
    values = _defaults()

    def apply(section: str, key: str, raw):
        if section not in SCHEMA:
            raise ConfigError(f"unknown config section [{section}]")
        if key not in SCHEMA[section]:
            raise ConfigError(f"unknown config key '{key}' in section [{section}]")
        check = SCHEMA[section][key][0]
        try:
            values[section][key] = check(raw)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"bad value for {section}.{key}: {exc}") from exc

    if path is not None:
        parser = configparser.ConfigParser()
        read = parser.read(path)
        if not read:
            raise ConfigError(f"config file not found: {path}")
        if not parser.sections():
            raise ConfigError(
                f"config file {path} is empty: no sections found "
                f"(expected at least one of {sorted(SCHEMA)})")
        for section in parser.sections():
            for key, raw in parser.items(section):
                apply(section, key, raw)

    for item in overrides:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ConfigError(f"override must look like section.key=value: {item!r}")
        target, raw = item.split("=", 1)
        section, key = target.split(".", 1)
        apply(section.strip(), key.strip(), raw.strip())
    return RunConfig(values=values)
