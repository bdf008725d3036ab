"""TOML scenario configuration with strict schema checking.

Every section and key has a default; unknown sections or keys are rejected so
that typos cannot silently fall back to defaults.
"""
from __future__ import annotations

import copy
import os
from typing import Any, Dict

try:  # Python >= 3.11
    import tomllib
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

from .errors import ConfigInvalid, ConfigNotFound, ConfigParseError, ConfigUnknownKey

SCHEMA: Dict[str, Dict[str, Any]] = {
    "domain": {"L": 1.0, "n_y": 33, "Le": 1.0, "eig_tol": 1e-12, "eig_shift": 1e-10},
    "flow": {"profile": "constant", "mean": 0.0, "amplitude": 0.0},
    "reaction": {"kind": "linear", "profile": "constant", "mean": 1.0, "amplitude": 0.0,
                 "holder_alpha": 1.0, "s0": 1.0},
    "loss": {"kind": "linear", "profile": "constant", "mean": 0.25, "amplitude": 0.0},
    "eigen": {"lambda_min": -2.0, "lambda_max": 2.0, "samples": 41},
    "dispersion": {"lambda_min": 0.05, "lambda_max": 3.0, "samples": 60,
                   "search_factor": 50.0},
    "classify": {"decay": 0.5, "eta_samples": 200},
    "simulate": {"x_min": -20.0, "x_max": 80.0, "n_x": 2001, "t_end": 25.0, "cadence": 0.5,
                 "dt": 0.0, "dt_max": 0.01, "cfl": 0.9, "loss_factor": 0.5,
                 "guard_margin": 5.0, "decay": 0.5, "decay_y": 1.0, "c1": 1.0, "c2": 1.0,
                 "c3": 1.0, "plateau": 1.0, "fit_window": 0.5,
                 "snapshot_every": 5.0, "stride_x": 20, "stride_y": 4},
    "front": {"speed": 2.0, "half_length": 40.0, "dx": 0.1, "tol": 1e-8, "max_iter": 2000,
              "theta": 0.7, "margin": 0.1, "ka_offset": 1.0, "t_init": 0.1,
              "minimal": False, "levels": 6, "stride_x": 4, "stride_y": 4},
    "diagnostics": {"right_offset": 10.0, "right_width": 10.0, "left_skip": 5.0,
                    "left_width": 10.0, "tail_skip": 5.0,
                    "tail_width": 10.0},
}

SECTION_ORDER = tuple(SCHEMA)


def defaults() -> Dict[str, Dict[str, Any]]:
    return copy.deepcopy(SCHEMA)


def _coerce(section: str, key: str, value: Any, default: Any) -> Any:
    where = f"[{section}] {key}"
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigInvalid(f"{where} must be a boolean", value=value)
        return value
    if isinstance(default, int):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigInvalid(f"{where} must be an integer", value=value)
        return value
    if isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigInvalid(f"{where} must be a number", value=value)
        return float(value)
    if isinstance(default, str):
        if not isinstance(value, str):
            raise ConfigInvalid(f"{where} must be a string", value=value)
        return value
    raise ConfigInvalid(f"{where}: unsupported type")  # pragma: no cover


def merge(raw: Dict[str, Any]) -> Dict[str, Dict[str, Any]]:
    cfg = defaults()
    for section, body in raw.items():
        if section not in SCHEMA:
            raise ConfigUnknownKey(f"unknown section [{section}]", allowed=SECTION_ORDER)
        if not isinstance(body, dict):
            raise ConfigInvalid(f"[{section}] must be a table")
        for key, value in body.items():
            if key not in SCHEMA[section]:
                raise ConfigUnknownKey(f"unknown key {key!r} in [{section}]",
                                       allowed=tuple(SCHEMA[section]))
            cfg[section][key] = _coerce(section, key, value, SCHEMA[section][key])
    return cfg


def load_config(path) -> Dict[str, Dict[str, Any]]:
    path = os.fspath(path)
    if not os.path.isfile(path):
        raise ConfigNotFound(f"configuration file not found: {path}")
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigParseError(f"{path}: {exc}") from exc
    return merge(raw)


def override(cfg, section: str, key: str, value) -> None:
    if value is None:
        return
    cfg[section][key] = _coerce(section, key, value, SCHEMA[section][key])


def build_model_from_config(cfg):
    from .cross_section import LossSpec, ProfileSpec, ReactionSpec, build_model
    d, fl, r, ls = cfg["domain"], cfg["flow"], cfg["reaction"], cfg["loss"]
    for sec in (fl, r, ls):
        if sec["profile"] not in ("constant", "cosine", "two_bump"):
            raise ConfigInvalid("profile must be constant, cosine or two_bump",
                                value=sec["profile"])
    return build_model(
        d["L"], d["n_y"], ProfileSpec(fl["profile"], fl["mean"], fl["amplitude"]),
        ReactionSpec(r["kind"], ProfileSpec(r["profile"], r["mean"], r["amplitude"]),
                     r["holder_alpha"], r["s0"]),
        LossSpec(ls["kind"], ProfileSpec(ls["profile"], ls["mean"], ls["amplitude"])),
        d["Le"], eig_tol=d["eig_tol"], eig_shift=d["eig_shift"])
