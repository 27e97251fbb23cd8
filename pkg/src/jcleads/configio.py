"""INI config files and deterministic CSV/JSON writers.

Config format: flat key-value sections, keys named after the model fields.

    [leads.left]
    bias = 0.0
    [leads.right]
    bias = 0.0
    [leads]
    g_el = 0.2
    [dot]
    spacing = 1.0
    level_base = 0.0
    contact_angle = 0.7853981633974483
    contact_phase = 0.0
    [photon]
    omega = 4.0
    cutoff = 4
    g_ph = 0.2
    [thermal]
    beta = 1.0          ; "inf" selects the zero-temperature state
    mu_left = 0.0
    mu_right = 0.0
    [numerics]
    rel_tol = 1e-8

CSV output: mandatory header row, floats at 17 significant digits, UTF-8,
LF line endings, so identical inputs produce byte-identical files.
"""

from __future__ import annotations

import configparser
import json
import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .currents import NumericsSpec
from .errors import ConfigError
from .model import DotParams, LeadParams, ModelConfig, PhotonParams, Side, ThermalState


@dataclass(frozen=True)
class LoadedRun:
    config: ModelConfig
    thermal: ThermalState
    numerics: NumericsSpec


def _get_float(cp, section, key, default=None, required=False):
    if not cp.has_option(section, key):
        if required:
            raise ConfigError(f"{section}.{key}", "missing required key")
        return default
    raw = cp.get(section, key).strip()
    if raw.lower() in ("inf", "+inf", "infinity"):
        return math.inf
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"{section}.{key}", f"not a number: {raw!r}") from exc


def _get_int(cp, section, key, default=None):
    if not cp.has_option(section, key):
        return default
    raw = cp.get(section, key).strip()
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"{section}.{key}", f"not an integer: {raw!r}") from exc


def load_run(path: str) -> LoadedRun:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    read = cp.read(path)
    if not read:
        raise ConfigError("config", f"cannot read config file {path!r}")
    config = ModelConfig(
        left=LeadParams(bias=_get_float(cp, "leads.left", "bias", 0.0), side=Side.LEFT),
        right=LeadParams(bias=_get_float(cp, "leads.right", "bias", 0.0), side=Side.RIGHT),
        dot=DotParams(
            spacing=_get_float(cp, "dot", "spacing", required=True),
            level_base=_get_float(cp, "dot", "level_base", 0.0),
            contact_angle=_get_float(cp, "dot", "contact_angle", 0.0),
            contact_phase=_get_float(cp, "dot", "contact_phase", 0.0),
        ),
        photon=PhotonParams(
            omega=_get_float(cp, "photon", "omega", required=True),
            cutoff=_get_int(cp, "photon", "cutoff", 4),
        ),
        g_el=_get_float(cp, "leads", "g_el", 0.0),
        g_ph=_get_float(cp, "photon", "g_ph", 0.0),
    )
    thermal = ThermalState(
        beta=_get_float(cp, "thermal", "beta", 1.0),
        mu_left=_get_float(cp, "thermal", "mu_left", 0.0),
        mu_right=_get_float(cp, "thermal", "mu_right", 0.0),
    )
    numerics = NumericsSpec(
        rel_tol=_get_float(cp, "numerics", "rel_tol", 1e-8),
        abs_tol=_get_float(cp, "numerics", "abs_tol", 1e-14),
        cutoff_rel=_get_float(cp, "numerics", "cutoff_rel", 1e-8),
        nph_override=_get_int(cp, "numerics", "nph"),
        nph_max=_get_int(cp, "numerics", "nph_max", 128),
        charge_scale=_get_float(cp, "numerics", "charge_scale", 1.0),
    )
    return LoadedRun(config=config, thermal=thermal, numerics=numerics)


def fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def write_csv(path: Optional[str], header: Sequence[str], rows) -> str:
    text = ",".join(header) + "\n" + "".join(
        ",".join(fmt(v) for v in row) + "\n" for row in rows
    )
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return text


def write_json(path: Optional[str], payload: dict) -> str:
    text = json.dumps(payload, indent=2, sort_keys=False) + "\n"
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return text
