"""Waveform CSV and JSON configuration files."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Any, Mapping

import jsonschema
import numpy as np

from .errors import ConfigError, WaveformFormatError
from .loadsim import House, LoadSignature, RectifierParams, builtin_signatures, validate_signature
from .scenario import ScenarioDef, builtin_scenarios
from .signal import HarmonicSpectrum, Waveform
from .spectral import SpectralConfig
from .xfmr import ThermalSpec, TransformerSpec

CSV_HEADER = ("time_s", "current_a")
UNIFORMITY_TOL = 1e-6


# --- waveform CSV -------------------------------------------------------------


def read_waveform_csv(path: str | Path, fundamental: float = 60.0) -> Waveform:
    """Load ``time_s,current_a`` rows; sample rate is taken from the timestamps."""
    times: list[float] = []
    values: list[float] = []
    linenos: list[int] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise WaveformFormatError("empty file, expected header 'time_s,current_a'", line=1)
        header = [c.strip() for c in header]
        for col in CSV_HEADER:
            if col not in header:
                raise WaveformFormatError(f"missing column '{col}' in header", line=1)
        ti, ci = header.index("time_s"), header.index("current_a")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise WaveformFormatError(f"expected {len(header)} fields, got {len(row)}", line=lineno)
            try:
                t, v = float(row[ti]), float(row[ci])
            except ValueError:
                raise WaveformFormatError(f"non-numeric value in {row!r}", line=lineno) from None
            if not (math.isfinite(t) and math.isfinite(v)):
                raise WaveformFormatError("non-finite value", line=lineno)
            times.append(t)
            values.append(v)
            linenos.append(lineno)
    if len(times) < 2:
        raise WaveformFormatError("need at least 2 samples")
    t = np.asarray(times)
    dt = np.diff(t)
    first = dt[0]
    if not first > 0:
        raise WaveformFormatError("timestamps must be strictly increasing", line=linenos[1])
    bad = np.flatnonzero(np.abs(dt - first) > UNIFORMITY_TOL * first)
    if bad.size:
        k = int(bad[0])
        raise WaveformFormatError(
            f"non-uniform timestamp step {dt[k]:.9g} s (expected {first:.9g} s)", line=linenos[k + 1]
        )
    step = (t[-1] - t[0]) / (t.size - 1)
    return Waveform(np.asarray(values), 1.0 / step, fundamental)


def write_waveform_csv(w: Waveform, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(CSV_HEADER) + "\n")
        for n, v in enumerate(w.samples):
            fh.write(f"{n / w.sample_rate:.12g},{v:.17g}\n")


# --- JSON schema --------------------------------------------------------------

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}

SIGNATURE_SCHEMA = {
    "type": "object",
    "required": ["name", "rated_power_kw", "fractions"],
    "properties": {
        "name": {"type": "string", "minLength": 1},
        "rated_power_kw": {"type": "number", "minimum": 0},
        "generator": {"type": "boolean"},
        "fractions": {
            "type": "object",
            "patternProperties": {"^[0-9]+$": {"type": "number", "minimum": 0}},
            "additionalProperties": False,
        },
        "phases": {
            "type": "object",
            "patternProperties": {"^[0-9]+$": _NUM},
            "additionalProperties": False,
        },
    },
    "additionalProperties": False,
}

TRANSFORMER_SCHEMA = {
    "type": "object",
    "properties": {
        "rated_current_a": _POS,
        "r_dc_ohm": {"type": "number", "minimum": 0},
        "p_ec_r": {"type": "number", "minimum": 0, "maximum": 0.15},
        "no_load_loss_w": {"type": "number", "minimum": 0},
        "stray_loss_w": {"type": "number", "minimum": 0},
        "thermal": {
            "type": "object",
            "properties": {
                "mass_kg": _POS,
                "specific_heat_j_per_kg_k": _POS,
                "emissivity_area_w_per_k": _POS,
                "time_constant_s": _POS,
            },
            "additionalProperties": False,
        },
    },
    "additionalProperties": False,
}

SCENARIO_SCHEMA = {
    "type": "object",
    "required": ["id", "peak_time", "pv_units", "houses", "expected_net_load_kw"],
    "properties": {
        "id": {"type": "string"},
        "peak_time": {"enum": ["evening", "day"]},
        "pv_units": {"type": "integer", "minimum": 0},
        "pv_kw_per_unit": _POS,
        "expected_net_load_kw": _NUM,
        "houses": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "pv_units": {"type": "integer", "minimum": 0},
                    "appliances": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["signature", "count"],
                            "properties": {
                                "signature": {"type": "string"},
                                "count": {"type": "integer", "minimum": 0},
                            },
                            "additionalProperties": False,
                        },
                    },
                },
                "additionalProperties": False,
            },
        },
    },
    "additionalProperties": False,
}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "harmonic-derating configuration",
    "type": "object",
    "properties": {
        "schema_version": {"const": 1},
        "transformer": TRANSFORMER_SCHEMA,
        "spectral": {
            "type": "object",
            "properties": {
                "h_max": {"type": "integer", "minimum": 1},
                "scan_halfwidth": {"type": "integer", "minimum": 0},
                "window": {"enum": ["none", "hann"]},
            },
            "additionalProperties": False,
        },
        "signatures": {"type": "array", "items": SIGNATURE_SCHEMA},
        "scenarios": {"type": "array", "items": SCENARIO_SCHEMA},
        "fundamental_hz": _POS,
    },
    "additionalProperties": False,
}

SPECTRUM_SCHEMA = {
    "type": "object",
    "required": ["harmonics"],
    "properties": {
        "fundamental_hz": _POS,
        "duration_s": _NUM,
        "sample_rate_hz": _POS,
        "harmonics": {
            "type": "object",
            "patternProperties": {
                "^[0-9]+$": {
                    "oneOf": [
                        {"type": "number", "minimum": 0},
                        {
                            "type": "object",
                            "required": ["rms_a"],
                            "properties": {
                                "rms_a": {"type": "number", "minimum": 0},
                                "phase_rad": _NUM,
                            },
                            "additionalProperties": False,
                        },
                    ]
                }
            },
            "additionalProperties": False,
        },
    },
    "additionalProperties": False,
}


def _validate(doc: Any, schema: Mapping, what: str) -> None:
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"{what}: {where}: {exc.message}") from None


def load_json(path: str | Path) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None


# --- conversions ----------------------------------------------------------------


def signature_from_dict(doc: Mapping) -> LoadSignature:
    _validate(doc, SIGNATURE_SCHEMA, "signature")
    sig = LoadSignature.from_fractions(
        doc["name"],
        doc["rated_power_kw"],
        {int(h): f for h, f in doc["fractions"].items()},
        {int(h): p for h, p in doc.get("phases", {}).items()},
        generator=doc.get("generator", False),
    )
    validate_signature(sig)
    return sig


def signature_to_dict(sig: LoadSignature) -> dict:
    offset = math.pi if sig.generator else 0.0
    phases = {
        str(h): ph for h, (_, ph) in sig.spectrum_per_kw.entries.items() if h != 1 and ph != offset
    }
    doc = {
        "name": sig.name,
        "rated_power_kw": sig.rated_power,
        "generator": sig.generator,
        "fractions": {str(h): f for h, f in sig.fractions.items()},
    }
    if phases:
        doc["phases"] = phases
    return doc


def transformer_from_dict(doc: Mapping) -> TransformerSpec:
    _validate(doc, TRANSFORMER_SCHEMA, "transformer")
    base = TransformerSpec()
    th = doc.get("thermal", {})
    thermal = ThermalSpec(
        mass=th.get("mass_kg", base.thermal.mass),
        specific_heat=th.get("specific_heat_j_per_kg_k", base.thermal.specific_heat),
        emissivity_area=th.get("emissivity_area_w_per_k", base.thermal.emissivity_area),
        time_constant=th.get("time_constant_s"),
    )
    return TransformerSpec(
        rated_current=doc.get("rated_current_a", base.rated_current),
        r_dc=doc.get("r_dc_ohm", base.r_dc),
        p_ec_r=doc.get("p_ec_r", base.p_ec_r),
        no_load_loss=doc.get("no_load_loss_w", base.no_load_loss),
        stray_loss=doc.get("stray_loss_w", base.stray_loss),
        thermal=thermal,
    )


def transformer_to_dict(t: TransformerSpec) -> dict:
    return {
        "rated_current_a": t.rated_current,
        "r_dc_ohm": t.r_dc,
        "p_ec_r": t.p_ec_r,
        "no_load_loss_w": t.no_load_loss,
        "stray_loss_w": t.stray_loss,
        "thermal": {
            "mass_kg": t.thermal.mass,
            "specific_heat_j_per_kg_k": t.thermal.specific_heat,
            "emissivity_area_w_per_k": t.thermal.emissivity_area,
            "time_constant_s": t.thermal.time_constant,
        },
    }


def scenario_from_dict(doc: Mapping, signatures: Mapping[str, LoadSignature]) -> ScenarioDef:
    _validate(doc, SCENARIO_SCHEMA, "scenario")
    houses = []
    for k, hd in enumerate(doc["houses"]):
        appliances = []
        for a in hd.get("appliances", []):
            if a["signature"] not in signatures:
                raise ConfigError(f"scenario {doc['id']}: house {k}: unknown signature {a['signature']!r}")
            appliances.append((signatures[a["signature"]], a["count"]))
        houses.append(House(tuple(appliances), hd.get("pv_units", 0)))
    try:
        return ScenarioDef(
            id=doc["id"],
            pv_units=doc["pv_units"],
            peak_time=doc["peak_time"],
            houses=tuple(houses),
            expected_net_load=doc["expected_net_load_kw"],
            pv_kw_per_unit=doc.get("pv_kw_per_unit"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def scenario_to_dict(s: ScenarioDef) -> dict:
    return {
        "id": s.id,
        "peak_time": s.peak_time.value,
        "pv_units": s.pv_units,
        "pv_kw_per_unit": s.pv_kw_per_unit,
        "expected_net_load_kw": s.expected_net_load,
        "houses": [
            {
                "pv_units": h.pv_units,
                "appliances": [{"signature": sig.name, "count": c} for sig, c in h.appliances],
            }
            for h in s.houses
        ],
    }


def spectral_from_dict(doc: Mapping) -> SpectralConfig:
    return SpectralConfig(
        h_max=doc.get("h_max", 15),
        scan_halfwidth=doc.get("scan_halfwidth", 2),
        window=doc.get("window", "none"),
    )


def spectrum_from_dict(doc: Mapping) -> HarmonicSpectrum:
    _validate(doc, SPECTRUM_SCHEMA, "spectrum")
    return HarmonicSpectrum.from_dict(doc)


def rectifier_params_from_dict(doc: Mapping) -> RectifierParams:
    known = set(RectifierParams.__dataclass_fields__)
    unknown = set(doc) - known
    if unknown:
        raise ConfigError(f"rectifier params: unknown field(s) {sorted(unknown)}")
    return RectifierParams(**doc)


class Config:
    """Everything a configuration file can override; unset sections fall back to built-ins."""

    def __init__(self, doc: Mapping | None = None):
        doc = dict(doc or {})
        _validate(doc, CONFIG_SCHEMA, "config")
        self.doc = doc
        self.fundamental = doc.get("fundamental_hz", 60.0)
        self.transformer = transformer_from_dict(doc.get("transformer", {}))
        self.spectral = spectral_from_dict(doc.get("spectral", {}))
        if "signatures" in doc:
            sigs = [signature_from_dict(d) for d in doc["signatures"]]
            names = [s.name for s in sigs]
            if len(set(names)) != len(names):
                raise ConfigError("signature names must be unique")
            merged = {s.name: s for s in builtin_signatures()}
            merged.update({s.name: s for s in sigs})
            self.signatures = list(merged.values())
        else:
            self.signatures = builtin_signatures()
        by_name = {s.name: s for s in self.signatures}
        if "scenarios" in doc:
            self.scenarios = [scenario_from_dict(d, by_name) for d in doc["scenarios"]]
        else:
            self.scenarios = builtin_scenarios(self.signatures)

    @classmethod
    def load(cls, path: str | Path | None) -> "Config":
        return cls(load_json(path) if path else None)


def default_config_dict() -> dict:
    sigs = builtin_signatures()
    return {
        "schema_version": 1,
        "fundamental_hz": 60.0,
        "transformer": transformer_to_dict(TransformerSpec()),
        "spectral": {"h_max": 15, "scan_halfwidth": 2, "window": "none"},
        "signatures": [signature_to_dict(s) for s in sigs],
        "scenarios": [scenario_to_dict(s) for s in builtin_scenarios(sigs)],
    }
