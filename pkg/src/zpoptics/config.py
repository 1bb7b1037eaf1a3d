"""Scenario configuration: a single JSON document with explicit units.

All physical quantities carry unit suffixes in their key names so config
files diff cleanly and reproduce bit-exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping

import jsonschema

from .covariance import CovarianceModel
from .fields import Pol

BEAM_LABELS = ("1", "2", "3", "4")
PORT_NAMES = ("DH1", "DV1", "DH2", "DV2", "DH3", "DV3", "DH4", "DV4")


class ConfigError(ValueError):
    """Raised for malformed or inconsistent scenario configuration."""


@dataclass(frozen=True)
class CorrectionSpec:
    """A phase shift applied to one beam component before its analyser."""

    beam: str
    polarization: Pol
    phase_rad: float


_SCHEMA: dict[str, Any] = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "g": {"type": "number", "minimum": 0},
        "V": {
            "type": "array",
            "items": {"type": "number"},
            "minItems": 2,
            "maxItems": 2,
        },
        "tau_c_ps": {"type": "number", "exclusiveMinimum": 0},
        "kernel": {"enum": ["gaussian"]},
        "central_frequency_rad_s": {"type": "number", "exclusiveMinimum": 0},
        "arm_lengths_m": {
            "type": "object",
            "additionalProperties": False,
            "properties": {label: {"type": "number", "minimum": 0}
                           for label in BEAM_LABELS},
        },
        "detection_times_ps": {
            "type": "object",
            "additionalProperties": False,
            "properties": {name: {"type": "number"} for name in PORT_NAMES},
        },
        "corrections": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["beam", "polarization", "phase_rad"],
                "properties": {
                    "beam": {"enum": list(BEAM_LABELS)},
                    "polarization": {"enum": ["H", "V"]},
                    "phase_rad": {"type": "number"},
                },
            },
        },
        "mc": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "samples": {"type": "integer", "minimum": 1},
                "seed": {"type": "integer", "minimum": 0},
                "batches": {"type": "integer", "minimum": 1},
            },
        },
    },
}


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything needed to assemble and evaluate one experiment."""

    coupling: float = 0.1
    pump: complex = 1.0 + 0j
    tau_c_s: float = 1e-12
    kernel_name: str = "gaussian"
    central_frequency_rad_s: float = 2.7e15
    arm_lengths_m: Mapping[str, float] = field(
        default_factory=lambda: {label: 0.0 for label in BEAM_LABELS})
    detection_times_s: Mapping[str, float] = field(
        default_factory=lambda: {name: 0.0 for name in PORT_NAMES})
    corrections: tuple[CorrectionSpec, ...] = ()
    mc_samples: int = 1_000_000
    mc_seed: int = 12345
    mc_batches: int = 100

    def model(self) -> CovarianceModel:
        return CovarianceModel(
            coupling=self.coupling,
            pump=self.pump,
            correlation_time_s=self.tau_c_s,
        )

    def with_corrections(self, *extra: CorrectionSpec) -> "ScenarioConfig":
        return replace(self, corrections=self.corrections + tuple(extra))

    @staticmethod
    def from_dict(data: Mapping[str, Any]) -> "ScenarioConfig":
        try:
            jsonschema.validate(data, _SCHEMA)
        except jsonschema.ValidationError as err:
            raise ConfigError(f"invalid scenario config: {err.message}") from err

        base = ScenarioConfig()
        arms = dict(base.arm_lengths_m)
        arms.update(data.get("arm_lengths_m", {}))
        times = dict(base.detection_times_s)
        times.update({name: value * 1e-12
                      for name, value in data.get("detection_times_ps", {}).items()})
        corrections = tuple(
            CorrectionSpec(item["beam"], Pol(item["polarization"]),
                           item["phase_rad"])
            for item in data.get("corrections", ()))
        mc = data.get("mc", {})
        pump_re, pump_im = data.get("V", (base.pump.real, base.pump.imag))
        return ScenarioConfig(
            coupling=data.get("g", base.coupling),
            pump=complex(pump_re, pump_im),
            tau_c_s=data.get("tau_c_ps", base.tau_c_s * 1e12) * 1e-12,
            kernel_name=data.get("kernel", base.kernel_name),
            central_frequency_rad_s=data.get(
                "central_frequency_rad_s", base.central_frequency_rad_s),
            arm_lengths_m=arms,
            detection_times_s=times,
            corrections=corrections,
            mc_samples=mc.get("samples", base.mc_samples),
            mc_seed=mc.get("seed", base.mc_seed),
            mc_batches=mc.get("batches", base.mc_batches),
        )

    @staticmethod
    def from_file(path: str | Path) -> "ScenarioConfig":
        try:
            with open(path, encoding="utf-8") as handle:
                data = json.load(handle)
        except OSError as err:
            raise ConfigError(f"cannot read scenario file: {err}") from err
        except json.JSONDecodeError as err:
            raise ConfigError(f"scenario file is not valid JSON: {err}") from err
        if not isinstance(data, dict):
            raise ConfigError("scenario file must contain a JSON object")
        return ScenarioConfig.from_dict(data)
