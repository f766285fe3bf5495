"""Run configuration: pydantic models with strict keys, a flat dotted-key
text format, and resolution into device parameters.

Config files look like

    # paper device
    device.ej_ghz = 13.96
    drive.detuning_mhz = -35
    sweep.axis = angle

Unknown keys are errors (typo safety).  Frequencies are ordinary (MHz/GHz)
and durations are in ns/ps here; conversion to angular rad/s happens when
the config is resolved.
"""

from __future__ import annotations

import math
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .errors import ConfigurationError
from .model import DeviceParams, alpha_ladder, transmon_spectrum

MHZ_TO_RAD_S = 2.0 * math.pi * 1e6


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", validate_assignment=True)


class DeviceConfig(_Section):
    ej_ghz: float = 13.96
    ec_ghz: float = 0.36
    n_levels: int = Field(default=4, ge=2)
    # measured anharmonicity overrides the charge-basis value when set
    alpha2_mhz: float | None = -423.0
    alpha3_mhz: float | None = None


class CoherenceConfig(_Section):
    t1_us: float | None = 0.84
    t2star_us: float | None = 1.03
    t2echo_us: float | None = 1.11  # informational only; not modelled


class DriveSection(_Section):
    detuning_mhz: float = -35.0
    ramp_ns: float = 40.0
    pi2_ns: float = 12.0
    tau_ns: float = 200.0
    drag: bool = True
    budget_ns: float = 700.0


class NumericsConfig(_Section):
    dt_ps: float = Field(default=10.0, gt=0)
    charge_cutoff: int = Field(default=30, ge=2)


class ReadoutConfig(_Section):
    shots: int = Field(default=0, ge=0)  # 0 = exact expectations
    seed: int = 1234


class SweepSection(_Section):
    axis: Literal["angle", "detuning", "tau"] = "angle"
    start: float | None = None
    stop: float | None = None
    points: int | None = Field(default=None, ge=2)
    spacing: Literal["linear", "log"] | None = None
    # solid angles used by the detuning sweep (units of sr)
    angles_sr: tuple[float, ...] = (math.pi / 4, 3 * math.pi / 4, 5 * math.pi / 4)


class RunConfig(_Section):
    device: DeviceConfig = DeviceConfig()
    coherence: CoherenceConfig = CoherenceConfig()
    drive: DriveSection = DriveSection()
    numerics: NumericsConfig = NumericsConfig()
    readout: ReadoutConfig = ReadoutConfig()
    sweep: SweepSection = SweepSection()
    decoherence: bool = True
    workers: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def _check(self):
        if self.decoherence and (self.coherence.t1_us is None or self.coherence.t2star_us is None):
            raise ValueError("decoherence=on needs coherence.t1_us and coherence.t2star_us")
        return self

    def device_params(self) -> DeviceParams:
        """Resolve the anharmonicity ladder: explicit overrides first, then
        the leading j(j-1)/2 scaling, and the charge-basis spectrum when no
        override is given at all."""
        n = self.device.n_levels
        if self.device.alpha2_mhz is not None:
            alpha2 = self.device.alpha2_mhz * MHZ_TO_RAD_S
            alphas = alpha_ladder(alpha2, n)
        else:
            _, alphas = transmon_spectrum(
                self.device.ej_ghz, self.device.ec_ghz, max(n, 3), self.numerics.charge_cutoff
            )
            alphas = list(alphas[:n])
        if self.device.alpha3_mhz is not None and n >= 4:
            alphas[3] = self.device.alpha3_mhz * MHZ_TO_RAD_S
        return DeviceParams(
            n_levels=n,
            anharmonicities=tuple(alphas[:n]),
            e_j=self.device.ej_ghz,
            e_c=self.device.ec_ghz,
            t1=self.coherence.t1_us,
            t2_star=self.coherence.t2star_us,
        )

    @property
    def delta(self) -> float:
        """Detuning in rad/s."""
        return self.drive.detuning_mhz * MHZ_TO_RAD_S

    @property
    def dt_s(self) -> float:
        return self.numerics.dt_ps * 1e-12

    def sweep_grid(self) -> np.ndarray:
        """Resolve the sweep grid in the axis' natural units (sr, MHz, ns)."""
        axis = self.sweep.axis
        defaults = {
            "angle": (1.5 * math.pi / 24, 1.5 * math.pi, 24, "linear"),
            "detuning": (-60.0, -25.0, 8, "linear"),
            "tau": (10.0, 250.0, 30, "log"),
        }
        d_start, d_stop, d_points, d_spacing = defaults[axis]
        start = self.sweep.start if self.sweep.start is not None else d_start
        stop = self.sweep.stop if self.sweep.stop is not None else d_stop
        points = self.sweep.points if self.sweep.points is not None else d_points
        spacing = self.sweep.spacing if self.sweep.spacing is not None else d_spacing
        if spacing == "log":
            if start <= 0 or stop <= 0:
                raise ConfigurationError("log spacing needs positive endpoints")
            grid = np.geomspace(start, stop, points)
        else:
            grid = np.linspace(start, stop, points)
        if not np.all(np.diff(grid) > 0) and not np.all(np.diff(grid) < 0):
            raise ConfigurationError("sweep grid must be strictly monotone")
        return grid

    def flat_items(self) -> list[tuple[str, str]]:
        """Fully resolved config as sorted dotted key/value pairs (the CSV
        metadata header)."""
        items: list[tuple[str, str]] = []

        def walk(prefix: str, obj: dict):
            for key, value in obj.items():
                name = f"{prefix}.{key}" if prefix else key
                if isinstance(value, dict):
                    walk(name, value)
                elif isinstance(value, (list, tuple)):
                    items.append((name, ",".join(_fmt(v) for v in value)))
                else:
                    items.append((name, _fmt(value)))

        walk("", self.model_dump())
        return sorted(items)


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "none"
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def _parse_scalar(text: str):
    text = text.strip()
    lowered = text.lower()
    if lowered in ("true", "on", "yes"):
        return True
    if lowered in ("false", "off", "no"):
        return False
    if lowered in ("none", "null"):
        return None
    if "," in text:
        return tuple(_parse_scalar(part) for part in text.split(","))
    try:
        as_int = int(text)
    except ValueError:
        pass
    else:
        return as_int
    try:
        return float(text)
    except ValueError:
        return text


def parse_config_text(text: str) -> dict:
    """Parse the flat dotted-key format into a nested dict."""
    nested: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        if not key:
            raise ConfigurationError(f"line {lineno}: empty key")
        node = nested
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigurationError(f"line {lineno}: key {key!r} conflicts with a scalar")
        node[parts[-1]] = _parse_scalar(value)
    return nested


def load_config(path: str | None = None, overrides: dict | None = None) -> RunConfig:
    """Build a RunConfig from an optional file plus programmatic overrides.

    Unknown keys raise ConfigurationError.
    """
    data: dict = {}
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            data = parse_config_text(fh.read())
    for key, value in (overrides or {}).items():
        node = data
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
        node[parts[-1]] = value
    try:
        return RunConfig(**data)
    except ValidationError as exc:
        raise ConfigurationError(f"invalid configuration: {exc}") from exc
