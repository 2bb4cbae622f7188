"""Device configuration: the single source of truth for line and qubit parameters.

The JSON schema stores plain frequencies in Hz; everything in memory is
angular (rad/s). Readout-resonator frequencies are carried as metadata only.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .system import QubitSpec, SharedLineSystem

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class QubitRecord:
    label: str
    frequency_Hz: float
    anharmonicity_Hz: float = 0.0
    T1_s: float | None = None
    T2echo_s: float | None = None
    readout_freq_Hz: float | None = None


@dataclass(frozen=True)
class Defaults:
    dt_ns: float = 0.5
    sigma_Hz: float = 25e6
    T_ns: float = 40.0
    shots: int = 1000


@dataclass(frozen=True)
class DeviceConfig:
    qubits: tuple[QubitRecord, ...]
    shared_line: tuple[str, ...]
    defaults: Defaults = field(default_factory=Defaults)
    name: str = ""

    def __post_init__(self) -> None:
        labels = [q.label for q in self.qubits]
        if len(set(labels)) != len(labels):
            raise ConfigError(f"duplicate qubit labels: {labels}")
        for lab in self.shared_line:
            if lab not in labels:
                raise ConfigError(f"shared_line label {lab!r} does not name a qubit")
        for q in self.qubits:
            if q.frequency_Hz <= 0:
                raise ConfigError(f"qubits[{q.label}].frequency_Hz must be positive")

    def record(self, label: str) -> QubitRecord:
        for q in self.qubits:
            if q.label == label:
                return q
        raise ConfigError(f"no qubit labelled {label!r} in device config")

    def qubit_spec(self, label: str, levels: int = 2) -> QubitSpec:
        r = self.record(label)
        return QubitSpec(
            frequency=TWO_PI * r.frequency_Hz,
            anharmonicity=TWO_PI * r.anharmonicity_Hz,
            levels=levels,
            T1=r.T1_s,
            T2_echo=r.T2echo_s,
            label=r.label,
        )

    def system(self, target: str, levels: int = 2) -> SharedLineSystem:
        """The shared-line system with ``target`` designated."""
        if target not in self.shared_line:
            raise ConfigError(f"target {target!r} is not on the shared line")
        qubits = tuple(self.qubit_spec(lab, levels) for lab in self.shared_line)
        return SharedLineSystem(qubits, self.shared_line.index(target))


def _field(mapping: dict, key: str, context: str, required: bool = True, default=None):
    if key not in mapping:
        if required:
            raise ConfigError(f"{context}: missing field {key!r}")
        return default
    return mapping[key]


def parse_device_config(data: dict, source: str = "<config>") -> DeviceConfig:
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: top level must be a JSON object")
    raw_qubits = _field(data, "qubits", source)
    if not isinstance(raw_qubits, list) or not raw_qubits:
        raise ConfigError(f"{source}: 'qubits' must be a nonempty list")
    qubits = []
    for i, q in enumerate(raw_qubits):
        ctx = f"{source}: qubits[{i}]"
        if not isinstance(q, dict):
            raise ConfigError(f"{ctx}: must be an object")
        try:
            qubits.append(
                QubitRecord(
                    label=str(_field(q, "label", ctx)),
                    frequency_Hz=float(_field(q, "frequency_Hz", ctx)),
                    anharmonicity_Hz=float(q.get("anharmonicity_Hz", 0.0)),
                    T1_s=None if q.get("T1_s") is None else float(q["T1_s"]),
                    T2echo_s=None if q.get("T2echo_s") is None else float(q["T2echo_s"]),
                    readout_freq_Hz=None
                    if q.get("readout_freq_Hz") is None
                    else float(q["readout_freq_Hz"]),
                )
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{ctx}: {exc}") from exc
    raw_line = _field(data, "shared_line", source)
    if not isinstance(raw_line, list) or not raw_line:
        raise ConfigError(f"{source}: 'shared_line' must be a nonempty list of labels")
    defaults = Defaults()
    if "defaults" in data:
        d = data["defaults"]
        if not isinstance(d, dict):
            raise ConfigError(f"{source}: 'defaults' must be an object")
        try:
            defaults = Defaults(
                dt_ns=float(d.get("dt_ns", defaults.dt_ns)),
                sigma_Hz=float(d.get("sigma_Hz", defaults.sigma_Hz)),
                T_ns=float(d.get("T_ns", defaults.T_ns)),
                shots=int(d.get("shots", defaults.shots)),
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{source}: defaults: {exc}") from exc
    return DeviceConfig(
        qubits=tuple(qubits),
        shared_line=tuple(str(x) for x in raw_line),
        defaults=defaults,
        name=str(data.get("name", "")),
    )


def load_device_config(path: str | Path) -> DeviceConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from exc
    return parse_device_config(data, source=str(path))


def default_device_config() -> DeviceConfig:
    """The in-repo three-qubit device description."""
    with resources.files("sepkit.data").joinpath("device_default.json").open() as fh:
        return parse_device_config(json.load(fh), source="device_default.json")
