"""File formats: waveform CSV + JSON sidecar, sweep grids, calibration and RB records.

All frequencies in files are plain Hz; floats are written with 12 significant
digits so a round trip reproduces in-memory values to that precision. Files
are written atomically (temp file + rename) and contain no timestamps, so
identical inputs produce byte-identical outputs.
"""
from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .benchmarking import DecayFit, RBResult
from .calibration import CalibratedGate
from .config import TWO_PI
from .dynamics import ExcitationMap
from .errors import ConfigError
from .profiles import FrequencyProfile
from .waveforms import Waveform


def fmt(x: float) -> str:
    return f"{x:.12g}"


def atomic_write_text(path: str | Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dump_json(path: str | Path, payload: dict) -> None:
    atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# Profiles
# ---------------------------------------------------------------------------

def profile_to_dict(profile: FrequencyProfile) -> dict:
    return {
        "drive_freq_Hz": profile.drive_freq / TWO_PI,
        "sigma_Hz": profile.sigma / TWO_PI,
        "delta_Hz": profile.delta / TWO_PI,
        "amplitude": profile.amplitude,
        "null_freqs_Hz": [w / TWO_PI for w in profile.nulls],
        "symmetry": profile.symmetry,
        "base_envelope": profile.base_envelope,
    }


def profile_from_dict(data: dict) -> FrequencyProfile:
    try:
        return FrequencyProfile(
            drive_freq=TWO_PI * float(data["drive_freq_Hz"]),
            sigma=TWO_PI * float(data["sigma_Hz"]),
            delta=TWO_PI * float(data.get("delta_Hz", 0.0)),
            amplitude=float(data.get("amplitude", 1.0)),
            nulls=tuple(TWO_PI * float(w) for w in data.get("null_freqs_Hz", [])),
            symmetry=data.get("symmetry", "symmetric"),
        )
    except KeyError as exc:
        raise ConfigError(f"profile record missing field {exc}") from exc


# ---------------------------------------------------------------------------
# Waveforms
# ---------------------------------------------------------------------------

def write_waveform(base: str | Path, w: Waveform, profile: FrequencyProfile | None = None) -> tuple[Path, Path]:
    """Write ``<base>.csv`` (t_ns, s_x, s_y) and ``<base>.json`` sidecar."""
    base = Path(base)
    lines = ["t_ns,s_x,s_y"]
    for t, s in zip(w.times, w.samples):
        lines.append(f"{fmt(t * 1e9)},{fmt(s.real)},{fmt(s.imag)}")
    csv_path = base.with_suffix(".csv")
    atomic_write_text(csv_path, "\n".join(lines) + "\n")
    sidecar = {
        "dt_ns": w.dt * 1e9,
        "carrier_freq_Hz": w.carrier_freq / TWO_PI,
        "duration_ns": w.duration * 1e9,
        "samples": w.samples.size,
        "area_real_rad": w.area.real,
    }
    if profile is not None:
        sidecar["profile"] = profile_to_dict(profile)
    json_path = base.with_suffix(".json")
    _dump_json(json_path, sidecar)
    return csv_path, json_path


def read_waveform(base: str | Path) -> tuple[Waveform, FrequencyProfile | None]:
    base = Path(base)
    sidecar = json.loads(base.with_suffix(".json").read_text())
    rows = base.with_suffix(".csv").read_text().strip().splitlines()
    if rows[0] != "t_ns,s_x,s_y":
        raise ConfigError(f"{base}.csv: unexpected header {rows[0]!r}")
    sx, sy = [], []
    for row in rows[1:]:
        _, x, y = row.split(",")
        sx.append(float(x))
        sy.append(float(y))
    w = Waveform(
        dt=float(sidecar["dt_ns"]) * 1e-9,
        samples=np.asarray(sx) + 1j * np.asarray(sy),
        carrier_freq=TWO_PI * float(sidecar["carrier_freq_Hz"]),
    )
    profile = profile_from_dict(sidecar["profile"]) if "profile" in sidecar else None
    return w, profile


# ---------------------------------------------------------------------------
# Sweep grids
# ---------------------------------------------------------------------------

def write_excitation_map(base: str | Path, emap: ExcitationMap) -> tuple[Path, Path]:
    """Grid CSV (T_ns, Delta1_MHz, Pe_target, Pe_nontarget) plus metadata JSON."""
    base = Path(base)
    lines = ["T_ns,Delta1_MHz,Pe_target,Pe_nontarget"]
    for i, T in enumerate(emap.T_values):
        for j, d1 in enumerate(emap.delta1_values):
            lines.append(
                ",".join(
                    [
                        fmt(T * 1e9),
                        fmt(d1 / TWO_PI / 1e6),
                        fmt(emap.target_Pe[i, j]),
                        fmt(emap.nontarget_Pe[i, j]),
                    ]
                )
            )
    csv_path = base.with_suffix(".csv")
    atomic_write_text(csv_path, "\n".join(lines) + "\n")
    meta = {
        "family": emap.family,
        "sigma_rule": "sigma = 2*pi / T",
        "dt_ns": emap.dt * 1e9,
        "rows_T_ns": [T * 1e9 for T in emap.T_values],
        "cols_Delta1_MHz": [d / TWO_PI / 1e6 for d in emap.delta1_values],
    }
    json_path = base.with_suffix(".json")
    _dump_json(json_path, meta)
    return csv_path, json_path


# ---------------------------------------------------------------------------
# Calibration records
# ---------------------------------------------------------------------------

def gate_record(gate: CalibratedGate) -> dict:
    p = gate.profile
    return {
        "target": gate.target_label,
        "family": "gaussian" if not p.nulls else "sep",
        "A": p.amplitude,
        "delta_Hz": p.delta / TWO_PI,
        "sigma_Hz": p.sigma / TWO_PI,
        "drive_freq_Hz": p.drive_freq / TWO_PI,
        "null_freqs_Hz": [w / TWO_PI for w in p.nulls],
        "symmetry": p.symmetry,
        "T_ns": gate.waveform.duration * 1e9,
        "dt_ns": gate.waveform.dt * 1e9,
        "rotation_angle": gate.rotation_angle,
        "residual_phase_per_gate": gate.residual_phase_per_gate,
        "objective": gate.objective,
    }


def write_gate_record(path: str | Path, gate: CalibratedGate) -> Path:
    path = Path(path)
    _dump_json(path, gate_record(gate))
    return path


def load_gate_record(path: str | Path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"{path}: cannot read gate record: {exc}") from exc


# ---------------------------------------------------------------------------
# Repeated-gate and RB series
# ---------------------------------------------------------------------------

def write_population_series(path: str | Path, series: dict[str, np.ndarray]) -> Path:
    """Repeated-gate scan: one column per qubit, indexed by gate count."""
    path = Path(path)
    labels = list(series)
    lines = ["n," + ",".join(f"Pg_{lab}" for lab in labels)]
    n_rows = len(next(iter(series.values())))
    for n in range(n_rows):
        lines.append(",".join([str(n)] + [fmt(series[lab][n]) for lab in labels]))
    atomic_write_text(path, "\n".join(lines) + "\n")
    return path


def fit_to_dict(fit: DecayFit | None) -> dict | None:
    if fit is None:
        return None
    return {
        "A": fit.A,
        "p": fit.p,
        "B": fit.B,
        "stderr": list(fit.stderr),
        "fidelity": fit.fidelity,
        "gamma_ex": fit.gamma_ex,
        "degenerate": fit.degenerate,
    }


def write_rb_result(base: str | Path, result: RBResult) -> list[Path]:
    """One survival CSV per qubit series plus a JSON with every fit."""
    base = Path(base)
    written = []
    for label in result.labels:
        lines = ["L,mean_Pg,std_Pg"]
        for i, L in enumerate(result.lengths):
            lines.append(
                f"{L},{fmt(result.means[label][i])},{fmt(result.stds[label][i])}"
            )
        path = base.parent / f"{base.name}_{label}.csv"
        atomic_write_text(path, "\n".join(lines) + "\n")
        written.append(path)
    payload = {
        "target": result.target_label,
        "noise": result.noise,
        "n_seeds": result.n_seeds,
        "lengths": list(result.lengths),
        "fits": {lab: fit_to_dict(result.fits[lab]) for lab in result.labels},
        "fit_errors": result.fit_errors,
    }
    json_path = base.parent / f"{base.name}_fits.json"
    _dump_json(json_path, payload)
    written.append(json_path)
    return written
