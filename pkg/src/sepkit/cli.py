"""Command-line interface: synthesis, sweeps, calibration, and benchmarking pipelines.

Exit codes: 0 success, 2 configuration error, 3 numerical failure. Every
error path prints a single diagnostic line ``error[<kind>]: <message>`` on
stderr.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import benchmarking, calibration, dynamics, io
from .config import TWO_PI, DeviceConfig, default_device_config, load_device_config
from .errors import ConfigError, SepkitError
from .profiles import FrequencyProfile, build_profile
from .waveforms import discontinuity_metric, normalize_area, synthesize

EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _fail(kind: str, message: str, code: int) -> int:
    print(f"error[{kind}]: {message}", file=sys.stderr)
    return code


def _load_config(args) -> DeviceConfig:
    if args.config is None:
        return default_device_config()
    return load_device_config(args.config)


def _gate_profile(
    config: DeviceConfig,
    target: str,
    family: str,
    sigma_Hz: float,
    delta_Hz: float,
    nontargets: str = "line",
) -> FrequencyProfile:
    """SEP profile with nulls at the other shared-line qubits, or a plain Gaussian."""
    target_spec = config.qubit_spec(target)
    if family == "gaussian" or nontargets == "none":
        others = []
    else:
        others = [config.qubit_spec(lab) for lab in config.shared_line if lab != target]
    symmetry = "asymmetric" if family == "sep_asym" else "symmetric"
    return build_profile(
        target_spec,
        others,
        sigma=TWO_PI * sigma_Hz,
        delta=TWO_PI * delta_Hz,
        symmetry=symmetry,
    )


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_synthesize(args) -> int:
    config = _load_config(args)
    dt = (args.dt_ns or config.defaults.dt_ns) * 1e-9
    sigma_Hz = args.sigma_mhz * 1e6 if args.sigma_mhz else config.defaults.sigma_Hz
    T = (args.t_ns or config.defaults.T_ns) * 1e-9
    profile = _gate_profile(
        config, args.target, args.family, sigma_Hz, args.delta_mhz * 1e6, args.nontargets
    )
    w = normalize_area(synthesize(profile, T, dt), args.angle)
    disc = discontinuity_metric(w)
    base = _outdir(args) / f"waveform_{args.target}_{args.family}"
    csv_path, _ = io.write_waveform(base, w, profile)
    print(f"wrote {csv_path}")
    print(f"discontinuity start={disc['start']:.6g} end={disc['end']:.6g} rad/s")
    return 0


def cmd_sweep(args) -> int:
    config = _load_config(args)
    dt = (args.dt_ns or config.defaults.dt_ns) * 1e-9
    if args.t_max_ns <= args.t_min_ns or args.delta_max_mhz <= args.delta_min_mhz:
        raise ConfigError("sweep ranges must satisfy min < max")
    T_values = np.linspace(args.t_min_ns, args.t_max_ns, args.t_steps) * 1e-9
    d_values = TWO_PI * np.linspace(args.delta_min_mhz, args.delta_max_mhz, args.delta_steps) * 1e6
    template = config.qubit_spec(config.shared_line[0])
    families = (
        ["gaussian", "sep_asym", "sep_sym"] if args.family == "all" else [args.family]
    )
    out = _outdir(args)
    for family in families:
        emap = dynamics.excitation_map(template, family, T_values, d_values, dt=dt)
        csv_path, _ = io.write_excitation_map(out / f"sweep_{family}", emap)
        print(f"wrote {csv_path}")
    return 0


def _calibrate_gate(config, args, family: str, target: str):
    dt = (args.dt_ns or config.defaults.dt_ns) * 1e-9
    sigma_Hz = getattr(args, "sigma_mhz", None)
    sigma_Hz = sigma_Hz * 1e6 if sigma_Hz else config.defaults.sigma_Hz
    T = (getattr(args, "t_ns", None) or config.defaults.T_ns) * 1e-9
    levels = getattr(args, "levels", 2)
    system = config.system(target, levels=levels)
    profile = _gate_profile(config, target, family, sigma_Hz, 0.0)
    gate = calibration.calibrate_amplitude(system, profile, T, dt)
    if getattr(args, "tune_delta", False):
        gate = calibration.calibrate_delta(system, gate, n_max=args.n_max)
    return system, gate


def cmd_calibrate(args) -> int:
    config = _load_config(args)
    system, gate = _calibrate_gate(config, args, args.family, args.target)
    path = io.write_gate_record(
        _outdir(args) / f"gate_{args.target}_{args.family}.json", gate
    )
    delta_mhz = gate.profile.delta / TWO_PI / 1e6
    print(f"wrote {path}")
    print(
        f"rotation_angle={gate.rotation_angle:.9f} rad  delta={delta_mhz:.6g} MHz  "
        f"A={gate.profile.amplitude:.6g}"
    )
    return 0


def cmd_rabi(args) -> int:
    config = _load_config(args)
    shots = args.shots if args.shots else None
    rng = np.random.default_rng(args.seed)
    out = _outdir(args)
    for family in ("gaussian", "sep_sym"):
        for target in config.shared_line:
            system, gate = _calibrate_gate(config, args, family, target)
            series = calibration.repeated_gate_scan(
                system, gate, args.n_max, shots=shots, rng=rng
            )
            path = io.write_population_series(
                out / f"rabi_{target}_{family}.csv", series
            )
            print(f"wrote {path}")
    return 0


def cmd_rb(args) -> int:
    config = _load_config(args)
    lengths = [int(x) for x in args.lengths.split(",")]
    shots = args.shots if args.shots else None
    out = _outdir(args)
    for family in args.families.split(","):
        system, gate = _calibrate_gate(config, args, family, args.target)
        result = benchmarking.simulate_rb(
            system,
            gate,
            lengths=lengths,
            n_seeds=args.seeds,
            noise=args.noise,
            shots=shots,
            rng_seed=args.seed,
        )
        paths = io.write_rb_result(out / f"rb_{args.target}_{family}", result)
        for p in paths:
            print(f"wrote {p}")
        fit = result.fits[args.target]
        if fit is not None and not fit.degenerate:
            print(
                f"{family}: target fidelity={fit.fidelity:.6f} p={fit.p:.6f} "
                f"(pm {fit.stderr[1]:.2g})"
            )
        else:
            print(f"{family}: target fit degenerate or failed")
    return 0


def cmd_leakage_scan(args) -> int:
    config = _load_config(args)
    dt = (args.dt_ns or config.defaults.dt_ns) * 1e-9
    sigmas = TWO_PI * np.linspace(args.sigma_min_mhz, args.sigma_max_mhz, args.steps) * 1e6
    record = config.record(args.qubit)
    qubit = config.qubit_spec(args.qubit, levels=3)
    scan = dynamics.leakage_scan(
        qubit, sigmas, T=args.t_ns * 1e-9, delta1=TWO_PI * args.delta_mhz * 1e6, dt=dt
    )
    lines = ["sigma_MHz,Pe,Pf,sx0"]
    for i in range(sigmas.size):
        lines.append(
            f"{io.fmt(sigmas[i] / TWO_PI / 1e6)},{io.fmt(scan.P_e[i])},"
            f"{io.fmt(scan.P_f[i])},{io.fmt(scan.start_discontinuity[i])}"
        )
    path = _outdir(args) / f"leakage_{record.label}.csv"
    io.atomic_write_text(path, "\n".join(lines) + "\n")
    print(f"wrote {path}")
    return 0


def cmd_drag_scan(args) -> int:
    config = _load_config(args)
    dt = (args.dt_ns or config.defaults.dt_ns) * 1e-9
    target = dynamics.QubitSpec(
        frequency=TWO_PI * config.record(config.shared_line[0]).frequency_Hz,
        anharmonicity=TWO_PI * args.alpha_mhz * 1e6,
        levels=3,
        label="T",
    )
    lambdas = np.linspace(args.lambda_min, args.lambda_max, args.steps)
    scan = dynamics.drag_scan(
        target,
        nontarget_detuning=TWO_PI * args.delta_mhz * 1e6,
        lambdas=lambdas,
        T=args.t_ns * 1e-9,
        dt=dt,
    )
    lines = ["lambda,target_Pf,target_Pe,nontarget_Pe,nontarget_Pf"]
    for i in range(lambdas.size):
        lines.append(
            ",".join(
                io.fmt(v)
                for v in (
                    lambdas[i],
                    scan.target_Pf[i],
                    scan.target_Pe[i],
                    scan.nontarget_Pe[i],
                    scan.nontarget_Pf[i],
                )
            )
        )
    path = _outdir(args) / "drag_scan.csv"
    io.atomic_write_text(path, "\n".join(lines) + "\n")
    print(f"wrote {path}")
    print(f"best lambda={scan.best_lambda:.4g} min target Pf={scan.min_target_Pf:.3e}")
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sepkit",
        description="Null-engineered pulse synthesis and shared-line qubit simulation",
    )
    parser.add_argument("--config", help="device JSON (defaults to the in-repo device)")
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument("--seed", type=int, default=0, help="RNG seed")
    parser.add_argument("--dt-ns", type=float, default=None, help="sample period (ns)")
    parser.add_argument("--shots", type=int, default=0, help="0 = exact probabilities")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synthesize", help="build a pulse and export CSV + JSON")
    p.add_argument("--target", required=True)
    p.add_argument("--family", default="sep_sym",
                   choices=["gaussian", "sep_asym", "sep_sym", "sep"])
    p.add_argument("--sigma-mhz", type=float, default=None)
    p.add_argument("--t-ns", type=float, default=None)
    p.add_argument("--delta-mhz", type=float, default=0.0)
    p.add_argument("--angle", type=float, default=np.pi / 2)
    p.add_argument("--nontargets", default="line", choices=["line", "none"])
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("sweep", help="excitation maps over (T, Delta1)")
    p.add_argument("--family", default="all",
                   choices=["all", "gaussian", "sep_asym", "sep_sym"])
    p.add_argument("--t-min-ns", type=float, default=10.0)
    p.add_argument("--t-max-ns", type=float, default=100.0)
    p.add_argument("--t-steps", type=int, default=30)
    p.add_argument("--delta-min-mhz", type=float, default=-60.0)
    p.add_argument("--delta-max-mhz", type=float, default=60.0)
    p.add_argument("--delta-steps", type=int, default=30)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("calibrate", help="tune amplitude (and optionally delta)")
    p.add_argument("--target", required=True)
    p.add_argument("--family", default="sep_sym",
                   choices=["gaussian", "sep_asym", "sep_sym", "sep"])
    p.add_argument("--sigma-mhz", type=float, default=None)
    p.add_argument("--t-ns", type=float, default=None)
    p.add_argument("--levels", type=int, default=2, choices=[2, 3])
    p.add_argument("--tune-delta", action="store_true")
    p.add_argument("--n-max", type=int, default=32)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("rabi", help="repeated-gate scans for every target and family")
    p.add_argument("--n-max", type=int, default=32)
    p.add_argument("--levels", type=int, default=2, choices=[2, 3])
    p.set_defaults(func=cmd_rabi)

    p = sub.add_parser("rb", help="randomized benchmarking")
    p.add_argument("--target", required=True)
    p.add_argument("--families", default="sep_sym,gaussian")
    p.add_argument("--lengths", default=",".join(str(L) for L in benchmarking.DEFAULT_LENGTHS))
    p.add_argument("--seeds", type=int, default=benchmarking.DEFAULT_SEEDS)
    p.add_argument("--noise", default="open", choices=["open", "unitary"])
    p.add_argument("--levels", type=int, default=2, choices=[2, 3])
    p.set_defaults(func=cmd_rb)

    p = sub.add_parser("leakage-scan", help="three-level non-target response vs sigma")
    p.add_argument("--qubit", default="Q1")
    p.add_argument("--sigma-min-mhz", type=float, default=15.0)
    p.add_argument("--sigma-max-mhz", type=float, default=60.0)
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--t-ns", type=float, default=40.0)
    p.add_argument("--delta-mhz", type=float, default=30.0)
    p.set_defaults(func=cmd_leakage_scan)

    p = sub.add_parser("drag-scan", help="derivative-coefficient scan for leakage")
    p.add_argument("--lambda-min", type=float, default=-2.0)
    p.add_argument("--lambda-max", type=float, default=2.0)
    p.add_argument("--steps", type=int, default=81)
    p.add_argument("--t-ns", type=float, default=16.0)
    p.add_argument("--delta-mhz", type=float, default=46.0)
    p.add_argument("--alpha-mhz", type=float, default=-300.0)
    p.set_defaults(func=cmd_drag_scan)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command in ("synthesize", "calibrate", "rb") and getattr(args, "family", None) == "sep":
        args.family = "sep_sym"
    try:
        return args.func(args)
    except ConfigError as exc:
        return _fail("config", str(exc), EXIT_CONFIG)
    except SepkitError as exc:
        return _fail("numeric", str(exc), EXIT_NUMERIC)


if __name__ == "__main__":
    sys.exit(main())
