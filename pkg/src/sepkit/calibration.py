"""Gate calibration: amplitude root-finding, detuning fine-tune, repeated-gate scans.

The amplitude is tuned so the target-qubit propagator realizes the requested
rotation angle; the profile detuning is then scanned to flatten drive-induced
phase accumulation, judged by how closely repeated applications of the gate
follow the ideal quarter-turn population pattern.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import NoBracket, NonConvergence, NonUnitary
from .profiles import FrequencyProfile
from .system import QubitSpec, SharedLineSystem
from .waveforms import DEFAULT_DT, Waveform, normalize_area, synthesize
from .dynamics import TWO_PI, propagator

_ANGLE_TOL = 1e-8
_MAX_ITER = 100
_BLOCK_LEAK_TOL = 1e-3


@dataclass(frozen=True)
class RotationDecomposition:
    """U = exp(i phase) * exp(-i (angle/2) axis . sigma), angle in [0, pi]."""

    angle: float
    axis: np.ndarray
    global_phase: float


@dataclass(frozen=True)
class CalibratedGate:
    """A tuned pulse together with the rotation it realizes on its target."""

    profile: FrequencyProfile
    waveform: Waveform
    target_label: str
    rotation_angle: float
    residual_phase_per_gate: float
    objective: float | None = None


def rotation_angle_of(U: np.ndarray, tol: float = 1e-8) -> RotationDecomposition:
    """Axis-angle decomposition of a 2x2 unitary.

    The angle is folded into [0, pi]; when the axis is ambiguous (angle 0
    or pi) its sign is fixed by making the largest-magnitude component
    positive, defaulting to +x at angle 0.
    """
    U = np.asarray(U, dtype=complex)
    if U.shape != (2, 2):
        raise NonUnitary(f"expected a 2x2 matrix, got shape {U.shape}")
    if np.linalg.norm(U.conj().T @ U - np.eye(2)) > tol:
        raise NonUnitary("matrix is not unitary within tolerance")
    phase = 0.5 * np.angle(np.linalg.det(U))
    V = U * np.exp(-1j * phase)
    # V = cos(a/2) I - i sin(a/2) n.sigma with sin(a/2) >= 0 enforced below.
    c = 0.5 * np.real(V[0, 0] + V[1, 1])
    b = np.array(
        [
            np.real(1j * (V[0, 1] + V[1, 0])) * 0.5,
            np.real(V[1, 0] - V[0, 1]) * 0.5,
            np.real(1j * (V[0, 0] - V[1, 1])) * 0.5,
        ]
    )
    s = np.linalg.norm(b)
    angle = 2.0 * np.arctan2(s, c)
    if angle > np.pi:  # fold to [0, pi]; flips axis and the phase branch
        angle = 2.0 * np.pi - angle
        b = -b
        phase += np.pi
    if s < 1e-12:
        axis = np.array([1.0, 0.0, 0.0])
    else:
        axis = b / s
    if angle > np.pi - 1e-12:  # axis sign is free at a half turn
        k = int(np.argmax(np.abs(axis)))
        if axis[k] < 0:
            axis = -axis
            phase += np.pi
    phase = float((phase + np.pi) % (2.0 * np.pi) - np.pi)
    return RotationDecomposition(float(angle), axis, phase)


def qubit_block_unitary(U: np.ndarray, leak_tol: float = _BLOCK_LEAK_TOL) -> np.ndarray:
    """Closest unitary to the g-e block of a (possibly larger) propagator.

    Polar projection via SVD; raises if the block has lost more weight than
    ``leak_tol`` allows (the pulse is then leaking, not a qubit gate).
    """
    U = np.asarray(U, dtype=complex)
    if U.shape == (2, 2):
        return U
    block = U[:2, :2]
    u, sv, vh = np.linalg.svd(block)
    if np.any(np.abs(sv - 1.0) > leak_tol):
        raise NonUnitary(
            f"computational block is not unitary (singular values {sv}); leakage too large"
        )
    return u @ vh


def _target_rotation(system: SharedLineSystem, w: Waveform) -> RotationDecomposition:
    U = propagator(
        system.target, w, w.carrier_freq, system.coupling_scales[system.target_index]
    )
    return rotation_angle_of(qubit_block_unitary(U))


def calibrate_amplitude(
    system: SharedLineSystem,
    profile: FrequencyProfile,
    T: float,
    dt: float = DEFAULT_DT,
    theta_goal: float = np.pi / 2,
    a_max: float = 64.0,
) -> CalibratedGate:
    """Scale the profile amplitude until the target rotation equals ``theta_goal``.

    Bracketed bisection followed by secant refinement on the scale applied to
    the area-normalized pulse; the rotation angle is checked to grow
    monotonically while the bracket expands. ``a_max`` bounds the scale.
    """
    if not (0.0 < theta_goal <= np.pi):
        raise ValueError(f"theta_goal must lie in (0, pi], got {theta_goal}")
    base = normalize_area(synthesize(profile, T, dt), theta_goal)

    def angle_at(scale: float) -> float:
        return _target_rotation(system, replace(base, samples=base.samples * scale)).angle

    evaluations = 0

    def tracked(scale: float) -> float:
        nonlocal evaluations
        evaluations += 1
        if evaluations > _MAX_ITER:
            raise NonConvergence("amplitude calibration exceeded its iteration budget")
        return angle_at(scale)

    lo, f_lo = 0.0, 0.0
    hi = 1.0
    f_hi = tracked(hi)
    while f_hi < theta_goal:
        if f_hi < f_lo - 1e-12:
            raise NoBracket("rotation angle is not monotone in amplitude on the bracket")
        lo, f_lo = hi, f_hi
        hi *= 2.0
        if hi > a_max:
            raise NoBracket(
                f"rotation angle reached only {f_lo:.4f} rad at scale {lo:.3g}; "
                f"cannot bracket {theta_goal:.4f} rad below a_max={a_max}"
            )
        f_hi = tracked(hi)

    for _ in range(60):
        if f_hi - f_lo < 1e-14 or abs(f_hi - theta_goal) < _ANGLE_TOL:
            break
        mid = 0.5 * (lo + hi)
        f_mid = tracked(mid)
        if f_mid < theta_goal:
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
        if hi - lo < 1e-12 * max(1.0, hi):
            break

    # Secant polish from the bisection endpoints.
    x0, f0 = lo, f_lo - theta_goal
    x1, f1 = hi, f_hi - theta_goal
    scale, achieved = x1, f1 + theta_goal
    for _ in range(20):
        if abs(f1) < _ANGLE_TOL or f1 == f0:
            break
        x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
        x0, f0 = x1, f1
        x1 = x2
        f1 = tracked(x1) - theta_goal
        scale, achieved = x1, f1 + theta_goal
    if abs(achieved - theta_goal) > _ANGLE_TOL:
        raise NonConvergence(
            f"amplitude calibration stalled at angle {achieved:.12f} rad "
            f"(goal {theta_goal:.12f})"
        )

    waveform = replace(base, samples=base.samples * scale, scale_applied=None)
    total_gain = (base.scale_applied or 1.0) * scale
    rot = _target_rotation(system, waveform)
    return CalibratedGate(
        profile=replace(profile, amplitude=profile.amplitude * total_gain),
        waveform=waveform,
        target_label=system.target.label,
        rotation_angle=rot.angle,
        residual_phase_per_gate=float(rot.angle * rot.axis[2]),
    )


def _ideal_pattern(n_max: int) -> np.ndarray:
    n = np.arange(1, n_max + 1)
    return np.cos(n * np.pi / 4.0) ** 2


def repeated_gate_pattern(system: SharedLineSystem, gate: CalibratedGate, n_max: int) -> np.ndarray:
    """Target-qubit ground population after 1..n_max gate applications."""
    target = system.target
    U = propagator(target, gate.waveform, coupling_scale=system.coupling_scales[system.target_index])
    psi = np.zeros(target.levels, dtype=complex)
    psi[0] = 1.0
    out = np.empty(n_max)
    for n in range(n_max):
        psi = U @ psi
        out[n] = np.abs(psi[0]) ** 2
    return out


def delta_objective(
    system: SharedLineSystem,
    profile: FrequencyProfile,
    T: float,
    dt: float = DEFAULT_DT,
    theta_goal: float = np.pi / 2,
    n_max: int = 32,
) -> tuple[float, CalibratedGate]:
    """L2 deviation of the repeated-gate pattern from the ideal quarter-turn ladder."""
    gate = calibrate_amplitude(system, profile, T, dt, theta_goal)
    pattern = repeated_gate_pattern(system, gate, n_max)
    value = float(np.sum((pattern - _ideal_pattern(n_max)) ** 2))
    return value, gate


def calibrate_delta(
    system: SharedLineSystem,
    gate: CalibratedGate,
    n_max: int = 32,
    window: float = TWO_PI * 10e6,
    n_grid: int = 81,
    refine: bool = True,
    dt: float | None = None,
) -> CalibratedGate:
    """Scan the profile detuning to cancel per-gate phase drift.

    Grid scan over ±window (ties resolved toward smaller |delta|), then
    golden-section refinement inside the best grid cell; the amplitude is
    re-calibrated at every candidate detuning.
    """
    profile = gate.profile
    T = gate.waveform.duration
    if dt is None:
        dt = gate.waveform.dt
    theta_goal = np.pi / 2 if gate.rotation_angle == 0 else gate.rotation_angle

    deltas = np.linspace(-window, window, n_grid)
    cache: dict[float, tuple[float, CalibratedGate]] = {}

    def objective(delta: float) -> float:
        if delta not in cache:
            trial = replace(profile, delta=delta)
            cache[delta] = delta_objective(system, trial, T, dt, theta_goal, n_max)
        return cache[delta][0]

    values = np.array([objective(d) for d in deltas])
    order = np.lexsort((np.abs(deltas), values))
    best = int(order[0])
    best_delta = float(deltas[best])

    if refine and 0 < best < n_grid - 1:
        bracket = (deltas[best - 1], deltas[best], deltas[best + 1])
        if values[best] < values[best - 1] and values[best] < values[best + 1]:
            res = minimize_scalar(objective, bracket=bracket, method="golden",
                                  options={"xtol": 1e-10, "maxiter": 60})
            if res.fun < values[best]:
                best_delta = float(res.x)

    objective(best_delta)  # ensure the winner is cached
    value, tuned = cache[best_delta]
    return replace(tuned, objective=value)


def repeated_gate_scan(
    system: SharedLineSystem,
    gate: CalibratedGate,
    n_max: int,
    shots: int | None = None,
    rng: np.random.Generator | None = None,
) -> dict[str, np.ndarray]:
    """Ground population of every qubit after n = 0..n_max target-gate repetitions.

    Exact probabilities by default; with ``shots`` set, each point is a
    binomial sample mean emulating projective readout.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    out: dict[str, np.ndarray] = {}
    for i, qubit in enumerate(system.qubits):
        U = propagator(qubit, gate.waveform, coupling_scale=system.coupling_scales[i])
        psi = np.zeros(qubit.levels, dtype=complex)
        psi[0] = 1.0
        series = np.empty(n_max + 1)
        series[0] = 1.0
        for n in range(1, n_max + 1):
            psi = U @ psi
            series[n] = np.abs(psi[0]) ** 2
        out[qubit.label] = series
    if shots is not None:
        rng = rng or np.random.default_rng()
        for label, series in out.items():
            out[label] = rng.binomial(shots, np.clip(series, 0.0, 1.0)) / shots
    return out
